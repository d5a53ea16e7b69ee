#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fpprep/addition.hpp"
#include "fpprep/error.hpp"
#include "fpprep/fp_core.hpp"

using namespace fpprep;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::invalid_argument;
}

bool shares_binade(const std::vector<float>& ys, int e_u) {
  for (float y : ys) {
    const auto a = decompose(y);
    if (a.sign != 0 || a.unbiased_exponent() != e_u) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("worked table: a = 1738 puts both samples in 2^10") {
  const std::vector x{53.333f, 309.333f};
  const auto y = apply_addition(x, AdditionPlan{1738.0f, 10, precision(10) / 2});
  CHECK(y[0] == 1791.333f);
  CHECK(y[1] == 2047.333f);
  CHECK(shares_binade(y, 10));
}

TEST_CASE("worked example: 1.5 + 1e7") {
  const AdditionPlan plan{1e7f, 23, 0.5};
  const auto y = apply_addition(std::vector{1.5f}, plan);
  CHECK(y[0] == 10000002.0f);
  const auto back = invert_addition(y, plan);
  CHECK(back[0] == 2.0f);
  CHECK(std::fabs(back[0] - 1.5) == 0.5);
}

TEST_CASE("plan for a forced exponent anchors the maximum on the top of the binade") {
  const std::vector x{53.333f, 309.333f};
  const auto plan = addition_plan_for_exponent(x, 10);
  const double p = std::ldexp(1.0, -13);
  const double ideal = 2048.0 - p - static_cast<double>(x[1]);
  CHECK(plan.target_e_u == 10);
  CHECK(plan.predicted_bound == p / 2);
  CHECK(static_cast<double>(plan.a) <= ideal);
  CHECK(ideal < static_cast<double>(plan.a) + p);
  CHECK(std::fmod(static_cast<double>(plan.a), p) == 0.0);
  CHECK(shares_binade(apply_addition(x, plan), 10));
}

TEST_CASE("8..12 moved to [16, 32) share exponent 4") {
  const std::vector x{8.0f, 9.0f, 10.0f, 11.0f, 12.0f};
  const auto plan = addition_plan_for_exponent(x, 4);
  CHECK(shares_binade(apply_addition(x, plan), 4));
  CHECK(code_of([&] { addition_plan_for_exponent(x, 1); }) == ErrorCode::infeasible);
}

TEST_CASE("singleton: selector returns the largest exponent within the bound") {
  const std::vector x{3.0f};
  const auto bound = ErrorBound::relative(0.25);
  int expected = 0;
  bool seen = false;
  for (int e = -126; e <= 126; ++e) {
    AdditionPlan plan;
    try {
      plan = addition_plan_for_exponent(x, e);
    } catch (const Error&) {
      continue;
    }
    const float back = invert_addition(apply_addition(x, plan), plan)[0];
    if (bound.admits(x[0], back)) {
      expected = e;
      seen = true;
    } else if (seen) {
      break;
    }
  }
  REQUIRE(seen);
  CHECK(select_addition_parameter(x, bound).target_e_u == expected);
}

TEST_CASE("zero maps to a") {
  const std::vector x{0.0f, 5.0f};
  const auto plan = select_addition_parameter(x, ErrorBound::absolute(0.1));
  CHECK(apply_addition(std::vector{0.0f}, plan)[0] == plan.a);
}

TEST_CASE("a shift below the samples' own spacing recovers exactly") {
  const std::vector x{600.3f, 700.7f, 1000.1f};
  const AdditionPlan plan{std::ldexp(1.0f, -20), 9, precision(9) / 2};
  CHECK(plan.a < precision(9));
  const auto back = invert_addition(apply_addition(x, plan), plan);
  CHECK(back == x);
}

TEST_CASE("selector errors") {
  CHECK(code_of([] { select_addition_parameter(std::vector<float>{}, ErrorBound::unbounded()); }) ==
        ErrorCode::invalid_argument);
  CHECK(code_of([] {
          select_addition_parameter(std::vector{-1000.3f, 1.1f}, ErrorBound::relative(1e-6));
        }) == ErrorCode::unsupported_data);
  CHECK(code_of([] {
          select_addition_parameter(std::vector{1.1f, 1000.0f}, ErrorBound::relative(1e-9));
        }) == ErrorCode::infeasible);
  CHECK(code_of([] {
          apply_addition(std::vector{5000.0f}, addition_plan_for_exponent(std::vector{1.0f, 2.0f}, 3));
        }) == ErrorCode::invalid_argument);
}

TEST_CASE("random datasets: exponent sharing, half-precision bound, grid recovery") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> log_scale(-6.0, 6.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> size(1, 40);
  for (int trial = 0; trial < 2000; ++trial) {
    const double lo = std::pow(10.0, log_scale(rng));
    const double width = lo * std::pow(10.0, log_scale(rng) / 3);
    std::vector<float> x(size(rng));
    for (auto& v : x) v = static_cast<float>(lo + width * unit(rng));
    const auto bound = ErrorBound::relative(std::pow(10.0, -1.0 - 4.0 * unit(rng)));
    AdditionPlan plan;
    try {
      plan = select_addition_parameter(x, bound);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::infeasible);
      continue;
    }
    const auto y = apply_addition(x, plan);
    REQUIRE(shares_binade(y, plan.target_e_u));
    const auto back = invert_addition(y, plan);
    const double p = precision(plan.target_e_u);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(std::fabs(static_cast<double>(back[i]) - x[i]) <= p / 2);
      CHECK(std::fmod(static_cast<double>(back[i]), p) == 0.0);
      CHECK(bound.admits(x[i], back[i]));
    }
  }
}

TEST_CASE("every float in a quantisation bracket recovers to the bracket's base") {
  const std::vector<float> anchor{1.0f, 1.9f};
  const auto plan = addition_plan_for_exponent(anchor, 10);
  const double py = precision(10);
  const float base = 1.25f;  // a multiple of P_y
  const float first_y = apply_addition(std::vector{base}, plan)[0];
  const float last = static_cast<float>(base + py / 2 - precision(0));
  int count = 0;
  for (float x = base; x <= last; x = std::nextafter(x, 2.0f)) {
    const std::vector v{x};
    const auto y = apply_addition(v, plan);
    REQUIRE(y[0] == first_y);
    REQUIRE(invert_addition(y, plan)[0] == base);
    ++count;
  }
  CHECK(count == 1 << 9);
}

TEST_CASE("larger target exponents never measure smaller errors") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<float> dist(10.0f, 500.0f);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<float> x(16);
    for (auto& v : x) v = dist(rng);
    double previous = 0.0;
    for (int e = 9; e <= 30; ++e) {
      const auto plan = addition_plan_for_exponent(x, e);
      const auto back = invert_addition(apply_addition(x, plan), plan);
      const double err = max_abs_error(x, back);
      CHECK(err >= previous);
      previous = err;
    }
  }
}
