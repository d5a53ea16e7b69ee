#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "fpprep/error.hpp"
#include "fpprep/error_metrics.hpp"

using namespace fpprep;

TEST_CASE("max_abs_error") {
  CHECK(max_abs_error(std::vector{1.5f}, std::vector{2.0f}) == 0.5);
  const std::vector s{1.0f, -3.0f, 7.5f};
  CHECK(max_abs_error(s, s) == 0.0);
  CHECK(max_abs_error(std::vector{1.0f, 10.0f}, std::vector{1.25f, 10.1f}) ==
        doctest::Approx(0.25));
  CHECK_THROWS_AS(max_abs_error(std::vector{1.0f}, std::vector{1.0f, 2.0f}), Error);
}

TEST_CASE("max_rel_error") {
  const double d = max_rel_error(std::vector{363.754f}, std::vector{363.7894592285156f});
  CHECK(d == doctest::Approx(9.75e-5).epsilon(0.01));
  CHECK(d < 1e-4);
  const std::vector s{2.0f, -4.0f};
  CHECK(max_rel_error(s, s) == 0.0);
  CHECK(max_rel_error(std::vector{0.0f}, std::vector{0.0f}) == 0.0);
  CHECK(std::isinf(max_rel_error(std::vector{0.0f}, std::vector{1e-30f})));
}

TEST_CASE("error maxima ignore the sign of each error") {
  const std::vector x{1.0f, 2.0f, 4.0f};
  const std::vector up{1.1f, 2.2f, 4.0f};
  const std::vector down{0.9f, 1.8f, 4.0f};
  CHECK(max_abs_error(x, up) == doctest::Approx(max_abs_error(x, down)).epsilon(1e-6));
  CHECK(max_rel_error(x, up) == doctest::Approx(max_rel_error(x, down)).epsilon(1e-6));
}

TEST_CASE("worsening one sample never lowers the maxima") {
  const std::vector x{1.0f, 2.0f, 4.0f};
  std::vector r{1.01f, 2.0f, 4.0f};
  const double a = max_abs_error(x, r);
  const double d = max_rel_error(x, r);
  r[2] = 4.5f;
  CHECK(max_abs_error(x, r) >= a);
  CHECK(max_rel_error(x, r) >= d);
}

TEST_CASE("compression ratio") {
  CHECK(compression_ratio(50, 100) == 0.5);
  CHECK(compression_ratio(100, 100) == 1.0);
  CHECK(compression_ratio(120, 100) == 1.2);
  CHECK_THROWS_AS(compression_ratio(1, 0), Error);
}

TEST_CASE("delta CR percent") {
  CHECK(delta_cr_percent(0.4, 0.5) == doctest::Approx(-20.0));
  CHECK(delta_cr_percent(0.5, 0.5) == 0.0);
  CHECK(delta_cr_percent(0.1, 0.5) == doctest::Approx(-80.0));
  for (double x : {0.01, 0.3, 1.0, 2.5}) CHECK(delta_cr_percent(x, x) == 0.0);
  CHECK_THROWS_AS(delta_cr_percent(0.5, 0.0), Error);
}

TEST_CASE("error bounds") {
  CHECK_THROWS_AS(ErrorBound::absolute(0.0), Error);
  CHECK_THROWS_AS(ErrorBound::relative(-1.0), Error);

  const auto abs = ErrorBound::absolute(0.5);
  CHECK(abs.admits(1.5, 2.0));
  CHECK_FALSE(abs.admits(1.5, 2.01));
  CHECK(abs.admits_maxima(0.5, 1e9));

  const auto rel = ErrorBound::relative(0.01);
  CHECK(rel.admits(100.0, 101.0));
  CHECK_FALSE(rel.admits(100.0, 101.5));
  CHECK(rel.admits(0.0, 0.0));
  CHECK_FALSE(rel.admits(0.0, 1e-30));
  CHECK(rel.admits_maxima(1e9, 0.01));
  CHECK_FALSE(rel.admits_maxima(0.0, std::numeric_limits<double>::infinity()));

  CHECK(ErrorBound::unbounded().admits(1.0, 1e30));
  CHECK(bound_kind_from_string("relative") == BoundKind::relative);
  CHECK_THROWS_AS(bound_kind_from_string("loose"), Error);
}

TEST_CASE("make_report") {
  const auto r = make_report("builtin", 40, 100, 0.5, 0.1, 0.01);
  CHECK(r.cr == 0.4);
  CHECK(r.delta_cr_percent == doctest::Approx(-20.0));
  CHECK(r.compressed_bytes == 40);
  CHECK(r.max_rel_error == 0.01);
}
