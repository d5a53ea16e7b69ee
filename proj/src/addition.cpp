#include "fpprep/addition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "fpprep/error.hpp"
#include "fpprep/fp_core.hpp"

namespace fpprep {

namespace {

constexpr int kMinExponent = -126;
constexpr int kMaxExponent = 126;  // keeps 2^(e+1) finite

struct Range {
  float lo;
  float hi;
};

Range data_range(std::span<const float> data) {
  if (data.empty()) throw Error(ErrorCode::invalid_argument, "addition transform: empty data");
  Range r{std::numeric_limits<float>::infinity(), -std::numeric_limits<float>::infinity()};
  for (float v : data) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::unsupported_data, "addition transform: non-finite sample");
    }
    r.lo = std::min(r.lo, v);
    r.hi = std::max(r.hi, v);
  }
  return r;
}

bool in_binade(float y, int e_u) {
  const auto w = to_bits(y);
  return (w >> 31) == 0 && static_cast<int>((w >> kMantissaBits) & 0xffu) == e_u + kExponentBias;
}

std::optional<AdditionPlan> try_plan(Range r, int e_u) {
  if (e_u < kMinExponent || e_u > kMaxExponent) return std::nullopt;
  // a / P = (2^24 - 1) - ceil(max / P): the largest grid multiple with
  // max + a <= top of the binade.
  const double steps = std::ldexp(1.0, kMantissaBits + 1) - 1.0 -
                       std::ceil(std::ldexp(static_cast<double>(r.hi), kMantissaBits - e_u));
  if (!(steps > 0.0)) return std::nullopt;
  const double exact = std::ldexp(steps, e_u - kMantissaBits);
  if (exact > std::numeric_limits<float>::max()) return std::nullopt;
  float a = static_cast<float>(exact);
  if (static_cast<double>(a) > exact) a = std::nextafter(a, 0.0f);
  if (!(a > 0.0f)) return std::nullopt;

  // Float addition is monotone, so checking both ends covers every sample.
  if (!in_binade(r.lo + a, e_u) || !in_binade(r.hi + a, e_u)) return std::nullopt;
  return AdditionPlan{a, e_u, precision(e_u) / 2.0};
}

bool round_trip_within(std::span<const float> data, const AdditionPlan& plan,
                       const ErrorBound& bound) {
  for (float x : data) {
    const float y = x + plan.a;
    const float back = y - plan.a;
    if (!bound.admits(x, back)) return false;
  }
  return true;
}

int first_candidate_exponent(Range r) {
  const double width = static_cast<double>(r.hi) - static_cast<double>(r.lo);
  if (width == 0.0) return kMinExponent;
  return std::max(kMinExponent, std::ilogb(width) - 1);
}

}  // namespace

AdditionPlan addition_plan_for_exponent(std::span<const float> data, int e_u) {
  const auto plan = try_plan(data_range(data), e_u);
  if (!plan) {
    throw Error(ErrorCode::infeasible,
                "addition transform: data cannot be shifted into binade 2^" + std::to_string(e_u));
  }
  return *plan;
}

AdditionPlan select_addition_parameter(std::span<const float> data, const ErrorBound& bound) {
  const Range r = data_range(data);
  std::optional<AdditionPlan> best;
  bool any_structural = false;

  for (int e = first_candidate_exponent(r); e <= kMaxExponent; ++e) {
    const auto plan = try_plan(r, e);
    if (!plan) continue;
    any_structural = true;
    if (round_trip_within(data, *plan, bound)) {
      best = plan;
      continue;
    }
    if (best) break;
    if (r.lo < 0.0f) {
      throw Error(ErrorCode::unsupported_data,
                  "addition transform: negative samples cannot be shifted into one binade "
                  "within the error bound");
    }
    throw Error(ErrorCode::infeasible,
                "addition transform: smallest single-binade plan (2^" + std::to_string(e) +
                    ") violates the error bound");
  }
  if (!best) {
    throw Error(any_structural ? ErrorCode::infeasible : ErrorCode::unsupported_data,
                "addition transform: no binade holds the shifted data");
  }
  return *best;
}

std::vector<float> apply_addition(std::span<const float> data, const AdditionPlan& plan) {
  std::vector<float> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const float y = data[i] + plan.a;
    if (!in_binade(y, plan.target_e_u)) {
      throw Error(ErrorCode::invalid_argument,
                  "apply_addition: sample " + std::to_string(i) + " (" + std::to_string(data[i]) +
                      ") falls outside the plan's binade");
    }
    out.push_back(y);
  }
  return out;
}

std::vector<float> invert_addition(std::span<const float> transformed, const AdditionPlan& plan) {
  std::vector<float> out;
  out.reserve(transformed.size());
  for (float y : transformed) out.push_back(y - plan.a);
  return out;
}

}  // namespace fpprep
