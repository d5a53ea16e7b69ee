#pragma once

// Addition transform: y_i = x_i + a with a chosen so that every y_i lands in
// one binade [2^e, 2^(e+1)). All outputs then share sign, exponent and the
// leading mantissa bits; the price is quantisation to that binade's spacing.

#include <span>
#include <vector>

#include "fpprep/error_metrics.hpp"

namespace fpprep {

struct AdditionPlan {
  float a = 0.0f;            // the addition parameter, > 0
  int target_e_u = 0;        // unbiased exponent shared by every shifted sample
  double predicted_bound = 0.0;  // precision(target_e_u) / 2

  friend bool operator==(const AdditionPlan&, const AdditionPlan&) = default;
};

/// Plan that places max(data) on the last representable value of binade
/// `e_u` (a = 2^(e_u+1) - 2^(e_u-23) - max, floored onto that binade's grid).
/// Throws Error{infeasible} when the shifted data would not fit in the binade.
AdditionPlan addition_plan_for_exponent(std::span<const float> data, int e_u);

/// Scans target exponents upward from the smallest one the data fits in and
/// returns the largest whose measured round-trip error satisfies `bound`.
///
/// Errors: invalid_argument for empty input; unsupported_data for non-finite
/// samples, data that fits no binade, or negative data whose smallest plan
/// already breaks the bound; infeasible when the smallest plan of
/// non-negative data breaks the bound.
AdditionPlan select_addition_parameter(std::span<const float> data, const ErrorBound& bound);

/// y_i = round(x_i + a). Throws Error{invalid_argument} if a result leaves the
/// plan's binade.
std::vector<float> apply_addition(std::span<const float> data, const AdditionPlan& plan);

/// x~_i = round(y_i - a).
std::vector<float> invert_addition(std::span<const float> transformed, const AdditionPlan& plan);

}  // namespace fpprep
