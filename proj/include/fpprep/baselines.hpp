#pragma once

// Lossless decimal scaling: multiply every sample by 10^d, where d is the
// largest number of fractional digits in the source text, so every value
// becomes an integer. Scaling is done by digit shifting on the text, never by
// binary multiplication.

#include <span>
#include <string>
#include <vector>

namespace fpprep {

struct ScalePlan {
  int power = 0;                    // d
  bool scaled_are_integers = true;  // false only for the identity fallback

  friend bool operator==(const ScalePlan&, const ScalePlan&) = default;
};

/// Largest magnitude a scaled integer may have and still be exact in binary32.
inline constexpr double kExactIntegerLimit = 16777216.0;  // 2^24

/// Throws Error{parse} for a token that is not a plain decimal numeral and
/// Error{lossless_infeasible} when some scaled magnitude exceeds 2^24.
ScalePlan select_scale(std::span<const std::string> tokens);

/// Identity plan used when lossless scaling is infeasible.
ScalePlan identity_scale();

std::vector<float> apply_scale(std::span<const std::string> tokens, const ScalePlan& plan);

/// Scaled values back to canonical decimal text ("12.700" -> "12.7",
/// "-0" -> "0"). For the identity plan this is the shortest round-trip text.
std::vector<std::string> invert_scale(std::span<const float> values, const ScalePlan& plan);

/// Fractional digit count of a decimal numeral; throws Error{parse} otherwise.
int fractional_digits(const std::string& token);

}  // namespace fpprep
