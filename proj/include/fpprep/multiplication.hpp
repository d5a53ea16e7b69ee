#pragma once

// Multiplication transform: each sample x is replaced by a nearby x^ whose
// product y = x^ * m ends in a long run of zero mantissa bits. x^ is built by
// keeping the high bits of x and patching the rest with a repeating block of
// the binary expansion of c/m; the stored y is divided by m to recover x^.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpprep/error_metrics.hpp"

namespace fpprep {

inline constexpr int kMinMultiplier = 3;
inline constexpr int kMaxMultiplier = 61;

/// Repeating block of 1/m in base 2. `block * m == 2^length - 1`.
struct Pattern {
  int m = 0;
  int length = 0;            // multiplicative order of 2 modulo m
  std::uint64_t block = 0;   // first period of 1/m, `length` bits
  std::uint64_t canonical = 0;  // rotation of `block` with a leading 1

  std::string block_bits() const;     // e.g. "000100111011"
  std::string canonical_hex() const;  // e.g. "0x9d8"
};

/// Throws Error{invalid_argument} unless m is odd and in [3, 61].
Pattern pattern_for(int m);

/// Rotates an L-bit value left by k.
std::uint64_t rotate_bits(std::uint64_t value, int length, int k);

/// Fills a 24-bit significand with `pattern` starting at each rotation that
/// begins with a 1, rounds the infinite tail to nearest, multiplies by m and
/// rounds the product to 24 bits. True when every rotation yields at least
/// 23 - floor(log2 m) trailing zero mantissa bits, allowing the one-ulp
/// multiply-and-check correction. Constant patterns ("000", "11") never
/// qualify. `pattern` is a string of '0'/'1', at most 60 characters.
bool verify_pattern(int m, std::string_view pattern);

struct Substitution {
  float original = 0.0f;     // x
  float substituted = 0.0f;  // x^, also the recovered value
  float product = 0.0f;      // y = round(x^ * m)
  int trailing_zeros = 0;    // trailing_zero_count(y), 23 for y == 0
  double abs_error = 0.0;    // |x^ - x|
  double rel_error = 0.0;    // |x^ - x| / |x|, 0 when x == 0
  int bit_distance = 0;      // changed bits between x and x^

  friend bool operator==(const Substitution&, const Substitution&) = default;
};

/// Every bound-compliant, closed substitution of x for multiplier m, sorted by
/// (trailing_zeros desc, abs_error asc, bit_distance asc, substituted asc).
/// Candidate product exponents are E(x*m) and its two neighbours; zero-run
/// targets go from 23 down to 1; patches use every residue c in [1, m-1].
/// An empty result means m cannot serve x under the bound.
std::vector<Substitution> enumerate_substitutions(float x, int m, const ErrorBound& bound);

/// If y already has `required_zeros` trailing zeros it is returned unchanged.
/// Otherwise the one-ulp neighbours are tried; a neighbour qualifies when it
/// has enough zeros and round(round(y'/m) * m) == y'. Throws
/// Error{unadjustable} when neither does.
float multiply_and_check(float y, int m, int required_zeros);

struct MultiplicationPlan {
  int m = 0;
  int min_common_zeros = 0;
  std::vector<Substitution> per_sample;  // aligned with the input data
};

/// Brute-force search over odd m in [3, 61]: a multiplier is eligible when every
/// sample has a compliant substitution; its score is the smallest, over samples,
/// of the most trailing zeros that sample can reach. The best score wins (ties
/// go to the smaller m). Each sample then takes the lowest-error substitution
/// with at least that many zeros. Throws Error{infeasible} if no m is eligible.
MultiplicationPlan select_multiplication_parameter(std::span<const float> data,
                                                   const ErrorBound& bound);

/// Same as the search above with the multiplier fixed.
MultiplicationPlan multiplication_plan_for(std::span<const float> data, int m,
                                           const ErrorBound& bound);

/// Emits each sample's product. Throws Error{invalid_argument} when a sample
/// does not match the plan entry at its position.
std::vector<float> apply_multiplication(std::span<const float> data,
                                        const MultiplicationPlan& plan);

/// x~_i = round(y_i / m).
std::vector<float> invert_multiplication(std::span<const float> transformed, int m);

}  // namespace fpprep
