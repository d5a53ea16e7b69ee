#pragma once

// Bit-level anatomy of IEEE-754 binary32 values.
//
// Only normal, nonzero values have an anatomy. Zero is handled by the
// transforms themselves; subnormals, infinities and NaN are rejected.

#include <array>
#include <bit>
#include <cstdint>
#include <span>

namespace fpprep {

inline constexpr int kMantissaBits = 23;
inline constexpr int kExponentBias = 127;
inline constexpr std::uint32_t kMantissaMask = (1u << kMantissaBits) - 1u;

struct FloatAnatomy {
  std::uint32_t sign = 0;             // 0 non-negative, 1 negative
  std::uint32_t biased_exponent = 0;  // [1, 254]
  std::uint32_t mantissa = 0;         // 23 stored bits m_1..m_23

  int unbiased_exponent() const noexcept {
    return static_cast<int>(biased_exponent) - kExponentBias;
  }

  friend bool operator==(const FloatAnatomy&, const FloatAnatomy&) = default;
};

inline std::uint32_t to_bits(float v) noexcept { return std::bit_cast<std::uint32_t>(v); }
inline float from_bits(std::uint32_t w) noexcept { return std::bit_cast<float>(w); }

/// True for finite, normal, nonzero values.
bool is_supported(float v) noexcept;

/// Throws Error{unsupported_value} for 0.0, subnormals, infinities and NaN.
FloatAnatomy decompose(float v);
float compose(const FloatAnatomy& a);

/// Unbiased exponent of a supported value.
int unbiased_exponent(float v);

/// Spacing of consecutive binary32 values in the binade [2^e_u, 2^(e_u+1)).
double precision(int e_u) noexcept;

/// Zero bits at the least-significant end of the mantissa; 23 for an all-zero
/// mantissa.
int trailing_zero_count(float v);

/// Bit positions are numbered from the most significant end: 0 is the sign,
/// 1..8 the exponent and 9..31 the mantissa bits m_1..m_23.
struct BitProfile {
  std::array<bool, 32> agree{};
  int agreeing = 0;

  bool mantissa_agrees(int i) const { return agree.at(8 + i); }  // i in [1, 23]
  int mantissa_agreeing() const;
};

/// Which of the 32 bit positions hold the same value across all inputs.
BitProfile common_bit_profile(std::span<const float> values);

/// Adjacent representable value in the direction of the sign of `direction`
/// (+1 towards +inf, -1 towards -inf). Stepping out of the normal range is an
/// error.
float step_by_ulp(float v, int direction);

}  // namespace fpprep
