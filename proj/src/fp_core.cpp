#include "fpprep/fp_core.hpp"

#include <cmath>
#include <string>

#include "fpprep/error.hpp"

namespace fpprep {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::unsupported_value: return "unsupported value class";
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::length_mismatch: return "length mismatch";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::unsupported_data: return "unsupported data";
    case ErrorCode::unadjustable: return "unadjustable";
    case ErrorCode::lossless_infeasible: return "lossless infeasible";
    case ErrorCode::corrupt_blob: return "corrupt blob";
    case ErrorCode::parse: return "parse error";
    case ErrorCode::config: return "configuration error";
    case ErrorCode::io: return "I/O error";
    case ErrorCode::bound_violation: return "bound violation";
    case ErrorCode::process: return "process failure";
  }
  return "unknown";
}

namespace {

std::uint32_t exponent_field(std::uint32_t w) { return (w >> kMantissaBits) & 0xffu; }

[[noreturn]] void reject(float v) {
  throw Error(ErrorCode::unsupported_value,
              "unsupported value class: " + std::to_string(v) +
                  " (only finite, normal, nonzero values have an anatomy)");
}

}  // namespace

bool is_supported(float v) noexcept {
  const auto e = exponent_field(to_bits(v));
  return e != 0 && e != 0xffu;
}

FloatAnatomy decompose(float v) {
  if (!is_supported(v)) reject(v);
  const auto w = to_bits(v);
  return {w >> 31, exponent_field(w), w & kMantissaMask};
}

float compose(const FloatAnatomy& a) {
  return from_bits((a.sign << 31) | (a.biased_exponent << kMantissaBits) |
                   (a.mantissa & kMantissaMask));
}

int unbiased_exponent(float v) { return decompose(v).unbiased_exponent(); }

double precision(int e_u) noexcept { return std::ldexp(1.0, e_u - kMantissaBits); }

int trailing_zero_count(float v) {
  const auto m = decompose(v).mantissa;
  if (m == 0) return kMantissaBits;
  return std::countr_zero(m);
}

int BitProfile::mantissa_agreeing() const {
  int n = 0;
  for (int i = 9; i < 32; ++i) n += agree[i] ? 1 : 0;
  return n;
}

BitProfile common_bit_profile(std::span<const float> values) {
  if (values.empty()) {
    throw Error(ErrorCode::invalid_argument, "common_bit_profile: empty input");
  }
  const auto first = to_bits(values.front());
  std::uint32_t differing = 0;
  for (float v : values) differing |= to_bits(v) ^ first;

  BitProfile p;
  for (int pos = 0; pos < 32; ++pos) {
    p.agree[pos] = ((differing >> (31 - pos)) & 1u) == 0;
    p.agreeing += p.agree[pos] ? 1 : 0;
  }
  return p;
}

float step_by_ulp(float v, int direction) {
  if (!is_supported(v)) reject(v);
  if (direction == 0) {
    throw Error(ErrorCode::invalid_argument, "step_by_ulp: direction must be +1 or -1");
  }
  const auto w = to_bits(v);
  const bool negative = (w >> 31) != 0;
  // Moving away from zero increments the magnitude bits.
  const bool away = (direction > 0) != negative;
  const auto stepped = from_bits(away ? w + 1 : w - 1);
  if (!is_supported(stepped)) {
    throw Error(ErrorCode::unsupported_value,
                "step_by_ulp: stepping " + std::to_string(v) + " leaves the normal range");
  }
  return stepped;
}

}  // namespace fpprep
