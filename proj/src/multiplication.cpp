#include "fpprep/multiplication.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "fpprep/error.hpp"
#include "fpprep/fp_core.hpp"

namespace fpprep {

namespace {

void require_multiplier(int m) {
  if (m < kMinMultiplier || m > kMaxMultiplier || m % 2 == 0) {
    throw Error(ErrorCode::invalid_argument,
                "multiplier must be odd and in [3, 61], got " + std::to_string(m));
  }
}

int multiplicative_order_of_two(int m) {
  int order = 1;
  int r = 2 % m;
  while (r != 1) {
    r = (r * 2) % m;
    ++order;
  }
  return order;
}

std::uint64_t low_mask(int bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

// Round to 24 significant bits, ties to even. Result has bit 23 set.
std::uint64_t round_to_24_bits(std::uint64_t p) {
  const int width = std::bit_width(p);
  if (width <= 24) return p << (24 - width);
  const int shift = width - 24;
  std::uint64_t q = p >> shift;
  const std::uint64_t rest = p & low_mask(shift);
  const std::uint64_t half = std::uint64_t{1} << (shift - 1);
  if (rest > half || (rest == half && (q & 1u))) ++q;
  if (q >> 24) q >>= 1;
  return q;
}

int significand_zeros(std::uint64_t sig24) {
  const auto mantissa = static_cast<std::uint32_t>(sig24 & kMantissaMask);
  return mantissa == 0 ? kMantissaBits : std::countr_zero(mantissa);
}

// multiply_and_check without the throw; nullopt means unadjustable.
std::optional<float> adjust_product(float y, int m, int required_zeros) {
  if (!is_supported(y)) return std::nullopt;
  if (trailing_zero_count(y) >= required_zeros) return y;
  const float mf = static_cast<float>(m);
  std::optional<float> best;
  for (int dir : {-1, +1}) {
    const auto w = to_bits(y);
    const bool away = (dir > 0) != ((w >> 31) != 0);
    const float cand = from_bits(away ? w + 1 : w - 1);
    if (!is_supported(cand) || trailing_zero_count(cand) < required_zeros) continue;
    const float back = cand / mf;
    if (!is_supported(back) || back * mf != cand) continue;
    if (!best || trailing_zero_count(cand) > trailing_zero_count(*best)) best = cand;
  }
  return best;
}

double allowed_deviation(double magnitude, const ErrorBound& bound) {
  if (std::isinf(bound.limit)) return std::numeric_limits<double>::infinity();
  return bound.kind == BoundKind::absolute ? bound.limit : bound.limit * magnitude;
}

Substitution zero_substitution() {
  return Substitution{0.0f, 0.0f, 0.0f, kMantissaBits, 0.0, 0.0, 0};
}

// Candidates that target a run of exactly `zeros` trailing zeros in the
// product, for product exponents E(x*m) - 1 .. E(x*m) + 1.
//
// For product exponent e the product must be a multiple of 2^q with
// q = e - 23 + zeros. The bits of |x| at or above 2^q are kept (`high`), the
// rest is replaced by c/m * 2^q, i.e. a repeating block of c/m rounded at the
// last mantissa bit. The intended product is therefore n * 2^q with
// n = high * m + c. `visit` receives each closed, bound-compliant result.
template <typename Visit>
void for_each_at_level(float x, int m, const ErrorBound& bound, int zeros, Visit&& visit) {
  const bool negative = std::signbit(x);
  const float a = std::fabs(x);
  const float mf = static_cast<float>(m);
  const float rough = a * mf;
  if (!is_supported(rough)) return;
  const int ey_mid = unbiased_exponent(rough);
  const double deviation = allowed_deviation(a, bound);

  for (int ey = ey_mid - 1; ey <= ey_mid + 1; ++ey) {
    if (ey < -126 || ey > 127) continue;
    const int q = ey - kMantissaBits + zeros;
    const double scaled = std::ldexp(static_cast<double>(a), -q);
    const double high = std::floor(scaled);
    // When x has no bits below 2^q it already qualifies (c = 0).
    double lo = high * m + (scaled == high ? 0 : 1);
    double hi = high * m + (m - 1);
    if (std::isfinite(deviation)) {
      const double centre = scaled * m;
      const double reach = std::ldexp(deviation, -q) * m;
      lo = std::max(lo, std::ceil(centre - reach) - 2);
      hi = std::min(hi, std::floor(centre + reach) + 2);
    }
    for (double n = lo; n <= hi; n += 1.0) {
      if (n <= 0.0 || n >= 16777216.0) continue;  // n * 2^q must be exact in binary32
      const float target = static_cast<float>(std::ldexp(n, q));
      if (!is_supported(target)) continue;
      const float patched = target / mf;
      if (!is_supported(patched)) continue;
      const auto y = adjust_product(patched * mf, m, zeros);
      if (!y) continue;
      const float sub = *y / mf;
      if (!is_supported(sub) || sub * mf != *y) continue;
      if (!bound.admits(a, sub)) continue;

      const double delta = std::fabs(static_cast<double>(sub) - static_cast<double>(a));
      Substitution s;
      s.original = x;
      s.substituted = negative ? -sub : sub;
      s.product = negative ? -*y : *y;
      s.trailing_zeros = trailing_zero_count(*y);
      s.abs_error = delta;
      s.rel_error = delta / static_cast<double>(a);
      s.bit_distance = std::popcount(to_bits(s.substituted) ^ to_bits(x));
      visit(s);
    }
  }
}

bool ranks_before(const Substitution& l, const Substitution& r) {
  if (l.trailing_zeros != r.trailing_zeros) return l.trailing_zeros > r.trailing_zeros;
  if (l.abs_error != r.abs_error) return l.abs_error < r.abs_error;
  if (l.bit_distance != r.bit_distance) return l.bit_distance < r.bit_distance;
  return std::fabs(l.substituted) < std::fabs(r.substituted);
}

// Preference once a zero requirement is met.
bool cheaper(const Substitution& l, const Substitution& r) {
  if (l.abs_error != r.abs_error) return l.abs_error < r.abs_error;
  if (l.trailing_zeros != r.trailing_zeros) return l.trailing_zeros > r.trailing_zeros;
  if (l.bit_distance != r.bit_distance) return l.bit_distance < r.bit_distance;
  return std::fabs(l.substituted) < std::fabs(r.substituted);
}

void require_sample(float x) {
  if (x != 0.0f && !is_supported(x)) {
    throw Error(ErrorCode::unsupported_data,
                "multiplication transform: sample " + std::to_string(x) +
                    " is not zero or a finite normal value");
  }
}

// Most trailing zeros any substitution of x reaches: the first productive
// level scanning down from 23, and the best product found there.
std::optional<int> reachable_zeros(float x, int m, const ErrorBound& bound) {
  if (x == 0.0f) return kMantissaBits;
  for (int z = kMantissaBits; z >= 1; --z) {
    int best = -1;
    for_each_at_level(x, m, bound, z,
                      [&](const Substitution& s) { best = std::max(best, s.trailing_zeros); });
    if (best >= 0) return best;
  }
  return std::nullopt;
}

std::optional<Substitution> cheapest_with(float x, int m, const ErrorBound& bound,
                                          int min_zeros) {
  if (x == 0.0f) return zero_substitution();
  std::optional<Substitution> best;
  // A product can overshoot its target level, so keep going below min_zeros
  // until something qualifies.
  for (int z = kMantissaBits; z >= 1; --z) {
    for_each_at_level(x, m, bound, z, [&](const Substitution& s) {
      if (s.trailing_zeros < min_zeros) return;
      if (!best || cheaper(s, *best)) best = s;
    });
    if (z <= min_zeros && best) break;
  }
  return best;
}

float canonical_zero(float v) { return v == 0.0f ? 0.0f : v; }

// Distinct sample values in first-seen order plus each sample's slot.
struct DistinctSamples {
  std::vector<float> values;
  std::vector<std::size_t> slot;
};

DistinctSamples distinct_samples(std::span<const float> data) {
  DistinctSamples d;
  d.slot.reserve(data.size());
  std::unordered_map<std::uint32_t, std::size_t> index;
  for (float raw : data) {
    const float v = canonical_zero(raw);
    require_sample(v);
    auto [it, inserted] = index.try_emplace(to_bits(v), d.values.size());
    if (inserted) d.values.push_back(v);
    d.slot.push_back(it->second);
  }
  return d;
}

// Smallest reachable-zeros value over all samples, or nullopt if some sample
// has no substitution. Stops early once the score cannot beat `to_beat`.
std::optional<int> score_multiplier(const std::vector<float>& values, int m,
                                    const ErrorBound& bound, int to_beat) {
  int score = kMantissaBits;
  for (float v : values) {
    const auto z = reachable_zeros(v, m, bound);
    if (!z) return std::nullopt;
    score = std::min(score, *z);
    if (score <= to_beat) return std::nullopt;
  }
  return score;
}

MultiplicationPlan assemble(const DistinctSamples& d, int m, int score,
                            const ErrorBound& bound) {
  std::vector<Substitution> chosen;
  chosen.reserve(d.values.size());
  for (float v : d.values) {
    auto s = cheapest_with(v, m, bound, score);
    if (!s) {
      throw Error(ErrorCode::infeasible, "multiplication transform: sample " + std::to_string(v) +
                                             " lost its substitution for m = " +
                                             std::to_string(m));
    }
    chosen.push_back(*s);
  }
  MultiplicationPlan plan;
  plan.m = m;
  plan.min_common_zeros = kMantissaBits;
  plan.per_sample.reserve(d.slot.size());
  for (std::size_t slot : d.slot) {
    plan.per_sample.push_back(chosen[slot]);
    plan.min_common_zeros = std::min(plan.min_common_zeros, chosen[slot].trailing_zeros);
  }
  return plan;
}

}  // namespace

std::uint64_t rotate_bits(std::uint64_t value, int length, int k) {
  k %= length;
  if (k == 0) return value;
  const auto mask = low_mask(length);
  return ((value << k) | (value >> (length - k))) & mask;
}

std::string Pattern::block_bits() const {
  std::string s(static_cast<std::size_t>(length), '0');
  for (int i = 0; i < length; ++i) {
    if ((block >> (length - 1 - i)) & 1u) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

std::string Pattern::canonical_hex() const {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(canonical));
  return buf;
}

Pattern pattern_for(int m) {
  require_multiplier(m);
  Pattern p;
  p.m = m;
  p.length = multiplicative_order_of_two(m);
  p.block = low_mask(p.length) / static_cast<std::uint64_t>(m);
  const int leading = p.length - std::bit_width(p.block);
  p.canonical = rotate_bits(p.block, p.length, leading);
  return p;
}

bool verify_pattern(int m, std::string_view pattern) {
  if (m < kMinMultiplier || m % 2 == 0) {
    throw Error(ErrorCode::invalid_argument, "verify_pattern: m must be odd and >= 3");
  }
  if (pattern.empty() || pattern.size() > 60) {
    throw Error(ErrorCode::invalid_argument, "verify_pattern: pattern must have 1..60 bits");
  }
  if (pattern.find_first_not_of("01") != std::string_view::npos) {
    throw Error(ErrorCode::invalid_argument, "verify_pattern: pattern must be a bit string");
  }
  if (pattern.find('0') == std::string_view::npos || pattern.find('1') == std::string_view::npos) {
    return false;
  }
  const int length = static_cast<int>(pattern.size());
  const int required = 24 - std::bit_width(static_cast<unsigned>(m));
  auto bit = [&](int i) { return pattern[static_cast<std::size_t>(i % length)] == '1'; };

  for (int offset = 0; offset < length; ++offset) {
    if (!bit(offset)) continue;
    std::uint64_t sig = 0;
    for (int i = 0; i < 24; ++i) sig = (sig << 1) | (bit(offset + i) ? 1u : 0u);
    // The periodic tail is never exactly one half, so its first bit decides.
    if (bit(offset + 24)) ++sig;
    if (sig >> 24) sig >>= 1;

    const std::uint64_t r = round_to_24_bits(sig * static_cast<std::uint64_t>(m));
    int zeros = significand_zeros(r);
    const std::uint64_t up = r + 1;
    zeros = std::max(zeros, (up >> 24) ? kMantissaBits : significand_zeros(up));
    if (r != (std::uint64_t{1} << 23)) zeros = std::max(zeros, significand_zeros(r - 1));
    if (zeros < required) return false;
  }
  return true;
}

std::vector<Substitution> enumerate_substitutions(float x, int m, const ErrorBound& bound) {
  require_multiplier(m);
  x = canonical_zero(x);
  require_sample(x);
  if (x == 0.0f) return {zero_substitution()};

  std::vector<Substitution> all;
  for (int z = kMantissaBits; z >= 1; --z) {
    for_each_at_level(x, m, bound, z, [&](const Substitution& s) { all.push_back(s); });
  }
  std::sort(all.begin(), all.end(), ranks_before);
  // Identical x^ implies identical y (closure), so one entry per x^ survives.
  std::vector<Substitution> unique;
  std::unordered_set<std::uint32_t> seen;
  for (const auto& s : all) {
    if (seen.insert(to_bits(s.substituted)).second) unique.push_back(s);
  }
  return unique;
}

float multiply_and_check(float y, int m, int required_zeros) {
  require_multiplier(m);
  if (y == 0.0f) return y;
  const auto adjusted = adjust_product(y, m, required_zeros);
  if (!adjusted) {
    throw Error(ErrorCode::unadjustable,
                "multiply_and_check: neither neighbour of " + std::to_string(y) + " has " +
                    std::to_string(required_zeros) + " trailing zeros with a closed round trip");
  }
  return *adjusted;
}

MultiplicationPlan select_multiplication_parameter(std::span<const float> data,
                                                   const ErrorBound& bound) {
  if (data.empty()) throw Error(ErrorCode::invalid_argument, "multiplication transform: empty data");
  const auto d = distinct_samples(data);

  int best_m = 0;
  int best_score = -1;
  for (int m = kMinMultiplier; m <= kMaxMultiplier; m += 2) {
    const auto score = score_multiplier(d.values, m, bound, best_score);
    if (score && *score > best_score) {
      best_score = *score;
      best_m = m;
    }
    if (best_score == kMantissaBits) break;
  }
  if (best_m == 0) {
    throw Error(ErrorCode::infeasible,
                "multiplication transform: no multiplier in [3, 61] covers every sample "
                "within the error bound");
  }
  return assemble(d, best_m, best_score, bound);
}

MultiplicationPlan multiplication_plan_for(std::span<const float> data, int m,
                                           const ErrorBound& bound) {
  require_multiplier(m);
  if (data.empty()) throw Error(ErrorCode::invalid_argument, "multiplication transform: empty data");
  const auto d = distinct_samples(data);
  const auto score = score_multiplier(d.values, m, bound, -1);
  if (!score) {
    throw Error(ErrorCode::infeasible, "multiplication transform: m = " + std::to_string(m) +
                                           " does not cover every sample within the error bound");
  }
  return assemble(d, m, *score, bound);
}

std::vector<float> apply_multiplication(std::span<const float> data,
                                        const MultiplicationPlan& plan) {
  if (data.size() != plan.per_sample.size()) {
    throw Error(ErrorCode::invalid_argument,
                "apply_multiplication: plan covers " + std::to_string(plan.per_sample.size()) +
                    " samples, data has " + std::to_string(data.size()));
  }
  std::vector<float> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& s = plan.per_sample[i];
    if (to_bits(canonical_zero(data[i])) != to_bits(canonical_zero(s.original))) {
      throw Error(ErrorCode::invalid_argument,
                  "apply_multiplication: sample " + std::to_string(i) + " is missing from the plan");
    }
    out.push_back(s.product);
  }
  return out;
}

std::vector<float> invert_multiplication(std::span<const float> transformed, int m) {
  require_multiplier(m);
  const float mf = static_cast<float>(m);
  std::vector<float> out;
  out.reserve(transformed.size());
  for (float y : transformed) out.push_back(canonical_zero(y / mf));
  return out;
}

}  // namespace fpprep
