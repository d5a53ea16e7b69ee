#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace fpprep {

enum class BoundKind { absolute, relative };

const char* to_string(BoundKind kind) noexcept;
BoundKind bound_kind_from_string(const std::string& s);

/// Maximum tolerated recovery error. Relative limits are fractions (0.01 is
/// 1%). An infinite limit means "unbounded".
struct ErrorBound {
  BoundKind kind = BoundKind::absolute;
  double limit = 0.0;

  static ErrorBound absolute(double limit);
  static ErrorBound relative(double limit);
  static ErrorBound unbounded();

  /// Does a single recovered sample satisfy the bound? Under a relative bound a
  /// zero original has to come back exactly.
  bool admits(double original, double recovered) const noexcept;

  /// Whole-series check from the two maxima.
  bool admits_maxima(double max_abs, double max_rel) const noexcept;

  friend bool operator==(const ErrorBound&, const ErrorBound&) = default;
};

/// max_i |recovered_i - original_i|.
double max_abs_error(std::span<const float> original, std::span<const float> recovered);

/// max_i |(recovered_i - original_i) / original_i|. A zero original with a
/// nonzero recovered value yields +infinity.
double max_rel_error(std::span<const float> original, std::span<const float> recovered);

/// compressed / uncompressed.
double compression_ratio(std::uint64_t compressed_bytes, std::uint64_t uncompressed_bytes);

/// (cr - cr_np) / cr_np * 100; negative means better compression than the
/// baseline.
double delta_cr_percent(double cr, double cr_np);

struct CompressionReport {
  std::string compressor;
  std::uint64_t uncompressed_bytes = 0;
  std::uint64_t compressed_bytes = 0;
  double cr = 0.0;
  double cr_np = 0.0;
  double delta_cr_percent = 0.0;
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;
};

/// Fills cr and delta_cr_percent from the sizes and the baseline ratio.
CompressionReport make_report(std::string compressor, std::uint64_t compressed_bytes,
                              std::uint64_t uncompressed_bytes, double cr_np,
                              double max_abs, double max_rel);

}  // namespace fpprep
