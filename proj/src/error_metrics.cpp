#include "fpprep/error_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fpprep/error.hpp"

namespace fpprep {

const char* to_string(BoundKind kind) noexcept {
  return kind == BoundKind::absolute ? "absolute" : "relative";
}

BoundKind bound_kind_from_string(const std::string& s) {
  if (s == "absolute") return BoundKind::absolute;
  if (s == "relative") return BoundKind::relative;
  throw Error(ErrorCode::config, "unknown bound kind '" + s + "'");
}

namespace {

ErrorBound checked(BoundKind kind, double limit) {
  if (!(limit > 0.0)) {
    throw Error(ErrorCode::config, "error bound limit must be positive");
  }
  return {kind, limit};
}

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::length_mismatch,
                "series lengths differ: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

}  // namespace

ErrorBound ErrorBound::absolute(double limit) { return checked(BoundKind::absolute, limit); }
ErrorBound ErrorBound::relative(double limit) { return checked(BoundKind::relative, limit); }
ErrorBound ErrorBound::unbounded() {
  return {BoundKind::absolute, std::numeric_limits<double>::infinity()};
}

bool ErrorBound::admits(double original, double recovered) const noexcept {
  const double delta = std::fabs(recovered - original);
  if (kind == BoundKind::absolute) return delta <= limit;
  if (original == 0.0) return delta == 0.0;
  return delta / std::fabs(original) <= limit;
}

bool ErrorBound::admits_maxima(double max_abs, double max_rel) const noexcept {
  return kind == BoundKind::absolute ? max_abs <= limit : max_rel <= limit;
}

double max_abs_error(std::span<const float> original, std::span<const float> recovered) {
  require_same_length(original.size(), recovered.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    // binary32 differences are exact in binary64 unless the exponents are far
    // apart, in which case the rounding is far below the error itself.
    const double d = std::fabs(static_cast<double>(recovered[i]) - static_cast<double>(original[i]));
    worst = std::max(worst, d);
  }
  return worst;
}

double max_rel_error(std::span<const float> original, std::span<const float> recovered) {
  require_same_length(original.size(), recovered.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    const double x = original[i];
    const double d = std::fabs(static_cast<double>(recovered[i]) - x);
    if (x == 0.0) {
      if (d != 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    worst = std::max(worst, d / std::fabs(x));
  }
  return worst;
}

double compression_ratio(std::uint64_t compressed_bytes, std::uint64_t uncompressed_bytes) {
  if (uncompressed_bytes == 0) {
    throw Error(ErrorCode::invalid_argument, "compression_ratio: zero uncompressed size");
  }
  return static_cast<double>(compressed_bytes) / static_cast<double>(uncompressed_bytes);
}

double delta_cr_percent(double cr, double cr_np) {
  if (!(cr_np > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "delta_cr_percent: baseline ratio must be positive");
  }
  return (cr - cr_np) / cr_np * 100.0;
}

CompressionReport make_report(std::string compressor, std::uint64_t compressed_bytes,
                              std::uint64_t uncompressed_bytes, double cr_np,
                              double max_abs, double max_rel) {
  CompressionReport r;
  r.compressor = std::move(compressor);
  r.uncompressed_bytes = uncompressed_bytes;
  r.compressed_bytes = compressed_bytes;
  r.cr = compression_ratio(compressed_bytes, uncompressed_bytes);
  r.cr_np = cr_np;
  r.delta_cr_percent = delta_cr_percent(r.cr, cr_np);
  r.max_abs_error = max_abs;
  r.max_rel_error = max_rel;
  return r;
}

}  // namespace fpprep
