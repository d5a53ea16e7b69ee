#include "fpprep/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "fpprep/addition.hpp"
#include "fpprep/baselines.hpp"
#include "fpprep/error.hpp"
#include "fpprep/fp_core.hpp"
#include "fpprep/multiplication.hpp"
#include "fpprep/numeric_text.hpp"

namespace fpprep {

namespace {

std::vector<std::uint32_t> words_of(std::span<const float> values) {
  std::vector<std::uint32_t> w(values.size());
  std::transform(values.begin(), values.end(), w.begin(), [](float v) { return to_bits(v); });
  return w;
}

std::vector<float> floats_of(std::span<const std::uint32_t> words) {
  std::vector<float> v(words.size());
  std::transform(words.begin(), words.end(), v.begin(), [](std::uint32_t w) { return from_bits(w); });
  return v;
}

bool same_bits(std::span<const float> a, std::span<const float> b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                    [](float x, float y) { return to_bits(x) == to_bits(y); });
}

bool recoverable(const Error& e) {
  return e.code() == ErrorCode::infeasible || e.code() == ErrorCode::unsupported_data ||
         e.code() == ErrorCode::unadjustable;
}

void measure(TransformedColumn& c, std::span<const float> original) {
  auto& r = c.record;
  r.max_abs = max_abs_error(original, c.recovered);
  r.max_rel = max_rel_error(original, c.recovered);
  r.min_trailing_zeros = kMantissaBits;
  r.shared_exponent.reset();
  if (c.transformed.empty()) return;
  const std::uint32_t exponent = (to_bits(c.transformed.front()) >> kMantissaBits) & 0xffu;
  bool shared = exponent != 0 && exponent != 0xffu;
  for (float y : c.transformed) {
    const std::uint32_t w = to_bits(y);
    const std::uint32_t m = w & kMantissaMask;
    r.min_trailing_zeros = std::min(r.min_trailing_zeros, m == 0 ? kMantissaBits : std::countr_zero(m));
    shared = shared && ((w >> kMantissaBits) & 0xffu) == exponent;
  }
  if (shared) r.shared_exponent = static_cast<int>(exponent) - kExponentBias;
}

TransformedColumn lossless_or_identity(const ColumnSeries& s) {
  TransformedColumn c;
  try {
    const auto plan = select_scale(s.tokens);
    c.record.kind = TransformKind::lossless;
    c.record.power = plan.power;
    c.transformed = apply_scale(s.tokens, plan);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::lossless_infeasible && e.code() != ErrorCode::parse) throw;
    c.warnings.push_back(std::string("lossless scaling unavailable, column left untransformed: ") +
                         e.what());
    c.record.kind = TransformKind::none;
    c.transformed = s.values;
  }
  return c;
}

TransformedColumn apply_kind(const ColumnSeries& s, TransformKind kind, const ErrorBound& bound) {
  TransformedColumn c;
  c.record.kind = kind;
  switch (kind) {
    case TransformKind::none:
      c.transformed = s.values;
      break;
    case TransformKind::addition: {
      const auto plan = select_addition_parameter(s.values, bound);
      c.record.addition = plan.a;
      c.transformed = apply_addition(s.values, plan);
      break;
    }
    case TransformKind::multiplication: {
      const auto plan = select_multiplication_parameter(s.values, bound);
      c.record.multiplier = plan.m;
      c.transformed = apply_multiplication(s.values, plan);
      break;
    }
    case TransformKind::lossless:
      return lossless_or_identity(s);
    case TransformKind::automatic:
      throw Error(ErrorCode::invalid_argument, "apply_kind: automatic is not a concrete transform");
  }
  return c;
}

std::size_t compressed_size(const Backend& backend, std::span<const float> values) {
  return backend.compress(words_of(values), false).size();
}

TransformedColumn choose_automatic(const ColumnSeries& s, const PipelineConfig& config) {
  std::optional<TransformedColumn> candidates[2];
  std::vector<std::string> notes;
  const TransformKind kinds[2] = {TransformKind::addition, TransformKind::multiplication};
  for (int i = 0; i < 2; ++i) {
    try {
      candidates[i] = apply_kind(s, kinds[i], config.bound);
    } catch (const Error& e) {
      if (!recoverable(e)) throw;
      notes.push_back(std::string(to_string(kinds[i])) + " rejected: " + e.what());
    }
  }
  if (!candidates[0] && !candidates[1]) {
    throw Error(ErrorCode::infeasible, "no lossy transform satisfies the bound for column '" +
                                           s.name + "': " + notes[0] + "; " + notes[1]);
  }
  TransformedColumn chosen;
  if (candidates[0] && candidates[1]) {
    const Backend arbiter = config.compressors.empty() ? Backend::builtin() : config.compressors.front();
    const auto add = compressed_size(arbiter, candidates[0]->transformed);
    const auto mul = compressed_size(arbiter, candidates[1]->transformed);
    chosen = std::move(mul < add ? *candidates[1] : *candidates[0]);
  } else {
    chosen = std::move(candidates[0] ? *candidates[0] : *candidates[1]);
  }
  chosen.warnings.insert(chosen.warnings.end(), notes.begin(), notes.end());
  return chosen;
}

template <typename T, typename F>
std::vector<T> per_column(const std::vector<ColumnSeries>& series, F&& work) {
  std::vector<std::future<T>> jobs;
  jobs.reserve(series.size());
  for (const auto& s : series) jobs.push_back(std::async(std::launch::async, work, std::cref(s)));
  std::vector<T> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace

const char* to_string(TransformKind kind) noexcept {
  switch (kind) {
    case TransformKind::none: return "none";
    case TransformKind::addition: return "addition";
    case TransformKind::multiplication: return "multiplication";
    case TransformKind::lossless: return "lossless";
    case TransformKind::automatic: return "auto";
  }
  return "?";
}

TransformKind transform_kind_from_string(const std::string& s) {
  for (auto k : {TransformKind::none, TransformKind::addition, TransformKind::multiplication,
                 TransformKind::lossless, TransformKind::automatic}) {
    if (s == to_string(k)) return k;
  }
  throw Error(ErrorCode::config, "unknown transform '" + s + "'");
}

const char* to_string(Fallback fallback) noexcept {
  switch (fallback) {
    case Fallback::fail: return "fail";
    case Fallback::none: return "none";
    case Fallback::lossless: return "lossless";
  }
  return "?";
}

Fallback fallback_from_string(const std::string& s) {
  for (auto f : {Fallback::fail, Fallback::none, Fallback::lossless}) {
    if (s == to_string(f)) return f;
  }
  throw Error(ErrorCode::config, "unknown fallback '" + s + "'");
}

Backend Backend::builtin() {
  Backend b;
  b.descriptor_ = "builtin";
  return b;
}

Backend Backend::command(const std::string& command_line) {
  Backend b;
  b.spec_ = command_from_string(command_line);
  b.descriptor_ = "cmd:" + command_line;
  return b;
}

Backend Backend::parse(const std::string& descriptor) {
  if (descriptor == "builtin") return builtin();
  if (descriptor.rfind("cmd:", 0) == 0) return command(descriptor.substr(4));
  throw Error(ErrorCode::config,
              "unknown compressor '" + descriptor + "', expected builtin or cmd:<command>");
}

Bytes Backend::compress(std::span<const std::uint32_t> words, bool verify) const {
  if (spec_) return external_compress(words_to_bytes(words), *spec_, verify).blob;
  return gd_compress(words, words.empty() ? 32 : choose_base_bits(words));
}

std::vector<std::uint32_t> Backend::decompress(std::span<const std::uint8_t> blob) const {
  if (spec_) return bytes_to_words(external_decompress(blob, *spec_));
  return gd_decompress(blob);
}

std::vector<float> recover_values(const TransformRecord& record, std::span<const float> transformed) {
  switch (record.kind) {
    case TransformKind::none:
      return {transformed.begin(), transformed.end()};
    case TransformKind::addition:
      return invert_addition(transformed, AdditionPlan{record.addition, 0, 0.0});
    case TransformKind::multiplication:
      return invert_multiplication(transformed, record.multiplier);
    case TransformKind::lossless: {
      std::vector<float> out;
      out.reserve(transformed.size());
      for (const auto& t : recover_text(record, transformed)) out.push_back(parse_float(t));
      return out;
    }
    case TransformKind::automatic:
      break;
  }
  throw Error(ErrorCode::invalid_argument, "record for '" + record.column + "' has no concrete transform");
}

std::vector<std::string> recover_text(const TransformRecord& record,
                                      std::span<const float> transformed) {
  if (record.kind == TransformKind::lossless) {
    return invert_scale(transformed, ScalePlan{record.power, true});
  }
  std::vector<std::string> out;
  out.reserve(transformed.size());
  for (float v : recover_values(record, transformed)) out.push_back(format_float(v));
  return out;
}

void verify_bound(const std::string& column, const ErrorBound& bound,
                  std::span<const float> original, std::span<const float> recovered) {
  if (original.size() != recovered.size()) {
    throw Error(ErrorCode::length_mismatch, "column '" + column + "': " +
                                                std::to_string(original.size()) + " originals, " +
                                                std::to_string(recovered.size()) + " recovered");
  }
  for (std::size_t i = 0; i < original.size(); ++i) {
    if (!bound.admits(original[i], recovered[i])) {
      throw Error(ErrorCode::bound_violation,
                  "column '" + column + "', row " + std::to_string(i) + ": original " +
                      format_float(original[i]) + " recovered as " + format_float(recovered[i]) +
                      " breaks the " + to_string(bound.kind) + " bound " +
                      std::to_string(bound.limit));
    }
  }
}

TransformedColumn transform_column(const ColumnSeries& series, const PipelineConfig& config) {
  TransformedColumn c;
  try {
    c = config.transform == TransformKind::automatic ? choose_automatic(series, config)
                                                     : apply_kind(series, config.transform, config.bound);
  } catch (const Error& e) {
    if (!recoverable(e) || config.fallback == Fallback::fail) throw;
    const std::string why = e.what();
    c = config.fallback == Fallback::lossless ? lossless_or_identity(series)
                                              : apply_kind(series, TransformKind::none, config.bound);
    c.warnings.insert(c.warnings.begin(), "falling back to " + std::string(to_string(config.fallback)) +
                                              ": " + why);
  }
  c.record.column = series.name;
  c.record.bound = config.bound;
  c.recovered = recover_values(c.record, c.transformed);
  verify_bound(series.name, config.bound, series.values, c.recovered);
  measure(c, series.values);
  return c;
}

PipelineResult run_pipeline(const std::vector<ColumnSeries>& series, const PipelineConfig& config) {
  if (config.compressors.empty()) throw Error(ErrorCode::config, "no compressor configured");

  auto run_column = [&config](const ColumnSeries& s) {
    ColumnResult out;
    out.column = transform_column(s, config);
    out.rows = s.values.size();
    const auto original = words_of(s.values);
    const auto transformed = words_of(out.column.transformed);
    const std::uint64_t raw = transformed.size() * 4;
    for (const auto& backend : config.compressors) {
      const auto baseline = backend.compress(original, config.verify_external);
      const auto blob = backend.compress(transformed, config.verify_external);
      const auto back = backend.decompress(blob);
      if (back != transformed) {
        throw Error(ErrorCode::process, backend.descriptor() + " did not reproduce column '" +
                                            s.name + "' bit-exactly");
      }
      const auto recovered = recover_values(out.column.record, floats_of(back));
      if (!same_bits(recovered, out.column.recovered)) {
        throw Error(ErrorCode::process, "recovery after " + backend.descriptor() +
                                            " differs from in-memory recovery for '" + s.name + "'");
      }
      verify_bound(s.name, config.bound, s.values, recovered);
      const double cr_np = raw == 0 ? 1.0 : compression_ratio(baseline.size(), raw);
      auto report = make_report(backend.descriptor(), blob.size(), raw, cr_np,
                                max_abs_error(s.values, recovered),
                                max_rel_error(s.values, recovered));
      out.reports.push_back(report);
    }
    return out;
  };

  PipelineResult result;
  result.columns = per_column<ColumnResult>(series, run_column);

  for (std::size_t b = 0; b < config.compressors.size(); ++b) {
    std::uint64_t raw = 0;
    std::uint64_t packed = 0;
    double baseline = 0.0;
    double max_abs = 0.0;
    double max_rel = 0.0;
    for (const auto& c : result.columns) {
      const auto& r = c.reports[b];
      raw += r.uncompressed_bytes;
      packed += r.compressed_bytes;
      baseline += r.cr_np * static_cast<double>(r.uncompressed_bytes);
      max_abs = std::max(max_abs, r.max_abs_error);
      max_rel = std::max(max_rel, r.max_rel_error);
    }
    const double cr_np = raw == 0 ? 1.0 : baseline / static_cast<double>(raw);
    result.global.push_back(
        make_report(config.compressors[b].descriptor(), packed, raw, cr_np, max_abs, max_rel));
  }
  for (const auto& c : result.columns) {
    result.max_abs = std::max(result.max_abs, c.column.record.max_abs);
    result.max_rel = std::max(result.max_rel, c.column.record.max_rel);
  }
  return result;
}

}  // namespace fpprep
