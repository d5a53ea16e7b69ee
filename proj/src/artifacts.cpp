#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "fpprep/error.hpp"
#include "fpprep/fp_core.hpp"
#include "fpprep/pipeline.hpp"

namespace fpprep {

using nlohmann::ordered_json;

namespace {

constexpr std::uint8_t kArtifactVersion = 1;

class Writer {
 public:
  template <typename T>
  void le(T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void magic(const char* m) { out.insert(out.end(), m, m + 4); }
  void name(const std::string& s) {
    if (s.size() > 0xffff) throw Error(ErrorCode::invalid_argument, "name too long: " + s);
    le<std::uint16_t>(static_cast<std::uint16_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
  }
  void raw(std::span<const std::uint8_t> b) { out.insert(out.end(), b.begin(), b.end()); }

  Bytes out;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> in, const char* what) : in_(in), what_(what) {}

  template <typename T>
  T le() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(in_[pos_ + i]) << (8 * i);
    pos_ += sizeof(T);
    return v;
  }
  void magic(const char* m) {
    need(4);
    if (std::memcmp(in_.data(), m, 4) != 0) fail("bad magic");
    pos_ += 4;
    if (le<std::uint8_t>() != kArtifactVersion) fail("unsupported version");
  }
  std::string name() {
    const auto n = le<std::uint16_t>();
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::span<const std::uint8_t> raw(std::uint64_t n) {
    need(n);
    auto s = in_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  void finish() {
    if (pos_ != in_.size()) fail("trailing bytes");
  }
  [[noreturn]] void fail(const std::string& why) {
    throw Error(ErrorCode::corrupt_blob, std::string(what_) + ": " + why);
  }

 private:
  void need(std::uint64_t n) {
    if (n > in_.size() - pos_) fail("truncated");
  }

  std::span<const std::uint8_t> in_;
  const char* what_;
  std::size_t pos_ = 0;
};

ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

double number_from(const ordered_json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

ordered_json bound_json(const ErrorBound& b) {
  return {{"kind", to_string(b.kind)}, {"limit", number(b.limit)}};
}

ordered_json parameter_json(const TransformRecord& r) {
  switch (r.kind) {
    case TransformKind::addition: return encode_addition(r.addition);
    case TransformKind::multiplication: return r.multiplier;
    case TransformKind::lossless: return r.power;
    default: return nullptr;
  }
}

ordered_json achieved_json(const TransformRecord& r) {
  return {{"max_abs", number(r.max_abs)},
          {"max_rel", number(r.max_rel)},
          {"min_trailing_zeros", r.min_trailing_zeros},
          {"shared_exponent", r.shared_exponent ? ordered_json(*r.shared_exponent) : nullptr}};
}

ordered_json report_json(const CompressionReport& r) {
  return {{"compressor", r.compressor},
          {"uncompressed_bytes", r.uncompressed_bytes},
          {"compressed_bytes", r.compressed_bytes},
          {"cr", number(r.cr)},
          {"cr_np", number(r.cr_np)},
          {"delta_cr_percent", number(r.delta_cr_percent)},
          {"max_abs_error", number(r.max_abs_error)},
          {"max_rel_error", number(r.max_rel_error)}};
}

ordered_json config_json(const PipelineConfig& config) {
  ordered_json backends = ordered_json::array();
  for (const auto& b : config.compressors) backends.push_back(b.descriptor());
  return {{"transform", to_string(config.transform)},
          {"bound", bound_json(config.bound)},
          {"fallback", to_string(config.fallback)},
          {"compressors", backends}};
}

ordered_json column_json(const TransformedColumn& c) {
  ordered_json warnings = ordered_json::array();
  for (const auto& w : c.warnings) warnings.push_back(w);
  return {{"name", c.record.column},
          {"rows", c.transformed.size()},
          {"transform", to_string(c.record.kind)},
          {"parameter", parameter_json(c.record)},
          {"achieved", achieved_json(c.record)},
          {"warnings", warnings}};
}

std::string dump(ordered_json doc, const ReportOptions& options) {
  if (options.elapsed_seconds) doc["timing"] = {{"elapsed_seconds", *options.elapsed_seconds}};
  return doc.dump(2) + "\n";
}

}  // namespace

std::string encode_addition(float a) {
  char buf[9];
  std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(to_bits(a)));
  return buf;
}

float decode_addition(const std::string& hex) {
  if (hex.size() != 8 || hex.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos) {
    throw Error(ErrorCode::parse, "addition parameter must be 8 hex digits, got '" + hex + "'");
  }
  return from_bits(static_cast<std::uint32_t>(std::stoul(hex, nullptr, 16)));
}

Bytes encode_transformed(const std::vector<NamedWords>& columns) {
  if (columns.size() > 0xffff) throw Error(ErrorCode::invalid_argument, "too many columns");
  Writer w;
  w.magic("FPTX");
  w.le<std::uint8_t>(kArtifactVersion);
  w.le<std::uint16_t>(static_cast<std::uint16_t>(columns.size()));
  for (const auto& c : columns) {
    w.name(c.name);
    w.le<std::uint64_t>(c.words.size());
    for (std::uint32_t word : c.words) w.le(word);
  }
  return std::move(w.out);
}

std::vector<NamedWords> decode_transformed(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, "transformed file");
  r.magic("FPTX");
  std::vector<NamedWords> columns(r.le<std::uint16_t>());
  for (auto& c : columns) {
    c.name = r.name();
    const auto rows = r.le<std::uint64_t>();
    if (rows > bytes.size() / 4) r.fail("row count exceeds file size");
    c.words = bytes_to_words(r.raw(rows * 4));
  }
  r.finish();
  return columns;
}

Bytes encode_container(const CompressedContainer& container) {
  if (container.columns.size() > 0xffff) throw Error(ErrorCode::invalid_argument, "too many columns");
  Writer w;
  w.magic("FPTC");
  w.le<std::uint8_t>(kArtifactVersion);
  w.name(container.backend);
  w.le<std::uint16_t>(static_cast<std::uint16_t>(container.columns.size()));
  for (const auto& c : container.columns) {
    w.name(c.name);
    w.le<std::uint64_t>(c.rows);
    w.le<std::uint64_t>(c.blob.size());
    w.raw(c.blob);
  }
  return std::move(w.out);
}

CompressedContainer decode_container(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, "compressed file");
  r.magic("FPTC");
  CompressedContainer container;
  container.backend = r.name();
  container.columns.resize(r.le<std::uint16_t>());
  for (auto& c : container.columns) {
    c.name = r.name();
    c.rows = r.le<std::uint64_t>();
    const auto blob = r.raw(r.le<std::uint64_t>());
    c.blob.assign(blob.begin(), blob.end());
  }
  r.finish();
  return container;
}

std::string metadata_to_json(const std::vector<TransformRecord>& records) {
  ordered_json columns = ordered_json::array();
  for (const auto& r : records) {
    columns.push_back({{"name", r.column},
                       {"transform", to_string(r.kind)},
                       {"parameter", parameter_json(r)},
                       {"bound", bound_json(r.bound)},
                       {"achieved", achieved_json(r)}});
  }
  return ordered_json{{"version", 1}, {"columns", columns}}.dump(2) + "\n";
}

std::vector<TransformRecord> metadata_from_json(const std::string& text) {
  std::vector<TransformRecord> records;
  try {
    const auto doc = ordered_json::parse(text);
    if (doc.at("version").get<int>() != 1) {
      throw Error(ErrorCode::parse, "unsupported metadata version");
    }
    for (const auto& c : doc.at("columns")) {
      TransformRecord r;
      r.column = c.at("name").get<std::string>();
      r.kind = transform_kind_from_string(c.at("transform").get<std::string>());
      if (r.kind == TransformKind::automatic) {
        throw Error(ErrorCode::parse, "metadata must record the transform that was applied");
      }
      const auto& p = c.at("parameter");
      switch (r.kind) {
        case TransformKind::addition: r.addition = decode_addition(p.get<std::string>()); break;
        case TransformKind::multiplication: r.multiplier = p.get<int>(); break;
        case TransformKind::lossless: r.power = p.get<int>(); break;
        default: break;
      }
      const auto& b = c.at("bound");
      r.bound.kind = bound_kind_from_string(b.at("kind").get<std::string>());
      r.bound.limit = number_from(b.at("limit"));
      const auto& a = c.at("achieved");
      r.max_abs = number_from(a.at("max_abs"));
      r.max_rel = number_from(a.at("max_rel"));
      r.min_trailing_zeros = a.at("min_trailing_zeros").get<int>();
      if (!a.at("shared_exponent").is_null()) r.shared_exponent = a.at("shared_exponent").get<int>();
      records.push_back(std::move(r));
    }
  } catch (const ordered_json::exception& e) {
    throw Error(ErrorCode::parse, std::string("malformed metadata: ") + e.what());
  }
  return records;
}

std::string report_to_json(const PipelineResult& result, const PipelineConfig& config,
                           const ReportOptions& options) {
  ordered_json columns = ordered_json::array();
  for (const auto& c : result.columns) {
    auto col = column_json(c.column);
    ordered_json reports = ordered_json::array();
    for (const auto& r : c.reports) reports.push_back(report_json(r));
    col["compressors"] = reports;
    columns.push_back(col);
  }
  ordered_json global = ordered_json::array();
  for (const auto& r : result.global) global.push_back(report_json(r));
  ordered_json doc = {{"version", 1},
                      {"config", config_json(config)},
                      {"columns", columns},
                      {"global",
                       {{"max_abs_error", number(result.max_abs)},
                        {"max_rel_error", number(result.max_rel)},
                        {"compressors", global}}}};
  return dump(std::move(doc), options);
}

std::string transform_report_to_json(const std::vector<TransformedColumn>& columns,
                                     const PipelineConfig& config, const ReportOptions& options) {
  ordered_json cols = ordered_json::array();
  double max_abs = 0.0;
  double max_rel = 0.0;
  for (const auto& c : columns) {
    cols.push_back(column_json(c));
    max_abs = std::max(max_abs, c.record.max_abs);
    max_rel = std::max(max_rel, c.record.max_rel);
  }
  ordered_json doc = {{"version", 1},
                      {"config", config_json(config)},
                      {"columns", cols},
                      {"global",
                       {{"max_abs_error", number(max_abs)},
                        {"max_rel_error", number(max_rel)},
                        {"compressors", ordered_json::array()}}}};
  return dump(std::move(doc), options);
}

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path + "'");
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::io, "read error on '" + path + "'");
  return bytes;
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot create '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::io, "write error on '" + path + "'");
}

void write_text(const std::string& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace fpprep
