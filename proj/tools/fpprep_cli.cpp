#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fpprep/error.hpp"
#include "fpprep/fp_core.hpp"
#include "fpprep/pipeline.hpp"

using namespace fpprep;

namespace {

struct Options {
  std::string input;
  std::string output;
  std::string metadata;
  std::string report;
  std::string original;
  std::optional<double> bound_abs;
  std::optional<std::string> bound_rel;
  std::string transform = "auto";
  std::string fallback = "fail";
  std::vector<std::string> compressors;
  std::vector<std::string> columns;
  bool timing = false;
};

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::bound_violation: return 2;
    case ErrorCode::config: return 3;
    case ErrorCode::io: return 4;
    default: return 1;
  }
}

ErrorBound bound_from(const Options& o) {
  if (o.bound_abs.has_value() == o.bound_rel.has_value()) {
    throw Error(ErrorCode::config, "give exactly one of --bound-abs and --bound-rel");
  }
  if (o.bound_abs) return ErrorBound::absolute(*o.bound_abs);
  std::string text = *o.bound_rel;
  if (!text.empty() && text.back() == '%') text.pop_back();
  double percent = 0.0;
  try {
    std::size_t used = 0;
    percent = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw Error(ErrorCode::config, "--bound-rel expects a percentage, got '" + *o.bound_rel + "'");
  }
  return ErrorBound::relative(percent / 100.0);
}

PipelineConfig config_from(const Options& o) {
  PipelineConfig c;
  c.transform = transform_kind_from_string(o.transform);
  c.fallback = fallback_from_string(o.fallback);
  c.bound = bound_from(o);
  for (const auto& d : o.compressors) c.compressors.push_back(Backend::parse(d));
  if (c.compressors.empty()) c.compressors.push_back(Backend::builtin());
  return c;
}

std::string read_text(const std::string& path) {
  const auto bytes = read_file(path);
  return std::string(bytes.begin(), bytes.end());
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

std::vector<NamedWords> to_named(const std::vector<TransformedColumn>& cols) {
  std::vector<NamedWords> out;
  for (const auto& c : cols) {
    NamedWords n{c.record.column, {}};
    for (float v : c.transformed) n.words.push_back(to_bits(v));
    out.push_back(std::move(n));
  }
  return out;
}

int cmd_transform(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const auto config = config_from(o);
  const auto series = ingest_file(o.input, {o.columns, std::nullopt});

  std::vector<TransformedColumn> cols;
  std::vector<TransformRecord> records;
  for (const auto& s : series) {
    cols.push_back(transform_column(s, config));
    records.push_back(cols.back().record);
    for (const auto& w : cols.back().warnings) std::cerr << "warning: " << s.name << ": " << w << "\n";
  }
  write_file(o.output, encode_transformed(to_named(cols)));
  write_text(o.metadata, metadata_to_json(records));
  if (!o.report.empty()) {
    ReportOptions ro;
    if (o.timing) {
      ro.elapsed_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    emit(o.report, transform_report_to_json(cols, config, ro));
  }
  return 0;
}

int cmd_compress(const Options& o) {
  if (o.compressors.size() > 1) throw Error(ErrorCode::config, "compress takes one --compressor");
  const Backend backend = Backend::parse(o.compressors.empty() ? "builtin" : o.compressors.front());
  const auto columns = decode_transformed(read_file(o.input));

  CompressedContainer container{backend.descriptor(), {}};
  nlohmann::ordered_json cols = nlohmann::ordered_json::array();
  for (const auto& c : columns) {
    auto blob = backend.compress(c.words);
    cols.push_back({{"name", c.name},
                    {"rows", c.words.size()},
                    {"uncompressed_bytes", c.words.size() * 4},
                    {"compressed_bytes", blob.size()}});
    container.columns.push_back({c.name, c.words.size(), std::move(blob)});
  }
  write_file(o.output, encode_container(container));
  if (!o.report.empty()) {
    emit(o.report, nlohmann::ordered_json{{"version", 1},
                                          {"compressor", backend.descriptor()},
                                          {"columns", cols}}
                           .dump(2) +
                       "\n");
  }
  return 0;
}

std::vector<NamedWords> load_words(const Options& o) {
  const auto bytes = read_file(o.input);
  if (bytes.size() >= 4 && std::equal(bytes.begin(), bytes.begin() + 4, "FPTC")) {
    const auto container = decode_container(bytes);
    std::string descriptor = container.backend;
    if (!o.compressors.empty()) {
      descriptor = o.compressors.front();
    } else if (descriptor != "builtin") {
      throw Error(ErrorCode::config, "container was written by '" + descriptor +
                                         "'; pass --compressor to decompress it");
    }
    const Backend backend = Backend::parse(descriptor);
    std::vector<NamedWords> out;
    for (const auto& c : container.columns) {
      auto words = backend.decompress(c.blob);
      if (words.size() != c.rows) {
        throw Error(ErrorCode::corrupt_blob, "column '" + c.name + "' decompressed to the wrong length");
      }
      out.push_back({c.name, std::move(words)});
    }
    return out;
  }
  return decode_transformed(bytes);
}

int cmd_recover(const Options& o) {
  const auto columns = load_words(o);
  const auto records = metadata_from_json(read_text(o.metadata));
  if (records.size() != columns.size()) {
    throw Error(ErrorCode::config, "metadata describes " + std::to_string(records.size()) +
                                       " columns, data has " + std::to_string(columns.size()));
  }

  std::vector<std::vector<std::string>> text;
  std::vector<std::vector<float>> values;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (records[i].column != columns[i].name) {
      throw Error(ErrorCode::config, "metadata column '" + records[i].column +
                                         "' does not match data column '" + columns[i].name + "'");
    }
    std::vector<float> transformed;
    for (auto w : columns[i].words) transformed.push_back(from_bits(w));
    text.push_back(recover_text(records[i], transformed));
    values.push_back(recover_values(records[i], transformed));
  }

  std::ostringstream csv;
  for (std::size_t i = 0; i < columns.size(); ++i) csv << (i ? "," : "") << columns[i].name;
  csv << "\n";
  const std::size_t rows = columns.empty() ? 0 : columns.front().words.size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < columns.size(); ++i) csv << (i ? "," : "") << text[i].at(r);
    csv << "\n";
  }
  emit(o.output, csv.str());

  if (!o.original.empty()) {
    std::vector<std::string> names;
    for (const auto& r : records) names.push_back(r.column);
    const auto originals = ingest_file(o.original, {names, std::nullopt});
    for (std::size_t i = 0; i < records.size(); ++i) {
      verify_bound(records[i].column, records[i].bound, originals[i].values, values[i]);
    }
    std::cerr << "recovered values satisfy the recorded bounds\n";
  }
  return 0;
}

int cmd_bench(const Options& o) {
  const auto start = std::chrono::steady_clock::now();
  const auto config = config_from(o);
  const auto series = ingest_file(o.input, {o.columns, std::nullopt});
  const auto result = run_pipeline(series, config);
  for (const auto& c : result.columns) {
    for (const auto& w : c.column.warnings) std::cerr << "warning: " << c.column.record.column << ": " << w << "\n";
  }
  if (!o.metadata.empty()) {
    std::vector<TransformRecord> records;
    for (const auto& c : result.columns) records.push_back(c.column.record);
    write_text(o.metadata, metadata_to_json(records));
  }
  if (!o.output.empty()) {
    std::vector<TransformedColumn> cols;
    for (const auto& c : result.columns) cols.push_back(c.column);
    write_file(o.output, encode_transformed(to_named(cols)));
  }
  ReportOptions ro;
  if (o.timing) {
    ro.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  emit(o.report, report_to_json(result, config, ro));
  return 0;
}

void add_bound_flags(CLI::App* sub, Options& o) {
  auto* abs = sub->add_option("--bound-abs", o.bound_abs, "Absolute error bound");
  auto* rel = sub->add_option("--bound-rel", o.bound_rel, "Relative error bound in percent (e.g. 1 or 1%)");
  abs->excludes(rel);
  sub->add_option("--transform", o.transform, "none|addition|multiplication|lossless|auto")
      ->check(CLI::IsMember({"none", "addition", "multiplication", "lossless", "auto"}));
  sub->add_option("--fallback", o.fallback, "When a lossy transform is infeasible: fail|none|lossless")
      ->check(CLI::IsMember({"fail", "none", "lossless"}));
  sub->add_option("--columns", o.columns, "Column names or 0-based indices")->delimiter(',');
  sub->add_flag("--timing", o.timing, "Add elapsed time to the report");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Error-bounded float preprocessing for better compression"};
  app.require_subcommand(1);
  Options o;

  auto* transform = app.add_subcommand("transform", "Transform CSV columns and write data plus metadata");
  transform->add_option("input", o.input, "CSV file")->required();
  transform->add_option("-o,--output", o.output, "Transformed binary (FPTX)")->required();
  transform->add_option("-m,--metadata", o.metadata, "Metadata JSON")->required();
  transform->add_option("--report", o.report, "Report JSON ('-' for stdout)");
  transform->add_option("--compressor", o.compressors, "Compressor that arbitrates --transform auto");
  add_bound_flags(transform, o);

  auto* compress = app.add_subcommand("compress", "Compress a transformed binary");
  compress->add_option("input", o.input, "Transformed binary (FPTX)")->required();
  compress->add_option("-o,--output", o.output, "Compressed container (FPTC)")->required();
  compress->add_option("--compressor", o.compressors, "builtin or cmd:<command line>");
  compress->add_option("--report", o.report, "Report JSON ('-' for stdout)");

  auto* recover = app.add_subcommand("recover", "Reconstruct values from FPTX or FPTC plus metadata");
  recover->add_option("input", o.input, "Transformed binary or compressed container")->required();
  recover->add_option("-m,--metadata", o.metadata, "Metadata JSON")->required();
  recover->add_option("-o,--output", o.output, "Recovered CSV ('-' for stdout)");
  recover->add_option("--compressor", o.compressors, "Decompressor for cmd: containers");
  recover->add_option("--original", o.original, "Original CSV to check the recorded bounds against");

  auto* bench = app.add_subcommand("bench", "Run the full pipeline and report compression ratios");
  bench->add_option("input", o.input, "CSV file")->required();
  bench->add_option("--compressor", o.compressors, "builtin or cmd:<command line>, repeatable");
  bench->add_option("--report", o.report, "Report JSON ('-' or omitted for stdout)");
  bench->add_option("-o,--output", o.output, "Also write the transformed binary");
  bench->add_option("-m,--metadata", o.metadata, "Also write the metadata JSON");
  add_bound_flags(bench, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 3;
  }

  try {
    if (*transform) return cmd_transform(o);
    if (*compress) return cmd_compress(o);
    if (*recover) return cmd_recover(o);
    if (*bench) return cmd_bench(o);
  } catch (const Error& e) {
    std::cerr << "fpprep: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "fpprep: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
