#pragma once

// Batch pipeline: CSV columns -> transform -> compress -> decompress ->
// invert -> verify, plus the on-disk artifacts the CLI reads and writes.

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "fpprep/compressors.hpp"
#include "fpprep/error_metrics.hpp"

namespace fpprep {

struct ColumnSeries {
  std::string name;
  std::vector<float> values;
  std::vector<std::string> tokens;  // source text, trimmed
};

struct IngestOptions {
  std::vector<std::string> columns;  // names or 0-based indices; empty selects all
  std::optional<bool> header;        // nullopt: a first row with a non-numeric cell is a header
};

/// Reads comma-separated rows. A row may be wrapped in [ ]; fields may be
/// double-quoted; blank lines are skipped. Columns without a header are named
/// col0, col1, ... Throws Error{parse} with row/column coordinates and
/// Error{config} for an unknown column selector.
std::vector<ColumnSeries> ingest(std::istream& in, const IngestOptions& options = {});
std::vector<ColumnSeries> ingest_file(const std::string& path, const IngestOptions& options = {});

enum class TransformKind { none, addition, multiplication, lossless, automatic };
enum class Fallback { fail, none, lossless };

const char* to_string(TransformKind kind) noexcept;
TransformKind transform_kind_from_string(const std::string& s);
const char* to_string(Fallback fallback) noexcept;
Fallback fallback_from_string(const std::string& s);

/// Everything needed to invert a column's transform.
struct TransformRecord {
  std::string column;
  TransformKind kind = TransformKind::none;  // never `automatic`
  float addition = 0.0f;                     // kind == addition
  int multiplier = 0;                        // kind == multiplication
  int power = 0;                             // kind == lossless
  ErrorBound bound = ErrorBound::unbounded();
  double max_abs = 0.0;
  double max_rel = 0.0;
  int min_trailing_zeros = 0;
  std::optional<int> shared_exponent;  // unbiased, when every word has the same one

  friend bool operator==(const TransformRecord&, const TransformRecord&) = default;
};

/// Addition parameter as 8 lowercase hex digits of its bit pattern.
std::string encode_addition(float a);
float decode_addition(const std::string& hex);

struct TransformedColumn {
  TransformRecord record;
  std::vector<float> transformed;
  std::vector<float> recovered;
  std::vector<std::string> warnings;
};

/// A compression backend: the built-in dictionary compressor or a command.
class Backend {
 public:
  static Backend builtin();
  static Backend command(const std::string& command_line);
  /// "builtin" or "cmd:<command line>".
  static Backend parse(const std::string& descriptor);

  const std::string& descriptor() const { return descriptor_; }
  bool is_builtin() const { return !spec_.has_value(); }

  Bytes compress(std::span<const std::uint32_t> words, bool verify = true) const;
  std::vector<std::uint32_t> decompress(std::span<const std::uint8_t> blob) const;

 private:
  std::string descriptor_;
  std::optional<CommandSpec> spec_;
};

struct PipelineConfig {
  TransformKind transform = TransformKind::automatic;
  ErrorBound bound = ErrorBound::relative(0.01);
  Fallback fallback = Fallback::fail;
  std::vector<Backend> compressors;  // the first one arbitrates `automatic`
  bool verify_external = true;
};

/// Transforms one column, inverts it in memory and checks the bound. Lossy
/// kinds that cannot meet the bound follow `config.fallback`; a lossless
/// request that overflows degrades to none with a warning. Throws
/// Error{bound_violation} if a recovered sample breaks the bound.
TransformedColumn transform_column(const ColumnSeries& series, const PipelineConfig& config);

/// Inverse transform from the record alone.
std::vector<float> recover_values(const TransformRecord& record,
                                  std::span<const float> transformed);

/// Recovered values as text; lossless columns get their canonical decimals.
std::vector<std::string> recover_text(const TransformRecord& record,
                                      std::span<const float> transformed);

/// Throws Error{bound_violation} naming the first offending sample.
void verify_bound(const std::string& column, const ErrorBound& bound,
                  std::span<const float> original, std::span<const float> recovered);

struct ColumnResult {
  TransformedColumn column;
  std::size_t rows = 0;
  std::vector<CompressionReport> reports;  // one per backend, in config order
};

struct PipelineResult {
  std::vector<ColumnResult> columns;
  std::vector<CompressionReport> global;  // sizes summed over columns
  double max_abs = 0.0;
  double max_rel = 0.0;
};

/// Full run. CR_NP comes from compressing the untransformed words with the
/// same backend in the same run.
PipelineResult run_pipeline(const std::vector<ColumnSeries>& series, const PipelineConfig& config);

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

struct NamedWords {
  std::string name;
  std::vector<std::uint32_t> words;

  friend bool operator==(const NamedWords&, const NamedWords&) = default;
};

/// "FPTX" | version u8 | column count u16 | per column: name length u16, name,
/// row count u64, little-endian words.
Bytes encode_transformed(const std::vector<NamedWords>& columns);
std::vector<NamedWords> decode_transformed(std::span<const std::uint8_t> bytes);

struct CompressedColumn {
  std::string name;
  std::uint64_t rows = 0;
  Bytes blob;

  friend bool operator==(const CompressedColumn&, const CompressedColumn&) = default;
};

struct CompressedContainer {
  std::string backend;  // Backend::descriptor()
  std::vector<CompressedColumn> columns;

  friend bool operator==(const CompressedContainer&, const CompressedContainer&) = default;
};

/// "FPTC" | version u8 | backend length u16, backend | column count u16 | per
/// column: name length u16, name, row count u64, blob length u64, blob.
Bytes encode_container(const CompressedContainer& container);
CompressedContainer decode_container(std::span<const std::uint8_t> bytes);

std::string metadata_to_json(const std::vector<TransformRecord>& records);
std::vector<TransformRecord> metadata_from_json(const std::string& text);

struct ReportOptions {
  std::optional<double> elapsed_seconds;  // emitted under "timing" only when set
};

/// Deterministic report document; see docs/report.schema.json.
std::string report_to_json(const PipelineResult& result, const PipelineConfig& config,
                           const ReportOptions& options = {});

/// Report for a transform-only run (no compression section).
std::string transform_report_to_json(const std::vector<TransformedColumn>& columns,
                                     const PipelineConfig& config,
                                     const ReportOptions& options = {});

Bytes read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);
void write_text(const std::string& path, const std::string& text);

}  // namespace fpprep
