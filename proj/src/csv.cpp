#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "fpprep/error.hpp"
#include "fpprep/numeric_text.hpp"
#include "fpprep/pipeline.hpp"

namespace fpprep {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string at(std::size_t row, std::size_t col) {
  return "row " + std::to_string(row) + ", column " + std::to_string(col + 1);
}

std::vector<std::string> split_fields(std::string_view line, std::size_t row) {
  line = trim(line);
  if (line.size() >= 2 && line.front() == '[' && line.back() == ']') {
    line = trim(line.substr(1, line.size() - 2));
  }
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"' && trim(field).empty()) {
      field.clear();
      quoted = was_quoted = true;
    } else if (was_quoted && (c == ' ' || c == '\t')) {
      continue;
    } else if (c == ',') {
      fields.push_back(was_quoted ? field : std::string(trim(field)));
      field.clear();
      was_quoted = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw Error(ErrorCode::parse, "row " + std::to_string(row) + ": unterminated quote");
  fields.push_back(was_quoted ? field : std::string(trim(field)));
  return fields;
}

bool numeric(const std::string& token) {
  try {
    parse_float(token);
    return true;
  } catch (const Error&) {
    return false;
  }
}

std::size_t resolve_column(const std::string& selector, const std::vector<std::string>& names) {
  const auto it = std::find(names.begin(), names.end(), selector);
  if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
  std::size_t index = 0;
  const auto* end = selector.data() + selector.size();
  const auto [ptr, ec] = std::from_chars(selector.data(), end, index);
  if (ec == std::errc() && ptr == end && index < names.size()) return index;
  throw Error(ErrorCode::config, "unknown column '" + selector + "'");
}

}  // namespace

std::vector<ColumnSeries> ingest(std::istream& in, const IngestOptions& options) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::string line;
  for (std::size_t n = 1; std::getline(in, line); ++n) {
    if (trim(line).empty()) continue;
    rows.emplace_back(n, split_fields(line, n));
  }
  if (in.bad()) throw Error(ErrorCode::io, "read error while ingesting CSV");
  if (rows.empty()) throw Error(ErrorCode::parse, "CSV input is empty");

  const std::size_t width = rows.front().second.size();
  bool header = false;
  if (options.header) {
    header = *options.header;
  } else {
    const auto& first = rows.front().second;
    header = std::any_of(first.begin(), first.end(), [](const auto& t) { return !numeric(t); });
  }

  std::vector<std::string> names;
  if (header) {
    names = rows.front().second;
    rows.erase(rows.begin());
  } else {
    for (std::size_t c = 0; c < width; ++c) names.push_back("col" + std::to_string(c));
  }
  if (rows.empty()) throw Error(ErrorCode::parse, "CSV input has a header but no data rows");

  std::vector<std::size_t> selected;
  if (options.columns.empty()) {
    for (std::size_t c = 0; c < width; ++c) selected.push_back(c);
  } else {
    for (const auto& s : options.columns) selected.push_back(resolve_column(s, names));
  }

  std::vector<ColumnSeries> out;
  for (std::size_t c : selected) out.push_back(ColumnSeries{names[c], {}, {}});
  for (auto& s : out) {
    s.values.reserve(rows.size());
    s.tokens.reserve(rows.size());
  }
  for (const auto& [n, fields] : rows) {
    if (fields.size() != width) {
      throw Error(ErrorCode::parse, "row " + std::to_string(n) + ": expected " +
                                        std::to_string(width) + " fields, found " +
                                        std::to_string(fields.size()));
    }
    for (std::size_t k = 0; k < selected.size(); ++k) {
      const auto& token = fields[selected[k]];
      try {
        out[k].values.push_back(parse_float(token));
      } catch (const Error& e) {
        throw Error(ErrorCode::parse, at(n, selected[k]) + ": " + e.what());
      }
      out[k].tokens.push_back(token);
    }
  }
  return out;
}

std::vector<ColumnSeries> ingest_file(const std::string& path, const IngestOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path + "'");
  return ingest(in, options);
}

}  // namespace fpprep
