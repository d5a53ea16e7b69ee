#include "fpprep/numeric_text.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "fpprep/error.hpp"

namespace fpprep {

float parse_float(std::string_view token) {
  std::string_view body = token;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  float v = 0.0f;
  const auto* end = body.data() + body.size();
  const auto [ptr, ec] = std::from_chars(body.data(), end, v, std::chars_format::general);
  if (body.empty() || ec == std::errc::invalid_argument || ptr != end) {
    throw Error(ErrorCode::parse, "not a number: '" + std::string(token) + "'");
  }
  if (ec == std::errc::result_out_of_range || !std::isfinite(v)) {
    throw Error(ErrorCode::parse, "value out of binary32 range: '" + std::string(token) + "'");
  }
  return v == 0.0f ? 0.0f : v;
}

std::string format_float(float v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace fpprep
