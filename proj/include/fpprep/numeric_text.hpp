#pragma once

#include <string>
#include <string_view>

namespace fpprep {

/// Parses a decimal/scientific token to the nearest binary32 value. NaN,
/// infinities and out-of-range text throw Error{parse}. -0 becomes +0.
float parse_float(std::string_view token);

/// Shortest text that parses back to the same binary32 value.
std::string format_float(float v);

}  // namespace fpprep
