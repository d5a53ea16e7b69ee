#pragma once

#include <stdexcept>
#include <string>

namespace fpprep {

enum class ErrorCode {
  unsupported_value,   // 0.0, subnormal, infinite or NaN where a normal float is required
  invalid_argument,
  length_mismatch,
  infeasible,          // no parameter satisfies the error bound
  unsupported_data,    // data shape rules out the transform altogether
  unadjustable,        // multiply-and-check found no compliant neighbour
  lossless_infeasible, // scaled integers leave the exact-integer range
  corrupt_blob,
  parse,
  config,
  io,
  bound_violation,
  process,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` tells callers (and the CLI
/// exit-code mapping) what went wrong.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fpprep
