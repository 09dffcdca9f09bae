#pragma once

#include <stdexcept>
#include <string>

namespace potrec {

enum class ErrorCode {
  InvalidArgument,
  InvalidDimension,
  OddN,
  WrongSpace,
  GridMismatch,
  NonUnitVector,
  UnderresolvedCap,
  UnderresolvedGrid,
  DivergentSeries,
  MaxIterations,
  EndpointCondition,
  Io,
  Config,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library; `code()` tells callers (and the CLI
/// exit-status mapping) which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for failures of the numerics rather than of the inputs.
  bool is_numerical() const noexcept {
    return code_ == ErrorCode::DivergentSeries || code_ == ErrorCode::MaxIterations;
  }

 private:
  ErrorCode code_;
};

}  // namespace potrec
