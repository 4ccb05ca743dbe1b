#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace geodepth {

enum class ErrorCode {
  DegenerateDepth,
  MissingJoint,
  OutOfBounds,
  DegenerateGeometry,
  TangentSingularity,
  NonPositiveSigma,
  PlacementFailure,
  ParseError,
  SchemaError,
  IoError,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code);

/// Every library failure is reported through this type; `code()` tells the
/// kinds apart.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Schema validation collects every violation before throwing.
class SchemaError : public Error {
 public:
  explicit SchemaError(std::vector<std::string> violations);

  const std::vector<std::string>& violations() const noexcept {
    return violations_;
  }

 private:
  std::vector<std::string> violations_;
};

}  // namespace geodepth
