#include "geodepth/error.hpp"

namespace geodepth {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateDepth: return "DegenerateDepth";
    case ErrorCode::MissingJoint: return "MissingJoint";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::TangentSingularity: return "TangentSingularity";
    case ErrorCode::NonPositiveSigma: return "NonPositiveSigma";
    case ErrorCode::PlacementFailure: return "PlacementFailure";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

namespace {

std::string join_violations(const std::vector<std::string>& v) {
  std::string out = std::to_string(v.size()) + " violation(s)";
  for (const auto& s : v) out += "\n  - " + s;
  return out;
}

}  // namespace

SchemaError::SchemaError(std::vector<std::string> violations)
    : Error(ErrorCode::SchemaError, join_violations(violations)),
      violations_(std::move(violations)) {}

}  // namespace geodepth
