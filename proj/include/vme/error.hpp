#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vme {

enum class ErrorCode {
  NonPositiveStretch,
  InvalidDiscretization,
  PointOutsideCoarseElement,
  InvalidSubstepRatio,
  SplitNonConvergence,
  NewtonNonConvergence,
  SingularTangent,
  DtFloor,
  NonConformingPhase,
  MissingSnapshot,
  ZeroReference,
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library; the code identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveStretch: return "NonPositiveStretch";
    case ErrorCode::InvalidDiscretization: return "InvalidDiscretization";
    case ErrorCode::PointOutsideCoarseElement: return "PointOutsideCoarseElement";
    case ErrorCode::InvalidSubstepRatio: return "InvalidSubstepRatio";
    case ErrorCode::SplitNonConvergence: return "SplitNonConvergence";
    case ErrorCode::NewtonNonConvergence: return "NewtonNonConvergence";
    case ErrorCode::SingularTangent: return "SingularTangent";
    case ErrorCode::DtFloor: return "DtFloor";
    case ErrorCode::NonConformingPhase: return "NonConformingPhase";
    case ErrorCode::MissingSnapshot: return "MissingSnapshot";
    case ErrorCode::ZeroReference: return "ZeroReference";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

}  // namespace vme
