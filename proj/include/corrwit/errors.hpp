#pragma once

#include <stdexcept>
#include <string>

namespace corrwit {

enum class ErrorKind {
  NotHermitian,
  ConvergenceFailure,
  BadSubsystemIndex,
  DimensionMismatch,
  InvalidState,
  InvalidPovm,
  InvalidEnsemble,
  TimeOrderViolation,
  QuadratureFailure,
  InvalidEpsilon,
  InvalidProfile,
  DegenerateSplit,
  NoExpansionFound,
  NonBijective,
  ScaleUnderflow,
  BoundaryState,
  DegenerateSpectrumUnsupported,
  BoundaryParameter,
  DegenerateDirection,
  PreconditionViolated,
  ConsistencyViolation,
  ConfigError,
};

const char* to_string(ErrorKind kind) noexcept;

/// Numerical failures (as opposed to caller mistakes); the CLI maps them to exit code 2.
bool is_numerical(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::BadSubsystemIndex: return "BadSubsystemIndex";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::InvalidPovm: return "InvalidPovm";
    case ErrorKind::InvalidEnsemble: return "InvalidEnsemble";
    case ErrorKind::TimeOrderViolation: return "TimeOrderViolation";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::InvalidEpsilon: return "InvalidEpsilon";
    case ErrorKind::InvalidProfile: return "InvalidProfile";
    case ErrorKind::DegenerateSplit: return "DegenerateSplit";
    case ErrorKind::NoExpansionFound: return "NoExpansionFound";
    case ErrorKind::NonBijective: return "NonBijective";
    case ErrorKind::ScaleUnderflow: return "ScaleUnderflow";
    case ErrorKind::BoundaryState: return "BoundaryState";
    case ErrorKind::DegenerateSpectrumUnsupported: return "DegenerateSpectrumUnsupported";
    case ErrorKind::BoundaryParameter: return "BoundaryParameter";
    case ErrorKind::DegenerateDirection: return "DegenerateDirection";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::ConsistencyViolation: return "ConsistencyViolation";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

inline bool is_numerical(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ConvergenceFailure:
    case ErrorKind::QuadratureFailure:
    case ErrorKind::ScaleUnderflow:
    case ErrorKind::NonBijective:
    case ErrorKind::BoundaryState:
    case ErrorKind::DegenerateSpectrumUnsupported:
    case ErrorKind::NoExpansionFound:
      return true;
    default:
      return false;
  }
}

}  // namespace corrwit
