#pragma once

#include <stdexcept>
#include <string>

namespace holelab {

enum class ErrorKind {
  InvalidArgument,
  ContinuityViolation,
  ExpansionViolation,
  PhaseLeak,
  GridTooCoarse,
  GridMismatch,
  NoConvergence,
  ZeroOperator,
  SingularResolvent,
  Extinction,
  DegenerateFit,
  PlanInvalid,
};

const char* to_string(ErrorKind kind);

// Every failure the library reports carries one of the kinds above so
// callers (the sweep runner in particular) can turn it into a row value.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ContinuityViolation: return "ContinuityViolation";
    case ErrorKind::ExpansionViolation: return "ExpansionViolation";
    case ErrorKind::PhaseLeak: return "PhaseLeak";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::ZeroOperator: return "ZeroOperator";
    case ErrorKind::SingularResolvent: return "SingularResolvent";
    case ErrorKind::Extinction: return "Extinction";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::PlanInvalid: return "PlanInvalid";
  }
  return "Unknown";
}

}  // namespace holelab
