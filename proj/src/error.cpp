#include "nanolab/error.hpp"

namespace nanolab {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::DegenerateGeometry: return "degenerate-geometry";
    case ErrorKind::InvalidCell: return "invalid-cell";
    case ErrorKind::DomainError: return "domain-error";
    case ErrorKind::OptimizationFailure: return "optimization-failure";
    case ErrorKind::EtaTooLarge: return "eta-too-large";
    case ErrorKind::NotStationary: return "not-stationary";
    case ErrorKind::WindowTooSmall: return "window-too-small";
    case ErrorKind::VerificationFailure: return "verification-failure";
    case ErrorKind::ParseError: return "parse-error";
  }
  return "unknown";
}

}  // namespace nanolab
