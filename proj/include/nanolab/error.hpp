#pragma once

#include <stdexcept>
#include <string>

namespace nanolab {

enum class ErrorKind {
  InvalidParameter,
  DegenerateGeometry,
  InvalidCell,
  DomainError,
  OptimizationFailure,
  EtaTooLarge,
  NotStationary,
  WindowTooSmall,
  VerificationFailure,
  ParseError,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nanolab
