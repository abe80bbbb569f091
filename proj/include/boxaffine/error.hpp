#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace boxaffine {

enum class ErrorKind {
  InvalidArgument,
  DomainError,
  NonFinite,
  QuadratureFailure,
  ConvergenceFailure,
  NotPositiveDefinite,
  NoConvergence,
  ModelUnsupported,
  Unsupported,
  BracketFailure,
  FitFailure,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::ModelUnsupported: return "ModelUnsupported";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::FitFailure: return "FitFailure";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the named kinds above,
/// so callers (the CLI in particular) can report the module error by name.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace boxaffine
