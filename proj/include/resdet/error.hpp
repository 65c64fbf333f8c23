#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace resdet {

// Every failure the library reports carries one of these kinds. The CLI
// prints the kind name verbatim, so the names are part of the interface.
enum class ErrorKind {
  ShapeMismatch,
  SingularJet,
  PrincipalAngleViolation,
  InvalidProjection,
  TruncationUnderflow,
  OrderMismatch,
  ResolventSingular,
  NotElliptic,
  NotHomogeneous,
  SeriesNotConverged,
  NotPositiveDefinite,
  UnsupportedDimension,
  ZeroOrder,
  InvalidOrder,
  SyntaxError,
  UnknownIdentifier,
  EvaluationDomain,
  CrossCheckFailed,
  ConfigSchemaError,
  IoError,
};

std::string_view error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_kind_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace resdet
