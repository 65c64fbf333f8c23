#include "resdet/error.hpp"

namespace resdet {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::SingularJet: return "SingularJet";
    case ErrorKind::PrincipalAngleViolation: return "PrincipalAngleViolation";
    case ErrorKind::InvalidProjection: return "InvalidProjection";
    case ErrorKind::TruncationUnderflow: return "TruncationUnderflow";
    case ErrorKind::OrderMismatch: return "OrderMismatch";
    case ErrorKind::ResolventSingular: return "ResolventSingular";
    case ErrorKind::NotElliptic: return "NotElliptic";
    case ErrorKind::NotHomogeneous: return "NotHomogeneous";
    case ErrorKind::SeriesNotConverged: return "SeriesNotConverged";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorKind::ZeroOrder: return "ZeroOrder";
    case ErrorKind::InvalidOrder: return "InvalidOrder";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::EvaluationDomain: return "EvaluationDomain";
    case ErrorKind::CrossCheckFailed: return "CrossCheckFailed";
    case ErrorKind::ConfigSchemaError: return "ConfigSchemaError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace resdet
