#include "nlac/errors.hpp"

namespace nlac {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Param: return "ParamError";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::NonzeroMean: return "NonzeroMean";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::CflViolation: return "CFLViolation";
        case ErrorKind::NonPositiveDensity: return "NonPositiveDensity";
        case ErrorKind::DomainExceeded: return "DomainExceeded";
        case ErrorKind::EmptyCone: return "EmptyCone";
        case ErrorKind::InsufficientSnapshots: return "InsufficientSnapshots";
        case ErrorKind::DegenerateFit: return "DegenerateFit";
        case ErrorKind::NonMonotoneErrors: return "NonMonotoneErrors";
        case ErrorKind::Parse: return "ParseError";
        case ErrorKind::Validation: return "ValidationError";
        case ErrorKind::Io: return "IoError";
    }
    return "Error";
}

Error::Error(ErrorKind kind, std::string detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
      kind_(kind),
      detail_(std::move(detail)) {}

NumericalFailure::NumericalFailure(ErrorKind kind, std::string detail, double last_good)
    : Error(kind, std::move(detail)), last_good_(last_good) {}

}  // namespace nlac
