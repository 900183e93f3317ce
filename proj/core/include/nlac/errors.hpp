#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlac {

enum class ErrorKind {
    Param,
    GridMismatch,
    NonzeroMean,
    NonFinite,
    CflViolation,
    NonPositiveDensity,
    DomainExceeded,
    EmptyCone,
    InsufficientSnapshots,
    DegenerateFit,
    NonMonotoneErrors,
    Parse,
    Validation,
    Io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string detail);

    ErrorKind kind() const { return kind_; }
    // The bare detail without the kind prefix, e.g. the offending field name.
    const std::string& detail() const { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

// A march that stopped on a numerical failure. Carries the value of the
// evolution variable (t, z or tau) of the last state that passed all checks.
class NumericalFailure : public Error {
public:
    NumericalFailure(ErrorKind kind, std::string detail, double last_good);

    double last_good() const { return last_good_; }

private:
    double last_good_;
};

}  // namespace nlac
