// errors.hpp: error kinds raised by the eqp library.

#pragma once

#include <stdexcept>
#include <string>

namespace eqp {

enum class ErrorKind {
    DimensionMismatch,
    InvalidArgument,
    SingularInput,
    NotNormal,
    NotIrreducible,
    SimplicityViolation,
    InternalInconsistency,
    UnsupportedBase,
    OrderNotFound,
    NotUnitary,
    SpectrumMismatch,
    HorizonTooShort,
    NotConverged,
    NotAnEigenvalue,
    RationalRotation,
    ConfigError,
};

inline const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SingularInput: return "SingularInput";
    case ErrorKind::NotNormal: return "NotNormal";
    case ErrorKind::NotIrreducible: return "NotIrreducible";
    case ErrorKind::SimplicityViolation: return "SimplicityViolation";
    case ErrorKind::InternalInconsistency: return "InternalInconsistency";
    case ErrorKind::UnsupportedBase: return "UnsupportedBase";
    case ErrorKind::OrderNotFound: return "OrderNotFound";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::SpectrumMismatch: return "SpectrumMismatch";
    case ErrorKind::HorizonTooShort: return "HorizonTooShort";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::NotAnEigenvalue: return "NotAnEigenvalue";
    case ErrorKind::RationalRotation: return "RationalRotation";
    case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    // Failures of a numerical certificate (tolerance, simplicity, unitarity, ...)
    // as opposed to bad input.
    bool is_numerical() const noexcept {
        switch (kind_) {
        case ErrorKind::SingularInput:
        case ErrorKind::NotNormal:
        case ErrorKind::SimplicityViolation:
        case ErrorKind::InternalInconsistency:
        case ErrorKind::OrderNotFound:
        case ErrorKind::NotUnitary:
        case ErrorKind::SpectrumMismatch:
        case ErrorKind::NotConverged:
            return true;
        default:
            return false;
        }
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

} // namespace eqp
