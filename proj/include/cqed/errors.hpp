// errors.hpp - error kinds raised by the cqed library

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cqed {

enum class ErrorKind {
    InvalidArgument,
    LayoutMismatch,
    NonHermitian,
    Threshold,        // parametric drive at or above oscillation threshold
    Instability,      // |E/delta| >= 1 for a detuned parametric oscillator
    PhaseMismatch,
    NonUniqueSteadyState,
    Convergence,
    Stiffness,
    Window,           // correlation window too short for the requested spectrum
    TruncationInsufficient,
    NoPeaks,
    InsufficientPeaks,
    MultiPeak,
    ConfigSyntax,
    ConfigValidation,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message)
{
    throw Error(kind, message);
}

} // namespace cqed
