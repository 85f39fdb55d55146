#pragma once

#include <stdexcept>
#include <string>

namespace disent {

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UsageError : std::logic_error {
    using std::logic_error::logic_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepFailureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised when a trajectory breaches a conservation monitor; carries the time.
struct DiagnosticError : std::runtime_error {
    DiagnosticError(const std::string& what, double time)
        : std::runtime_error(what + " at t=" + std::to_string(time)), time_of_breach(time) {}
    double time_of_breach;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace disent
