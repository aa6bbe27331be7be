#pragma once

#include <stdexcept>
#include <string>

namespace qfric {

/// Argument outside the domain of a physical function (negative radius, omega = 0 in coth, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative numerical procedure stopped before meeting its tolerance.
/// Carries whatever partial answer was available.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string& what, double partial_value, double error_estimate)
        : std::runtime_error(what), partial_value_(partial_value), error_estimate_(error_estimate)
    {
    }

    double partial_value() const noexcept { return partial_value_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double partial_value_;
    double error_estimate_;
};

/// Root search found no sign change where a surface (or sphere) mode should sit.
class NoSurfaceModeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed material file, config file or command-line setting.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace qfric
