#pragma once

#include <stdexcept>
#include <string>

namespace svev {

// Invalid parameters or configuration supplied by the caller.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of an operation (a <= 0, s off strip, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Quadrature, iteration or extrapolation failed to converge.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double error_estimate = -1.0)
        : std::runtime_error(what), error_estimate_(error_estimate) {}
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double error_estimate_;
};

// Requested operation is outside what the implementation supports (n too large, ...).
class CapabilityError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace svev
