#pragma once

#include <stdexcept>
#include <string>

namespace greedfear {

/// Root of every error thrown by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (poles, mgf strips, u outside (0,1)).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A quadrature, inversion or simulation that failed to meet its tolerance.
class NumericError : public Error {
public:
    NumericError(const std::string& what, double partial_estimate = 0.0, double error_estimate = 0.0)
        : Error(what), partial_(partial_estimate), error_(error_estimate) {}

    double partial_estimate() const noexcept { return partial_; }
    double error_estimate() const noexcept { return error_; }

private:
    double partial_;
    double error_;
};

/// find_root called without a sign change.
class BracketError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Market parameters that admit no equivalent martingale measure of the requested form.
class ModelError : public Error {
public:
    using Error::Error;
};

/// Tree or pricer set up with values that break a structural requirement.
class ConfigurationError : public Error {
public:
    using Error::Error;
};

/// Malformed input file or JSON document.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace greedfear
