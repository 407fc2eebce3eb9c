#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace afm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed arguments: wrong shapes, out-of-range values, non-symmetric input.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A model configuration that violates the DGP assumptions.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Repeated eigenvalues where a simple eigenvalue is required.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// Ill-conditioned linear algebra; carries the offending condition number.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double condition_number)
        : Error(what), condition_number_(condition_number) {}

    double condition_number() const noexcept { return condition_number_; }

private:
    double condition_number_;
};

/// Failure reading or parsing an input file. Row and column are 1-based; 0 means "not applicable".
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
        : Error(what), row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

}  // namespace afm
