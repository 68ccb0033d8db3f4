#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mplab {

// Base for everything this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain (x <= 0 for CRRA, non-positive price, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Lottery / menu / record violates a structural invariant.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class NoCrossoverError : public Error {
public:
    using Error::Error;
};

class MultipleCrossingsError : public Error {
public:
    using Error::Error;
};

class CalibrationError : public Error {
public:
    using Error::Error;
};

// Statistic undefined for the sample (zero variance, all differences zero).
class DegenerateSampleError : public Error {
public:
    using Error::Error;
};

// Text input could not be parsed. `line` is 1-based (0 when not applicable),
// `position` is the 0-based character offset inside the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t position = 0)
        : Error(what), line_(line), position_(position) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t line_;
    std::size_t position_;
};

// A coded field is missing or out of range. `field` is the questionnaire letter A..U.
class ValidationError : public Error {
public:
    ValidationError(const std::string& what, char field, std::size_t row = 0)
        : Error(what), field_(field), row_(row) {}

    char field() const noexcept { return field_; }
    std::size_t row() const noexcept { return row_; }

private:
    char field_;
    std::size_t row_;
};

}  // namespace mplab
