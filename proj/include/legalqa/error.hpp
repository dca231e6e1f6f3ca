#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace legalqa {

// Base for every error raised by the library. The CLI maps ValidationError
// to exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input violates a documented contract (bad config, missing label, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Malformed file content. `line` is 1-based; 0 when not applicable.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class EmptyDatasetError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class EmptyVocabularyError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DimensionMismatch : public ValidationError {
public:
    using ValidationError::ValidationError;
};

}  // namespace legalqa
