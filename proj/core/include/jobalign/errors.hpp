#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jobalign {

// Base class for all library errors. The CLI maps subclasses to exit codes:
// input/format errors -> 2, numeric failures -> 3, id mismatches -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg), line_(0) {}
  ParseError(const std::string& msg, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a domain invariant (unknown language tag,
// duplicate id, empty relevant set, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration (batch_size < 2, tau <= 0, unsupported target, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A run file references query ids absent from the qrels.
class IdMismatchError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Non-finite loss/gradient, degenerate projection, and friends.
class NumericError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace jobalign
