#pragma once

#include <stdexcept>
#include <string>

namespace h2dac {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric argument outside its documented domain (negative capacity, L < 1, ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Configuration that violates a schema rule or a type invariant.
/// `key()` names the offending field so callers can point users at it.
class ValidationError : public Error {
 public:
  ValidationError(std::string key, const std::string& what)
      : Error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// Division by a non-positive quantity in a metric.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed file content (missing header column, bad number, ...).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A value outside its admissible range in an input file.
class RangeError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Inputs whose dimensions disagree (ragged weather files, wrong vector length).
class ShapeError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Structurally invalid solver / extractor input.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Model build failed because the configuration lacks something the model needs.
class BuildError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace h2dac
