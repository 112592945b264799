#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fcmi {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a documented precondition (bad argument, wrong column kind).
class UsageError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed CSV input. `row()` is the 1-based physical record number
/// (the header is record 1).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : Error(what + " (record " + std::to_string(row) + ")"), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Recoverable condition in the data itself. Imputers catch these and fall
/// back to a simpler estimate; they surface to the CLI as exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

class NoPredictors : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientData : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateBatch : public DataError {
 public:
  using DataError::DataError;
};

class FullyMissingColumn : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace fcmi
