#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace elmsol {

// Base of every error thrown by the library. The CLI maps these to exit code 1
// unless they are I/O or usage problems (IoError, exit code 2).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// CSV header problems: a required column is missing or renamed.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& msg, std::string column)
      : Error(msg), column_(std::move(column)) {}
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

// Errors tied to a specific data row (1-based, header excluded).
class RowError : public Error {
 public:
  RowError(const std::string& msg, std::size_t row) : Error(msg), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class ParseError : public RowError {
 public:
  using RowError::RowError;
};

class ValidationError : public RowError {
 public:
  using RowError::RowError;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

class SplitError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  SolverError(const std::string& msg, double rcond) : Error(msg), rcond_(rcond) {}
  // Reciprocal condition estimate of the system that failed.
  double rcond() const noexcept { return rcond_; }

 private:
  double rcond_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ModelFormatError : public Error {
 public:
  using Error::Error;
};

class VersionError : public ModelFormatError {
 public:
  using ModelFormatError::ModelFormatError;
};

class ChecksumError : public ModelFormatError {
 public:
  using ModelFormatError::ModelFormatError;
};

class DegenerateError : public Error {
 public:
  using Error::Error;
};

class RankError : public Error {
 public:
  RankError(const std::string& msg, long rank) : Error(msg), rank_(rank) {}
  long rank() const noexcept { return rank_; }

 private:
  long rank_;
};

class SweepError : public Error {
 public:
  using Error::Error;
};

}  // namespace elmsol
