#pragma once

#include <stdexcept>
#include <string>

namespace argutopo {

/// Base of every error thrown by the library. Each subclass maps onto one of
/// the CLI exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  [[nodiscard]] virtual int exit_code() const noexcept { return 2; }
};

/// Bad configuration or arguments supplied by the caller.
class UsageError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] int exit_code() const noexcept override { return 1; }
};

/// Malformed input data (embedding files, CSV, JSON, missing tokens).
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

/// A numerical stage could not proceed (zero variance, series too short, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
  [[nodiscard]] int exit_code() const noexcept override { return 3; }
};

}  // namespace argutopo
