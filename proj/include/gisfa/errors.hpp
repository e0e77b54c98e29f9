#pragma once

#include <stdexcept>
#include <string>

namespace gisfa {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent run configuration. Maps to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// The physical model cannot deliver what was asked (e.g. no bound state).
class ModelError : public Error {
 public:
  using Error::Error;
};

// Non-finite intermediate or failed convergence. Maps to exit code 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace gisfa
