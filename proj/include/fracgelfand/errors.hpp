#pragma once

#include <stdexcept>
#include <string>

namespace fracgelfand {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The operation needs n > 2s and was called with n <= 2s.
class RegimeError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Invalid grid, solver or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An iterative method failed or produced an unusable result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace fracgelfand
