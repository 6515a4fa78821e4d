#pragma once

#include <stdexcept>
#include <string>

namespace cuspres {

/// Base class for every numerical failure raised by the library.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument lies within tolerance of a pole (Gamma, Pochhammer factor).
class PoleError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Argument outside the region where a routine is defined or accurate.
class DomainError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Iteration or series failed to reach its tolerance.
class ConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// A quotient's denominator vanished (argument near a zero of the Bessel function).
class NearZeroError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Invalid geometry or solver configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace cuspres
