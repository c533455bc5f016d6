#pragma once

#include <stdexcept>
#include <string>

namespace arpp {

/// Malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data that cannot be used as given (CLI exit code 3).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical routine failed to produce a usable answer (CLI exit code 4).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The C1 knot system has no solution for the requested shape parameters.
class NoKnotSolution : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The knot bisection did not converge.
class SolverFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace arpp
