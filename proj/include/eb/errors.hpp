#pragma once

#include <stdexcept>

namespace eb {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: shapes, domains, config values, file contents.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A matrix required to be positive definite failed its factorization.
class NotPositiveDefiniteError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Terminal covariance is not nominally reachable (Theta - Gamma_T not PD).
class NotReachableError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Invalid simulation or transcription configuration.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Gramian conditioning guard tripped (cond(Gamma_T) > 1e12).
class ConditioningError : public Error {
 public:
  using Error::Error;
};

/// Internal numerical failure: singular solve, inconsistent cross-check.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// A spectrum that the theory guarantees positive came out nonpositive;
/// signals an upstream bug rather than bad input.
class PositivityViolationError : public Error {
 public:
  using Error::Error;
};

/// The brute-force transcription failed to meet its terminal condition.
class OracleFailureError : public Error {
 public:
  using Error::Error;
};

}  // namespace eb
