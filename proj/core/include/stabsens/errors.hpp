#pragma once

#include <stdexcept>
#include <string>

namespace stabsens {

/// Base class for all stabsens errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Mismatched or invalid matrix/vector dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value (bad bounds, non-positive step, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The algebraic block D of a descriptor system is (numerically) singular.
class SingularAlgebraicBlock : public Error {
 public:
  using Error::Error;
};

/// The Lyapunov operator is singular: the spectrum of J contains a pair
/// with lambda_i + lambda_j = 0, so the equation has no unique solution.
class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

/// Trajectory integration produced a non-finite state.
class IntegrationDiverged : public Error {
 public:
  using Error::Error;
};

/// An operation that requires an Optimal certificate was given a
/// certificate with a different solver status.
class StatusNotOptimal : public Error {
 public:
  using Error::Error;
};

/// The optimality residual at the supplied point exceeds the gate
/// threshold; sensitivities would differentiate a non-optimal point.
class NotAtOptimum : public Error {
 public:
  using Error::Error;
};

/// The sensitivity linear system produced non-finite values.
class DegenerateKKT : public Error {
 public:
  using Error::Error;
};

}  // namespace stabsens
