#pragma once

#include <stdexcept>
#include <string>

namespace mmjump {

/// A model, spec, or configuration violates a stated invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model file rejected while reading it (schema, key, or value errors).
class ModelError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Simulation could not complete (event guard tripped, bad step size, ...).
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature failed to reach the requested absolute tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace mmjump
