#pragma once

#include <stdexcept>
#include <string>

namespace modglue {

// Malformed or inconsistent input (shape mismatch, out-of-range label, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Failure carrying the numerical residual that triggered it.
class ResidualError : public std::runtime_error {
 public:
  ResidualError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// A kernel dimension that is not a multiple of the block size.
class RankAmbiguity : public ResidualError {
 public:
  using ResidualError::ResidualError;
};

// A family of maps that fails to intertwine the transition maps.
class NotAMorphism : public ResidualError {
 public:
  using ResidualError::ResidualError;
};

// A linear map that does not commute with the right action.
class NotAModuleMap : public ResidualError {
 public:
  using ResidualError::ResidualError;
};

// A computed object lies outside the finite-dimensional model,
// e.g. a bimodule automorphism that is not scalar.
class ModelViolation : public ResidualError {
 public:
  using ResidualError::ResidualError;
};

}  // namespace modglue
