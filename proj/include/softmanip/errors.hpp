#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace softmanip {

// Base class for all recoverable domain errors. The CLI maps these to
// exit code 1; anything else (usage problems) maps to exit code 2.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidInputError : DomainError {
  using DomainError::DomainError;
};

// Two tracked needle points coincide; no direction can be formed.
struct DegenerateDirectionError : DomainError {
  using DomainError::DomainError;
};

// Regression design matrix is rank deficient.
struct SingularDesignError : DomainError {
  using DomainError::DomainError;
};

// Inverse kinematics: no in-bounds current vector reaches the target.
// Carries the best effort found so the caller can still inspect it.
struct UnreachableError : DomainError {
  UnreachableError(const std::string& msg, double residual_mm,
                   std::array<double, 4> best)
      : DomainError(msg), best_residual_mm(residual_mm), best_currents(best) {}
  double best_residual_mm;
  std::array<double, 4> best_currents;
};

struct ConvergenceError : DomainError {
  using DomainError::DomainError;
};

struct MorphTransitionError : DomainError {
  using DomainError::DomainError;
};

struct IoError : DomainError {
  using DomainError::DomainError;
};

struct ConfigError : DomainError {
  using DomainError::DomainError;
};

}  // namespace softmanip
