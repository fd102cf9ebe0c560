#pragma once

#include <stdexcept>
#include <string>

namespace compbf {

// Parameter outside the mathematical domain (CLI maps these to exit code 2).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Adaptive quadrature could not meet the requested tolerance.
struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Series CCDF evaluation requested beyond the supported derivative order.
struct UnsupportedOrderError : DomainError {
  using DomainError::DomainError;
};

// Finite-difference derivative estimates disagree beyond the stability budget.
struct DerivativeInstabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Beamformer constraint rows are linearly dependent beyond tolerance.
struct RankDeficiencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An SIR draw saw zero aggregate interference (signals a truncation bug).
struct ZeroInterferenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Conditional-mode acceptance rate fell below the viability floor.
struct StarvationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Pilot overhead exceeds the whole coherence block for every candidate.
struct InfeasibleOverheadError : DomainError {
  using DomainError::DomainError;
};

// A curve or output violated a structural invariant before serialization.
struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace compbf
