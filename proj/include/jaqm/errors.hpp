#pragma once

#include <stdexcept>
#include <string>

namespace jaqm {

/// Input outside the domain of an operation (non-finite argument, point not a breakpoint, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Which clause of the standing coefficient assumptions failed.
enum class AssumptionClause {
  drift_piecewise_lipschitz,   // (i)
  diffusion_lipschitz_nonzero, // (ii)
  jump_lipschitz,              // (iii)
  piece_derivatives,           // (iv)
};

const char* clause_label(AssumptionClause clause) noexcept;

class AssumptionViolation : public std::runtime_error {
 public:
  AssumptionViolation(AssumptionClause clause, double where, const std::string& what);

  AssumptionClause clause() const noexcept { return clause_; }
  double where() const noexcept { return where_; }

 private:
  AssumptionClause clause_;
  double where_;
};

/// Non-finite state, failed root finding, or another numerical breakdown.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scheme state left the finite range. Carries the step context.
class SchemeOverflow : public NumericError {
 public:
  SchemeOverflow(std::size_t step, double time, double state);

  std::size_t step() const noexcept { return step_; }
  double time() const noexcept { return time_; }

 private:
  std::size_t step_;
  double time_;
};

/// A grid asked for randomness the master path does not carry. Always a harness bug.
class CouplingError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace jaqm
