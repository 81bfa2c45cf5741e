#pragma once

#include <stdexcept>
#include <string>

namespace bq {

// Construction tolerances are two orders tighter than verification ones.
inline constexpr double kConstructionTol = 1e-9;
inline constexpr double kVerificationTol = 1e-6;
inline constexpr double kTangencyTol = 1e-9;
inline constexpr double kDedupTol = 1e-9;
inline constexpr double kInjectivityTol = 1e-7;

/// A caller-side contract violation (bad descriptor, out-of-range knob).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point lies on a line where a strict side was required.
class CollinearError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Two points that must lie on the same side of a line do not.
class OppositeSidesError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Sphere radii that admit no intersection point.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solve stopped without meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_residual)
      : std::runtime_error(what), best_residual_(best_residual) {}
  double best_residual() const noexcept { return best_residual_; }

 private:
  double best_residual_;
};

/// A builder step failed; the message names the rule that failed.
class BuildError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A search ran past its hard budget (for example the enumeration leaf cap).
class BudgetExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bq
