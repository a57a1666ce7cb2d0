#pragma once

// Scalar piecewise-smooth coefficient functions and the jump-diffusion model
//   dX = mu(X) dt + sigma(X) dW + rho(X-) dN,  X_0 = xi,  t in [0, T],
// with N a Poisson process of intensity lambda.

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jaqm/errors.hpp"

namespace jaqm {

using ScalarFn = std::function<double(double)>;

/// One smooth piece: closed-form value and analytic derivative, valid on the
/// closure of its interval so one-sided limits at breakpoints are evaluable.
struct SmoothPiece {
  ScalarFn value;
  ScalarFn derivative;
  std::string label;
};

/// Which value a piecewise function takes exactly at a breakpoint.
struct BreakpointValue {
  enum class Kind { right_limit, left_limit, fixed };
  Kind kind = Kind::right_limit;
  double fixed_value = 0.0;

  static BreakpointValue right() { return {}; }
  static BreakpointValue left() { return {Kind::left_limit, 0.0}; }
  static BreakpointValue fixed(double v) { return {Kind::fixed, v}; }
};

class PiecewiseSmoothFn {
 public:
  /// Single smooth piece, no breakpoints.
  explicit PiecewiseSmoothFn(SmoothPiece piece);

  /// `pieces.size()` must be `breakpoints.size() + 1`; breakpoints strictly increasing.
  /// `at_breakpoint` is empty (right limit everywhere) or one entry per breakpoint.
  PiecewiseSmoothFn(std::vector<double> breakpoints, std::vector<SmoothPiece> pieces,
                    std::vector<BreakpointValue> at_breakpoint = {});

  double operator()(double x) const { return eval(x); }

  double eval(double x) const;

  /// (f(zeta-), f(zeta+)); zeta must be one of the breakpoints.
  std::pair<double, double> one_sided_limits(double zeta) const;

  /// Derivative where the function is smooth, exactly 0 at breakpoints.
  double d(double x) const;

  std::span<const double> breakpoints() const noexcept { return breakpoints_; }
  std::span<const SmoothPiece> pieces() const noexcept { return pieces_; }
  bool is_breakpoint(double x) const noexcept;

  /// Index of the piece governing x off breakpoints (number of breakpoints below x).
  std::size_t piece_index(double x) const noexcept;

  std::string describe() const;

 private:
  std::vector<double> breakpoints_;
  std::vector<SmoothPiece> pieces_;
  std::vector<BreakpointValue> at_breakpoint_;
};

struct JumpDiffusionModel {
  PiecewiseSmoothFn mu;
  PiecewiseSmoothFn sigma;
  PiecewiseSmoothFn rho;
  double xi;
  double T;
  double lambda;

  JumpDiffusionModel(PiecewiseSmoothFn mu, PiecewiseSmoothFn sigma, PiecewiseSmoothFn rho, double xi,
                     double T, double lambda);
};

/// Empirical linear-growth constants: |f(x)| <= c_f (1 + |x|) on the validation box.
struct LinearGrowthCertificate {
  double c_mu = 0.0;
  double c_sigma = 0.0;
  double c_rho = 0.0;
};

struct ValidationBox {
  double lo;
  double hi;
};

struct ValidationOptions {
  /// Largest difference quotient accepted as "Lipschitz" on a sampled piece.
  double max_lipschitz = 1e6;
  /// Relative tolerance for continuity of sigma and rho at their breakpoints.
  double continuity_tol = 1e-9;
  /// Offset of the extra samples placed on both sides of each breakpoint.
  double breakpoint_offset = 1e-8;
};

/// Sampled check of the standing assumptions (i)-(iv). Throws AssumptionViolation.
LinearGrowthCertificate validate_assumption1(const JumpDiffusionModel& model, ValidationBox box,
                                             std::size_t n_samples, const ValidationOptions& options = {});

/// Box spanning xi and every breakpoint of the model, padded by `margin` on both sides.
ValidationBox default_box(const JumpDiffusionModel& model, double margin = 10.0);

}  // namespace jaqm
