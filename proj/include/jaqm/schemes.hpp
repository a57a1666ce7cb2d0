#pragma once

// Jump-adapted schemes on a DrivingPath.
//
// Between grid points (tau_n, tau_{n+1}] the state moves by the quasi-Milstein
// step
//   Z_{n+1}- = Z_n + mu(Z_n) dt + sigma(Z_n) dW + 1/2 sigma(Z_n) d_sigma(Z_n) (dW^2 - dt),
// and at a jump-tagged tau_{n+1} the jump Z_{n+1} = Z_{n+1}- + rho(Z_{n+1}-) is applied.
// d_sigma is the derivative where sigma is differentiable and 0 at its kinks.
// The Euler baseline drops the correction term on the same grid; the
// transformed scheme runs the quasi-Milstein step on Z = G(X).

#include <cmath>
#include <concepts>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "jaqm/coefficients.hpp"
#include "jaqm/kernels/kernels.hpp"
#include "jaqm/randomness_grid.hpp"
#include "jaqm/transform.hpp"

namespace jaqm {

enum class SchemeKind {
  euler_jump_adapted,
  quasi_milstein_jump_adapted,
  transformed_quasi_milstein,
};

std::string_view scheme_name(SchemeKind kind) noexcept;
/// Accepts the full names and the short forms euler, milstein, transformed.
std::optional<SchemeKind> parse_scheme(std::string_view name) noexcept;

struct SchemeSpec {
  SchemeKind kind;
  std::int64_t M;
};

inline double step_euler(double z, double dt, double dw, const StepCoefficients& c) noexcept {
  return (z + c.drift * dt) + c.diffusion * dw;
}

inline double step_quasi_milstein(double z, double dt, double dw, const StepCoefficients& c) noexcept {
  return step_euler(z, dt, dw, c) + 0.5 * c.diffusion * c.diffusion_slope * (dw * dw - dt);
}

template <class Mu, class Sigma, class DSigma>
double step_quasi_milstein(double z, double dt, double dw, Mu&& mu, Sigma&& sigma, DSigma&& d_sigma) {
  return step_quasi_milstein(z, dt, dw, StepCoefficients{mu(z), sigma(z), d_sigma(z)});
}

/// Post-jump state for a unit Poisson increment.
template <class Rho>
double apply_jump(double z_pre, Rho&& rho) {
  return z_pre + rho(z_pre);
}

/// Coefficients of an (untransformed) model as seen by the scheme.
class DirectCoefficients {
 public:
  explicit DirectCoefficients(const JumpDiffusionModel& model) : model_(&model) {}

  StepCoefficients at(double x) const {
    return {model_->mu.eval(x), model_->sigma.eval(x), model_->sigma.d(x)};
  }
  double jump(double x) const { return apply_jump(x, model_->rho); }
  double initial() const noexcept { return model_->xi; }

 private:
  const JumpDiffusionModel* model_;
};

template <class C>
concept SchemeCoefficients = requires(const C& c, double z) {
  { c.at(z) } -> std::same_as<StepCoefficients>;
  { c.jump(z) } -> std::convertible_to<double>;
};

/// One simulated path, in the scheme's state space (Z-space for the transformed scheme).
struct SamplePath {
  std::vector<double> times;
  std::vector<std::uint8_t> flags;
  std::vector<std::size_t> master_index;
  std::vector<double> w;                // Brownian motion at the grid points
  std::vector<double> values;           // Z_{tau_n}
  std::vector<double> pre_jump_values;  // Z_{tau_n -}
  /// Frozen interpolant coefficients of interval (tau_n, tau_{n+1}], one entry per interval.
  std::vector<double> drift;
  std::vector<double> diffusion;
  std::vector<double> correction;
  std::size_t jumps_applied = 0;
  /// Set for the transformed scheme: outputs are G^{-1}(state).
  std::shared_ptr<const TransformedModel> transformed;

  std::size_t size() const noexcept { return times.size(); }
  bool is_jump(std::size_t n) const noexcept { return (flags[n] & kJump) != 0; }
  /// Maps a state value to the original X-space.
  double to_output(double z) const { return transformed ? transformed->to_original(z) : z; }
};

struct SimulateOptions {
  bool milstein_correction = true;
  /// Replaces d_sigma by 0 everywhere (degenerate-algebra checks).
  bool zero_diffusion_slope = false;
};

/// Runs the scheme over `drive`, starting from `initial`. Throws SchemeOverflow.
template <SchemeCoefficients C>
SamplePath simulate_with(const C& coeffs, double initial, const DrivingPath& drive, SimulateOptions opts = {}) {
  const auto times = drive.grid.times();
  const std::size_t n_points = times.size();
  SamplePath path;
  path.times.assign(times.begin(), times.end());
  path.flags.assign(drive.grid.flags().begin(), drive.grid.flags().end());
  path.master_index = drive.master_index;
  path.w = drive.w;
  path.values.resize(n_points);
  path.pre_jump_values.resize(n_points);
  path.drift.resize(n_points - 1);
  path.diffusion.resize(n_points - 1);
  path.correction.resize(n_points - 1);

  double z = initial;
  path.values[0] = z;
  path.pre_jump_values[0] = z;
  for (std::size_t n = 0; n + 1 < n_points; ++n) {
    StepCoefficients c = coeffs.at(z);
    if (opts.zero_diffusion_slope) c.diffusion_slope = 0.0;
    const double dt = times[n + 1] - times[n];
    const double dw = drive.dw[n];
    const double pre = opts.milstein_correction ? step_quasi_milstein(z, dt, dw, c) : step_euler(z, dt, dw, c);
    path.drift[n] = c.drift;
    path.diffusion[n] = c.diffusion;
    path.correction[n] = opts.milstein_correction ? 0.5 * c.diffusion * c.diffusion_slope : 0.0;
    if (!std::isfinite(pre)) throw SchemeOverflow(n + 1, times[n + 1], pre);
    path.pre_jump_values[n + 1] = pre;
    if (drive.jump_count[n] == 1) {
      z = coeffs.jump(pre);
      ++path.jumps_applied;
      if (!std::isfinite(z)) throw SchemeOverflow(n + 1, times[n + 1], z);
    } else {
      z = pre;
    }
    path.values[n + 1] = z;
  }
  return path;
}

/// A scheme bound to a model. The transformed variant builds G once at construction.
class Scheme {
 public:
  Scheme(const JumpDiffusionModel& model, SchemeKind kind, double nu_fraction = TransformG::kDefaultNuFraction,
         double inversion_tol = TransformG::kDefaultInversionTol);

  SamplePath simulate(const DrivingPath& drive) const;
  SchemeKind kind() const noexcept { return kind_; }
  const JumpDiffusionModel& model() const noexcept { return model_; }
  /// Null unless kind() == transformed_quasi_milstein.
  const std::shared_ptr<const TransformedModel>& transformed() const noexcept { return transformed_; }

 private:
  JumpDiffusionModel model_;
  SchemeKind kind_;
  std::shared_ptr<const TransformedModel> transformed_;
};

/// Output-space (X-space) values at the grid points.
std::vector<double> output_values(const SamplePath& path);

/// Output-space interpolant at time t, which must be a master grid point of `pr`
/// (Brownian values are only known there). Throws DomainError otherwise.
double interpolate(const SamplePath& path, const PathRandomness& pr, double t);

/// Interpolant on every master point, in output space. `post` receives the
/// (right-continuous) values; `pre_at_jumps` the left limits at the master jump
/// points, in grid order.
struct MasterTrace {
  std::vector<double> post;
  std::vector<double> pre_at_jumps;
};

/// Fills `trace` in the scheme's state space (no G^{-1} mapping).
void interpolate_state_on_master(const SamplePath& path, const PathRandomness& pr, MasterTrace& trace);
/// Fills `trace` in output space.
void interpolate_on_master(const SamplePath& path, const PathRandomness& pr, MasterTrace& trace);

}  // namespace jaqm
