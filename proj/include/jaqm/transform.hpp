#pragma once

// Discontinuity-removing transformation
//
//   G(x) = x + sum_i alpha_i * phi((x - zeta_i) / nu) * (x - zeta_i) * |x - zeta_i|,
//   phi(u) = (1 - u^2)^4 on |u| <= 1, 0 otherwise,
//   alpha_i = (mu(zeta_i-) - mu(zeta_i+)) / (2 sigma(zeta_i)^2),
//
// and the coefficients of Z = G(X):
//
//   mu~    = (G' mu + G'' sigma^2 / 2) o G^-1
//   sigma~ = (G' sigma) o G^-1
//   rho~   = G(G^-1 + rho(G^-1)) - id
//
// G is the identity outside the bumps [zeta_i - nu, zeta_i + nu] and maps each
// bump interval onto itself.

#include <span>
#include <vector>

#include "jaqm/coefficients.hpp"

namespace jaqm {

/// phi(u) = (1 - u^2)^4 on |u| <= 1 and 0 elsewhere.
double bump(double u) noexcept;

class TransformG {
 public:
  static constexpr double kDefaultNuFraction = 0.5;
  static constexpr double kDefaultInversionTol = 1e-12;

  /// G = id.
  TransformG() = default;

  /// `gpp_at_zeta` may be empty, meaning G''(zeta_i) = 2 alpha_i.
  TransformG(std::vector<double> zetas, std::vector<double> alphas, double nu,
             std::vector<double> gpp_at_zeta = {});

  /// Builds G for the drift breakpoints of `model` with nu = nu_fraction * phi_bound.
  static TransformG build(const JumpDiffusionModel& model, double nu_fraction = kDefaultNuFraction);

  /// min(min_i 1/(8|alpha_i|), min_i (zeta_{i+1} - zeta_i)/2), infinity when empty.
  static double nu_upper_bound(std::span<const double> zetas, std::span<const double> alphas);

  double value(double x) const noexcept;
  double prime(double x) const noexcept;
  /// Two-sided second derivative off the zetas, the extension value at them.
  double second(double x) const noexcept;
  /// One-sided limits (G''(zeta_i-), G''(zeta_i+)).
  std::pair<double, double> second_limits(std::size_t i) const noexcept;

  /// x with |G(x) - y| <= tol: bracketing by bisection, then safeguarded Newton.
  /// Throws NumericError if the iteration cap is hit.
  double inverse(double y, double tol = kDefaultInversionTol) const;

  bool is_identity() const noexcept { return zetas_.empty(); }
  std::span<const double> zetas() const noexcept { return zetas_; }
  std::span<const double> alphas() const noexcept { return alphas_; }
  std::span<const double> gpp_at_zeta() const noexcept { return gpp_at_zeta_; }
  double nu() const noexcept { return nu_; }

  /// Bump support index containing x, or -1.
  std::ptrdiff_t bump_index(double x) const noexcept;

 private:
  std::vector<double> zetas_;
  std::vector<double> alphas_;
  std::vector<double> gpp_at_zeta_;
  double nu_ = 0.0;
};

/// mu~, sigma~, d_sigma~ at one Z-state, sharing a single inversion.
struct StepCoefficients {
  double drift;
  double diffusion;
  double diffusion_slope;
};

class TransformedModel {
 public:
  TransformedModel(JumpDiffusionModel model, TransformG transform, double inversion_tol = TransformG::kDefaultInversionTol);

  StepCoefficients at(double z) const;
  /// Post-jump state G(x + rho(x)), x = G^-1(z).
  double jump(double z) const;

  double mu_t(double z) const { return at(z).drift; }
  double sigma_t(double z) const { return at(z).diffusion; }
  double d_sigma_t(double z) const { return at(z).diffusion_slope; }
  double rho_t(double z) const { return jump(z) - z; }

  double to_original(double z) const { return transform_.inverse(z, tol_); }
  double xi_t() const noexcept { return xi_t_; }

  /// Z-space locations where mu~ may have a kink: G(zeta_i) = zeta_i.
  std::span<const double> zeta_t() const noexcept { return zeta_t_; }
  /// Z-space locations where sigma~ may have a kink; d_sigma~ is 0 there.
  std::span<const double> eta_t() const noexcept { return eta_t_; }

  const TransformG& transform() const noexcept { return transform_; }
  const JumpDiffusionModel& model() const noexcept { return model_; }
  double inversion_tol() const noexcept { return tol_; }

 private:
  JumpDiffusionModel model_;
  TransformG transform_;
  double tol_;
  double xi_t_;
  std::vector<double> zeta_t_;
  std::vector<double> eta_t_;
};

}  // namespace jaqm
