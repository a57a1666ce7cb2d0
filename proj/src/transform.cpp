#include "jaqm/transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace jaqm {

namespace {

constexpr int kInverseIterationCap = 200;
constexpr double kBisectionWidth = 1e-3;

inline double bump_prime(double u) noexcept {
  const double w = 1.0 - u * u;
  return -8.0 * u * w * w * w;
}

inline double bump_second(double u) noexcept {
  const double w = 1.0 - u * u;
  return -8.0 * w * w * w + 48.0 * u * u * w * w;
}

}  // namespace

double bump(double u) noexcept {
  if (!(std::abs(u) <= 1.0)) return 0.0;
  const double w = 1.0 - u * u;
  const double w2 = w * w;
  return w2 * w2;
}

TransformG::TransformG(std::vector<double> zetas, std::vector<double> alphas, double nu,
                       std::vector<double> gpp_at_zeta)
    : zetas_(std::move(zetas)), alphas_(std::move(alphas)), gpp_at_zeta_(std::move(gpp_at_zeta)), nu_(nu) {
  if (zetas_.size() != alphas_.size()) throw DomainError("transform needs one alpha per breakpoint");
  for (std::size_t i = 1; i < zetas_.size(); ++i) {
    if (!(zetas_[i - 1] < zetas_[i])) throw DomainError("transform breakpoints must be strictly increasing");
  }
  if (gpp_at_zeta_.empty()) {
    gpp_at_zeta_.resize(alphas_.size());
    std::transform(alphas_.begin(), alphas_.end(), gpp_at_zeta_.begin(), [](double a) { return 2.0 * a; });
  } else if (gpp_at_zeta_.size() != zetas_.size()) {
    throw DomainError("transform needs one G'' extension value per breakpoint");
  }
  if (!zetas_.empty()) {
    const double bound = nu_upper_bound(zetas_, alphas_);
    if (!(nu_ > 0.0) || !(nu_ < bound)) {
      std::ostringstream os;
      os << "bump radius " << nu_ << " outside (0, " << bound << ")";
      throw DomainError(os.str());
    }
  }
}

double TransformG::nu_upper_bound(std::span<const double> zetas, std::span<const double> alphas) {
  double bound = std::numeric_limits<double>::infinity();
  for (double a : alphas) {
    if (a != 0.0) bound = std::min(bound, 1.0 / (8.0 * std::abs(a)));
  }
  for (std::size_t i = 1; i < zetas.size(); ++i) bound = std::min(bound, (zetas[i] - zetas[i - 1]) / 2.0);
  return bound;
}

TransformG TransformG::build(const JumpDiffusionModel& model, double nu_fraction) {
  if (!(nu_fraction > 0.0 && nu_fraction < 1.0)) throw DomainError("nu_fraction must lie in (0, 1)");
  const auto zetas = model.mu.breakpoints();
  if (zetas.empty()) return TransformG();

  std::vector<double> alphas;
  std::vector<double> gpp;
  for (double z : zetas) {
    const auto [left, right] = model.mu.one_sided_limits(z);
    const double s = model.sigma.eval(z);
    if (s == 0.0) {
      throw AssumptionViolation(AssumptionClause::diffusion_lipschitz_nonzero, z,
                                "sigma vanishes at a drift breakpoint");
    }
    const double s2 = s * s;
    const double alpha = (left - right) / (2.0 * s2);
    alphas.push_back(alpha);
    gpp.push_back(2.0 * alpha + 2.0 * (right - model.mu.eval(z)) / s2);
  }
  const double bound = nu_upper_bound(zetas, alphas);
  double nu = nu_fraction * bound;
  if (!std::isfinite(nu)) {
    // Every alpha vanished and there is a single breakpoint: any radius works.
    nu = nu_fraction;
  }
  return TransformG({zetas.begin(), zetas.end()}, std::move(alphas), nu, std::move(gpp));
}

std::ptrdiff_t TransformG::bump_index(double x) const noexcept {
  if (zetas_.empty()) return -1;
  const auto it = std::lower_bound(zetas_.begin(), zetas_.end(), x);
  const auto k = it - zetas_.begin();
  if (k < static_cast<std::ptrdiff_t>(zetas_.size()) && std::abs(zetas_[k] - x) < nu_) return k;
  if (k > 0 && std::abs(x - zetas_[k - 1]) < nu_) return k - 1;
  return -1;
}

double TransformG::value(double x) const noexcept {
  const auto i = bump_index(x);
  if (i < 0) return x;
  const double s = x - zetas_[i];
  return x + alphas_[i] * bump(s / nu_) * s * std::abs(s);
}

double TransformG::prime(double x) const noexcept {
  const auto i = bump_index(x);
  if (i < 0) return 1.0;
  const double s = x - zetas_[i];
  const double u = s / nu_;
  return 1.0 + alphas_[i] * (bump_prime(u) / nu_ * s * std::abs(s) + bump(u) * 2.0 * std::abs(s));
}

double TransformG::second(double x) const noexcept {
  const auto i = bump_index(x);
  if (i < 0) return 0.0;
  const double s = x - zetas_[i];
  if (s == 0.0) return gpp_at_zeta_[i];
  const double u = s / nu_;
  const double sign = s > 0.0 ? 1.0 : -1.0;
  return alphas_[i] * (bump_second(u) / (nu_ * nu_) * s * std::abs(s) + 4.0 * bump_prime(u) / nu_ * std::abs(s) +
                       2.0 * bump(u) * sign);
}

std::pair<double, double> TransformG::second_limits(std::size_t i) const noexcept {
  return {-2.0 * alphas_[i], 2.0 * alphas_[i]};
}

double TransformG::inverse(double y, double tol) const {
  if (!std::isfinite(y)) throw DomainError("inverse: argument is not finite");
  if (!(tol > 0.0)) throw DomainError("inverse: tolerance must be positive");
  const auto i = bump_index(y);
  if (i < 0) return y;

  double max_alpha = 0.0;
  for (double a : alphas_) max_alpha = std::max(max_alpha, std::abs(a));
  const double reach = max_alpha * nu_ * nu_ + nu_;
  // G fixes the bump edges, so the root also lies inside the bump.
  double lo = std::max(y - reach, zetas_[i] - nu_);
  double hi = std::min(y + reach, zetas_[i] + nu_);

  int iterations = 0;
  while (hi - lo > kBisectionWidth && iterations < kInverseIterationCap) {
    const double mid = 0.5 * (lo + hi);
    if (value(mid) < y) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++iterations;
  }

  double x = 0.5 * (lo + hi);
  for (; iterations < kInverseIterationCap; ++iterations) {
    const double r = value(x) - y;
    if (std::abs(r) <= tol) return x;
    if (r < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    double next = x - r / prime(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
      return next;
    }
    x = next;
  }
  std::ostringstream os;
  os.precision(17);
  os << "inverse of G did not converge for y = " << y;
  throw NumericError(os.str());
}

TransformedModel::TransformedModel(JumpDiffusionModel model, TransformG transform, double inversion_tol)
    : model_(std::move(model)), transform_(std::move(transform)), tol_(inversion_tol) {
  if (!(tol_ > 0.0)) throw DomainError("inversion tolerance must be positive");
  xi_t_ = transform_.value(model_.xi);
  for (double z : transform_.zetas()) zeta_t_.push_back(transform_.value(z));
  for (double z : transform_.zetas()) {
    eta_t_.push_back(z - transform_.nu());
    eta_t_.push_back(transform_.value(z));
    eta_t_.push_back(z + transform_.nu());
  }
  for (double b : model_.sigma.breakpoints()) eta_t_.push_back(transform_.value(b));
  std::sort(eta_t_.begin(), eta_t_.end());
  eta_t_.erase(std::unique(eta_t_.begin(), eta_t_.end()), eta_t_.end());
}

StepCoefficients TransformedModel::at(double z) const {
  const double x = transform_.inverse(z, tol_);
  const double g1 = transform_.prime(x);
  const double g2 = transform_.second(x);
  const double m = model_.mu.eval(x);
  const double s = model_.sigma.eval(x);
  StepCoefficients c;
  c.drift = g1 * m + 0.5 * g2 * s * s;
  c.diffusion = g1 * s;
  c.diffusion_slope =
      std::binary_search(eta_t_.begin(), eta_t_.end(), z) ? 0.0 : (g2 * s + g1 * model_.sigma.d(x)) / g1;
  return c;
}

double TransformedModel::jump(double z) const {
  const double x = transform_.inverse(z, tol_);
  const double r = model_.rho.eval(x);
  // no jump: return z itself rather than G(G^{-1}(z)), which carries the inversion residual
  if (r == 0.0) return z;
  return transform_.value(x + r);
}

}  // namespace jaqm
