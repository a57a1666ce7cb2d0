#include "jaqm/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace jaqm {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(what) + ": argument is not finite");
  }
}

std::string format_real(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

PiecewiseSmoothFn::PiecewiseSmoothFn(SmoothPiece piece) {
  pieces_.push_back(std::move(piece));
}

PiecewiseSmoothFn::PiecewiseSmoothFn(std::vector<double> breakpoints, std::vector<SmoothPiece> pieces,
                                     std::vector<BreakpointValue> at_breakpoint)
    : breakpoints_(std::move(breakpoints)),
      pieces_(std::move(pieces)),
      at_breakpoint_(std::move(at_breakpoint)) {
  if (pieces_.size() != breakpoints_.size() + 1) {
    throw DomainError("piecewise function needs exactly one more piece than breakpoints");
  }
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    require_finite(breakpoints_[i], "breakpoint");
    if (i > 0 && !(breakpoints_[i - 1] < breakpoints_[i])) {
      throw DomainError("breakpoints must be strictly increasing");
    }
  }
  for (const auto& p : pieces_) {
    if (!p.value || !p.derivative) {
      throw DomainError("every piece needs a value and a derivative");
    }
  }
  if (at_breakpoint_.empty()) {
    at_breakpoint_.assign(breakpoints_.size(), BreakpointValue::right());
  } else if (at_breakpoint_.size() != breakpoints_.size()) {
    throw DomainError("breakpoint value conventions must match the number of breakpoints");
  }
}

std::size_t PiecewiseSmoothFn::piece_index(double x) const noexcept {
  return static_cast<std::size_t>(std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x) -
                                  breakpoints_.begin());
}

bool PiecewiseSmoothFn::is_breakpoint(double x) const noexcept {
  return std::binary_search(breakpoints_.begin(), breakpoints_.end(), x);
}

double PiecewiseSmoothFn::eval(double x) const {
  require_finite(x, "eval");
  const std::size_t k = piece_index(x);
  if (k < breakpoints_.size() && breakpoints_[k] == x) {
    const auto& conv = at_breakpoint_[k];
    switch (conv.kind) {
      case BreakpointValue::Kind::right_limit:
        return pieces_[k + 1].value(x);
      case BreakpointValue::Kind::left_limit:
        return pieces_[k].value(x);
      case BreakpointValue::Kind::fixed:
        return conv.fixed_value;
    }
  }
  return pieces_[k].value(x);
}

std::pair<double, double> PiecewiseSmoothFn::one_sided_limits(double zeta) const {
  require_finite(zeta, "one_sided_limits");
  const std::size_t k = piece_index(zeta);
  if (k >= breakpoints_.size() || breakpoints_[k] != zeta) {
    throw DomainError("one_sided_limits: " + format_real(zeta) + " is not a breakpoint");
  }
  return {pieces_[k].value(zeta), pieces_[k + 1].value(zeta)};
}

double PiecewiseSmoothFn::d(double x) const {
  require_finite(x, "d");
  const std::size_t k = piece_index(x);
  if (k < breakpoints_.size() && breakpoints_[k] == x) {
    return 0.0;
  }
  return pieces_[k].derivative(x);
}

std::string PiecewiseSmoothFn::describe() const {
  if (breakpoints_.empty()) {
    return pieces_.front().label;
  }
  std::ostringstream os;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    if (k > 0) os << "; ";
    os << pieces_[k].label << " on ";
    os << (k == 0 ? "(-inf" : "[" + format_real(breakpoints_[k - 1])) << ", ";
    os << (k == breakpoints_.size() ? std::string("inf)") : format_real(breakpoints_[k]) + ")");
  }
  return os.str();
}

JumpDiffusionModel::JumpDiffusionModel(PiecewiseSmoothFn mu_, PiecewiseSmoothFn sigma_, PiecewiseSmoothFn rho_,
                                       double xi_, double T_, double lambda_)
    : mu(std::move(mu_)), sigma(std::move(sigma_)), rho(std::move(rho_)), xi(xi_), T(T_), lambda(lambda_) {
  require_finite(xi, "initial value");
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("horizon T must be positive and finite");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("jump intensity must be positive and finite");
}

ValidationBox default_box(const JumpDiffusionModel& model, double margin) {
  double lo = model.xi;
  double hi = model.xi;
  for (const PiecewiseSmoothFn* f : {&model.mu, &model.sigma, &model.rho}) {
    for (double z : f->breakpoints()) {
      lo = std::min(lo, z);
      hi = std::max(hi, z);
    }
  }
  return {lo - margin, hi + margin};
}

namespace {

struct SampledBounds {
  double lipschitz = 0.0;
  double growth_ratio = 0.0;
};

class Validator {
 public:
  Validator(std::vector<double> samples, const ValidationOptions& opts) : x_(std::move(samples)), opts_(opts) {}

  // Difference quotients of `g` between consecutive samples inside one open piece of f.
  double sampled_lipschitz(const PiecewiseSmoothFn& f, const ScalarFn& g, AssumptionClause clause,
                           const char* name) const {
    double lip = 0.0;
    for (std::size_t i = 0; i + 1 < x_.size(); ++i) {
      const double a = x_[i];
      const double b = x_[i + 1];
      if (f.is_breakpoint(a) || f.is_breakpoint(b) || f.piece_index(a) != f.piece_index(b)) continue;
      const double ga = g(a);
      const double gb = g(b);
      if (!std::isfinite(ga)) throw AssumptionViolation(clause, a, std::string(name) + " is not finite");
      if (!std::isfinite(gb)) throw AssumptionViolation(clause, b, std::string(name) + " is not finite");
      const double q = std::abs(gb - ga) / (b - a);
      if (!(q <= opts_.max_lipschitz)) {
        throw AssumptionViolation(clause, a, std::string(name) + " exceeds the sampled Lipschitz bound");
      }
      lip = std::max(lip, q);
    }
    return lip;
  }

  void check_derivative(const PiecewiseSmoothFn& f, const char* name) const {
    for (double x : x_) {
      if (f.is_breakpoint(x)) continue;
      const double h = 1e-5 * std::max(1.0, std::abs(x));
      if (f.piece_index(x - h) != f.piece_index(x + h) || f.is_breakpoint(x - h) || f.is_breakpoint(x + h)) {
        continue;
      }
      const auto& piece = f.pieces()[f.piece_index(x)];
      const double fd = (piece.value(x + h) - piece.value(x - h)) / (2.0 * h);
      const double an = piece.derivative(x);
      const double tol = 1e-4 * (1.0 + std::abs(an)) + 1e-12 * std::abs(piece.value(x)) / h;
      if (!std::isfinite(an) || !(std::abs(fd - an) <= tol)) {
        throw AssumptionViolation(AssumptionClause::piece_derivatives, x,
                                  std::string(name) + " derivative disagrees with finite differences");
      }
    }
  }

  void check_continuity(const PiecewiseSmoothFn& f, AssumptionClause clause, const char* name) const {
    for (double z : f.breakpoints()) {
      const auto [l, r] = f.one_sided_limits(z);
      const double at = f.eval(z);
      const double scale = std::max({1.0, std::abs(l), std::abs(r)});
      if (!std::isfinite(l) || !std::isfinite(r) || std::abs(l - r) > opts_.continuity_tol * scale ||
          std::abs(at - r) > opts_.continuity_tol * scale) {
        throw AssumptionViolation(clause, z, std::string(name) + " jumps at a breakpoint");
      }
    }
  }

  double growth_constant(const PiecewiseSmoothFn& f, double lipschitz) const {
    double jumps = 0.0;
    for (double z : f.breakpoints()) {
      const auto [l, r] = f.one_sided_limits(z);
      jumps += std::abs(l - r);
    }
    double ratio = 0.0;
    for (double x : x_) ratio = std::max(ratio, std::abs(f.eval(x)) / (1.0 + std::abs(x)));
    return std::max({std::abs(f.eval(0.0)) + jumps, lipschitz, ratio});
  }

 private:
  std::vector<double> x_;
  const ValidationOptions& opts_;
};

}  // namespace

LinearGrowthCertificate validate_assumption1(const JumpDiffusionModel& model, ValidationBox box,
                                             std::size_t n_samples, const ValidationOptions& options) {
  if (!(box.lo < box.hi) || !std::isfinite(box.lo) || !std::isfinite(box.hi)) {
    throw DomainError("validation box must be a finite non-empty interval");
  }
  if (n_samples < 2) throw DomainError("validation needs at least two samples");
  if (model.xi < box.lo || model.xi > box.hi) throw DomainError("validation box must contain the initial value");

  std::vector<double> samples;
  samples.reserve(n_samples + 16);
  for (std::size_t i = 0; i < n_samples; ++i) {
    samples.push_back(box.lo + (box.hi - box.lo) * static_cast<double>(i) / static_cast<double>(n_samples - 1));
  }
  for (const PiecewiseSmoothFn* f : {&model.mu, &model.sigma, &model.rho}) {
    for (double z : f->breakpoints()) {
      if (z < box.lo || z > box.hi) throw DomainError("validation box must contain every breakpoint");
      samples.push_back(z - options.breakpoint_offset);
      samples.push_back(z);
      samples.push_back(z + options.breakpoint_offset);
    }
  }
  samples.push_back(model.xi);
  if (box.lo <= 0.0 && 0.0 <= box.hi) samples.push_back(0.0);
  std::sort(samples.begin(), samples.end());
  samples.erase(std::unique(samples.begin(), samples.end()), samples.end());

  const Validator v(std::move(samples), options);
  using C = AssumptionClause;

  // (i) drift: piecewise Lipschitz with finite one-sided limits.
  for (double z : model.mu.breakpoints()) {
    const auto [l, r] = model.mu.one_sided_limits(z);
    if (!std::isfinite(l) || !std::isfinite(r)) throw AssumptionViolation(C::drift_piecewise_lipschitz, z, "mu limit not finite");
  }
  const double lip_mu =
      v.sampled_lipschitz(model.mu, [&](double x) { return model.mu.eval(x); }, C::drift_piecewise_lipschitz, "mu");

  // (ii) diffusion: Lipschitz and non-vanishing at drift breakpoints.
  v.check_continuity(model.sigma, C::diffusion_lipschitz_nonzero, "sigma");
  const double lip_sigma =
      v.sampled_lipschitz(model.sigma, [&](double x) { return model.sigma.eval(x); }, C::diffusion_lipschitz_nonzero, "sigma");
  for (double z : model.mu.breakpoints()) {
    if (model.sigma.eval(z) == 0.0) {
      throw AssumptionViolation(C::diffusion_lipschitz_nonzero, z, "sigma vanishes at a drift breakpoint");
    }
  }

  // (iii) jump coefficient: Lipschitz, in particular no value jumps.
  v.check_continuity(model.rho, C::jump_lipschitz, "rho");
  const double lip_rho = v.sampled_lipschitz(model.rho, [&](double x) { return model.rho.eval(x); }, C::jump_lipschitz, "rho");

  // (iv) drift and diffusion have Lipschitz derivatives on each piece.
  v.check_derivative(model.mu, "mu");
  v.check_derivative(model.sigma, "sigma");
  v.sampled_lipschitz(model.mu, [&](double x) { return model.mu.d(x); }, C::piece_derivatives, "mu'");
  v.sampled_lipschitz(model.sigma, [&](double x) { return model.sigma.d(x); }, C::piece_derivatives, "sigma'");

  return {v.growth_constant(model.mu, lip_mu), v.growth_constant(model.sigma, lip_sigma),
          v.growth_constant(model.rho, lip_rho)};
}

}  // namespace jaqm
