#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "jaqm/errors.hpp"
#include "jaqm/fixtures.hpp"
#include "jaqm/pieces.hpp"
#include "jaqm/transform.hpp"

using namespace jaqm;

namespace {

JumpDiffusionModel sign_drift_model() {
  return JumpDiffusionModel(PiecewiseSmoothFn({0.0}, {pieces::constant(1.0), pieces::constant(-1.0)}),
                            pieces::smooth(pieces::constant(1.0)), pieces::smooth(pieces::linear(0.25)), 0.1, 1.0, 1.0);
}

// Three breakpoints with different jump sizes and a non-constant sigma.
JumpDiffusionModel three_step_model() {
  return JumpDiffusionModel(
      PiecewiseSmoothFn({-1.0, 0.2, 1.5}, {pieces::constant(2.0), pieces::affine(0.5, -0.3), pieces::linear(1.0),
                                           pieces::affine(-1.0, 0.1)}),
      pieces::smooth(pieces::sine(0.3, 1.0, 0.0, 1.0)), pieces::smooth(pieces::affine(0.1, -0.2)), 0.0, 1.0, 1.0);
}

std::vector<JumpDiffusionModel> discontinuous_models() {
  return {sign_drift_model(), make_fixture("double-step").model, three_step_model()};
}

struct Support {
  double lo, hi;
};

Support support_of(const TransformG& g) {
  return {g.zetas().front() - g.nu(), g.zetas().back() + g.nu()};
}

}  // namespace

TEST(Bump, Values) {
  EXPECT_EQ(bump(0.0), 1.0);
  EXPECT_EQ(bump(1.0), 0.0);
  EXPECT_EQ(bump(-1.0), 0.0);
  EXPECT_EQ(bump(2.0), 0.0);
  EXPECT_EQ(bump(-2.0), 0.0);
  EXPECT_DOUBLE_EQ(bump(0.5), std::pow(0.75, 4));
}

TEST(TransformBuild, IdentityWithoutBreakpoints) {
  const auto g = TransformG::build(make_fixture("gbm-jump").model, 0.5);
  EXPECT_TRUE(g.is_identity());
  for (double x : {-3.0, 0.0, 0.7, 12.5}) {
    EXPECT_EQ(g.value(x), x);
    EXPECT_EQ(g.prime(x), 1.0);
    EXPECT_EQ(g.second(x), 0.0);
    EXPECT_EQ(g.inverse(x), x);
  }
}

TEST(TransformBuild, SignSwitchAlpha) {
  const auto g = TransformG::build(sign_drift_model(), 0.5);
  ASSERT_EQ(g.alphas().size(), 1u);
  EXPECT_EQ(g.alphas()[0], 1.0);  // (1 - (-1)) / (2 * 1)
  EXPECT_EQ(g.nu(), 0.5 * 0.125);
}

TEST(TransformBuild, NuBound) {
  const std::vector<double> z{0.0, 0.1};
  const std::vector<double> a{0.5, -2.0};
  EXPECT_DOUBLE_EQ(TransformG::nu_upper_bound(z, a), std::min({1.0 / 4.0, 1.0 / 16.0, 0.05}));
  EXPECT_TRUE(std::isinf(TransformG::nu_upper_bound({}, {})));
  EXPECT_THROW(TransformG({0.0}, {1.0}, 0.125), DomainError);
  EXPECT_THROW(TransformG({0.0}, {1.0}, 0.0), DomainError);
  EXPECT_NO_THROW(TransformG({0.0}, {1.0}, 0.124));
  EXPECT_THROW(TransformG::build(sign_drift_model(), 1.0), DomainError);
}

TEST(TransformBuild, SecondDerivativeExtension) {
  // mu(0) fixed at 0.5: G''(0) = 2 alpha + 2 (mu(0+) - mu(0)) / sigma^2 = 2 + 2 (-1 - 0.5) = -1
  const JumpDiffusionModel m(
      PiecewiseSmoothFn({0.0}, {pieces::constant(1.0), pieces::constant(-1.0)}, {BreakpointValue::fixed(0.5)}),
      pieces::smooth(pieces::constant(1.0)), pieces::smooth(pieces::constant(0.0)), 0.1, 1.0, 1.0);
  const auto g = TransformG::build(m, 0.5);
  EXPECT_DOUBLE_EQ(g.second(0.0), -1.0);
  // right-limit convention: the extension term vanishes
  EXPECT_EQ(TransformG::build(sign_drift_model(), 0.5).second(0.0), 2.0);
}

TEST(TransformProperties, FixesBreakpointsWithUnitSlope) {
  for (const auto& m : discontinuous_models()) {
    const auto g = TransformG::build(m, 0.5);
    for (double z : g.zetas()) {
      EXPECT_EQ(g.value(z), z);
      EXPECT_NEAR(g.prime(z), 1.0, 1e-12);
    }
  }
}

TEST(TransformProperties, IdentityOutsideBumps) {
  for (const auto& m : discontinuous_models()) {
    const auto g = TransformG::build(m, 0.5);
    const auto s = support_of(g);
    for (double x = s.lo - 3.0; x <= s.hi + 3.0; x += 1e-3) {
      const bool inside = std::any_of(g.zetas().begin(), g.zetas().end(),
                                      [&](double z) { return std::abs(x - z) < g.nu(); });
      if (inside) continue;
      EXPECT_EQ(g.prime(x), 1.0) << x;
      EXPECT_EQ(g.value(x), x) << x;
      EXPECT_EQ(g.inverse(x), x) << x;
    }
  }
}

TEST(TransformProperties, SecondDerivativeOneSidedLimits) {
  for (const auto& m : discontinuous_models()) {
    const auto g = TransformG::build(m, 0.5);
    for (std::size_t i = 0; i < g.zetas().size(); ++i) {
      const double z = g.zetas()[i];
      const double a = g.alphas()[i];
      const auto [lo, hi] = g.second_limits(i);
      EXPECT_EQ(lo, -2.0 * a);
      EXPECT_EQ(hi, 2.0 * a);
      for (double h : {1e-10, 1e-11}) {
        EXPECT_NEAR(g.second(z - h), -2.0 * a, 1e-8);
        EXPECT_NEAR(g.second(z + h), 2.0 * a, 1e-8);
      }
    }
  }
}

TEST(TransformProperties, DerivativesMatchFiniteDifferences) {
  for (const auto& m : discontinuous_models()) {
    const auto g = TransformG::build(m, 0.5);
    const auto s = support_of(g);
    const double h = 1e-6;
    for (double x = s.lo - 0.1; x <= s.hi + 0.1; x += g.nu() / 37.0) {
      const bool near_zeta = std::any_of(g.zetas().begin(), g.zetas().end(),
                                         [&](double z) { return std::abs(x - z) <= 2 * h; });
      if (near_zeta) continue;
      const double d1 = (g.value(x + h) - g.value(x - h)) / (2 * h);
      const double d2 = (g.prime(x + h) - g.prime(x - h)) / (2 * h);
      EXPECT_NEAR(g.prime(x), d1, 1e-6 * std::max(1.0, std::abs(d1))) << x;
      EXPECT_NEAR(g.second(x), d2, 1e-6 * std::max(1.0, std::abs(d2)) + 1e-5) << x;
    }
  }
}

TEST(TransformProperties, StrictlyMonotone) {
  std::mt19937_64 rng(20241);
  for (const auto& m : discontinuous_models()) {
    const auto g = TransformG::build(m, 0.5);
    const auto s = support_of(g);
    std::uniform_real_distribution<double> u(s.lo - 0.05, s.hi + 0.05);
    for (int k = 0; k < 100000; ++k) {
      double a = u(rng);
      double b = u(rng);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      ASSERT_LT(g.value(a), g.value(b)) << a << " " << b;
    }
    double min_prime = std::numeric_limits<double>::infinity();
    for (double x = s.lo; x <= s.hi; x += 1e-4) min_prime = std::min(min_prime, g.prime(x));
    EXPECT_GT(min_prime, 0.0);
  }
}

TEST(TransformInverse, RoundTrip) {
  std::mt19937_64 rng(7);
  for (const auto& m : discontinuous_models()) {
    const auto g = TransformG::build(m, 0.5);
    const auto s = support_of(g);
    std::uniform_real_distribution<double> u(s.lo - 0.1, s.hi + 0.1);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const double x = u(rng);
      worst = std::max(worst, std::abs(g.inverse(g.value(x)) - x));
    }
    EXPECT_LE(worst, 1e-10);
  }
}

TEST(TransformInverse, ResidualWithinTolerance) {
  const auto g = TransformG::build(three_step_model(), 0.9);
  for (double y = -2.0; y <= 2.0; y += 1e-3) {
    for (double tol : {1e-6, 1e-12}) EXPECT_LE(std::abs(g.value(g.inverse(y, tol)) - y), tol);
  }
}

TEST(TransformInverse, BadInput) {
  const auto g = TransformG::build(sign_drift_model(), 0.5);
  EXPECT_THROW(g.inverse(std::numeric_limits<double>::quiet_NaN()), DomainError);
  EXPECT_THROW(g.inverse(0.01, 0.0), DomainError);
}

TEST(TransformedModel, IdentityTransformKeepsCoefficients) {
  const auto m = make_fixture("lipschitz-mix").model;
  const TransformedModel t(m, TransformG::build(m, 0.5));
  for (double z = -2.0; z <= 2.0; z += 0.013) {
    const auto c = t.at(z);
    EXPECT_EQ(c.drift, m.mu.eval(z));
    EXPECT_EQ(c.diffusion, m.sigma.eval(z));
    EXPECT_EQ(c.diffusion_slope, m.sigma.d(z));
    EXPECT_EQ(t.jump(z), z + m.rho.eval(z));
  }
  EXPECT_EQ(t.xi_t(), m.xi);
}

TEST(TransformedModel, DriftContinuousAtKinks) {
  for (const auto& m : discontinuous_models()) {
    const TransformedModel t(m, TransformG::build(m, 0.5), 1e-14);
    ASSERT_FALSE(t.zeta_t().empty());
    for (double z : t.zeta_t()) {
      const double h = 1e-9;
      EXPECT_NEAR(t.mu_t(z - h), t.mu_t(z + h), 1e-6) << "kink at " << z;
    }
  }
  // Without the transform the drift jumps by 2 at 0.
  const auto m = sign_drift_model();
  EXPECT_NEAR(std::abs(m.mu.eval(-1e-9) - m.mu.eval(1e-9)), 2.0, 1e-12);
}

// Ito's formula, with G' and G'' taken by finite differences of G alone.
TEST(TransformedModel, CoefficientsFollowItoFormula) {
  for (const auto& m : discontinuous_models()) {
    const auto g = TransformG::build(m, 0.5);
    const TransformedModel t(m, g, 1e-14);
    const double h = 1e-5;
    for (double x = g.zetas().front() - 2 * g.nu(); x <= g.zetas().back() + 2 * g.nu(); x += g.nu() / 11.3) {
      const bool near_zeta = std::any_of(g.zetas().begin(), g.zetas().end(),
                                         [&](double z) { return std::abs(x - z) <= 3 * h; });
      if (near_zeta || m.mu.is_breakpoint(x)) continue;
      const double g1 = (g.value(x + h) - g.value(x - h)) / (2 * h);
      const double g2 = (g.value(x + h) - 2 * g.value(x) + g.value(x - h)) / (h * h);
      const double s = m.sigma.eval(x);
      const double z = g.value(x);
      EXPECT_NEAR(t.mu_t(z), g1 * m.mu.eval(x) + 0.5 * g2 * s * s, 1e-3) << x;
      // central-difference truncation is about h^2 |G'''| / 6, and |G'''| reaches 1e3 here
      EXPECT_NEAR(t.sigma_t(z), g1 * s, 1e-6) << x;
      EXPECT_NEAR(t.rho_t(z), g.value(x + m.rho.eval(x)) - z, 1e-9) << x;
    }
  }
}

TEST(TransformedModel, DiffusionSlopeMatchesFiniteDifferences) {
  for (const auto& m : discontinuous_models()) {
    const TransformedModel t(m, TransformG::build(m, 0.5), 1e-14);
    const double h = 1e-7;
    for (double z = -2.0; z <= 2.0; z += 0.00731) {
      const bool near_kink = std::any_of(t.eta_t().begin(), t.eta_t().end(),
                                         [&](double e) { return std::abs(z - e) <= 2 * h; });
      if (near_kink) continue;
      const double fd = (t.sigma_t(z + h) - t.sigma_t(z - h)) / (2 * h);
      EXPECT_NEAR(t.d_sigma_t(z), fd, 1e-5 * std::max(1.0, std::abs(fd))) << z;
    }
    for (double e : t.eta_t()) {
      EXPECT_EQ(t.d_sigma_t(e), 0.0);
      EXPECT_NE(t.sigma_t(e), 0.0);
    }
    for (double z : t.zeta_t()) EXPECT_NE(t.sigma_t(z), 0.0);
  }
}

TEST(TransformedModel, ZeroJumpCoefficientStaysZero) {
  const JumpDiffusionModel m(PiecewiseSmoothFn({0.0}, {pieces::constant(1.0), pieces::constant(-1.0)}),
                             pieces::smooth(pieces::constant(1.0)), pieces::smooth(pieces::constant(0.0)), 0.1, 1.0,
                             1.0);
  const TransformedModel t(m, TransformG::build(m, 0.5));
  for (double z = -0.3; z <= 0.3; z += 0.0017) EXPECT_EQ(t.rho_t(z), 0.0) << z;
}

TEST(TransformedModel, JumpCoefficientLipschitzIsStable) {
  const auto m = make_fixture("double-step").model;
  const TransformedModel t(m, TransformG::build(m, 0.5), 1e-14);
  auto sampled = [&](int n) {
    double lip = 0.0;
    double prev_z = -3.0;
    double prev = t.rho_t(prev_z);
    for (int i = 1; i <= n; ++i) {
      const double z = -3.0 + 6.0 * i / n;
      const double v = t.rho_t(z);
      lip = std::max(lip, std::abs(v - prev) / (z - prev_z));
      prev_z = z;
      prev = v;
    }
    return lip;
  };
  const double coarse = sampled(20000);
  const double fine = sampled(80000);
  EXPECT_TRUE(std::isfinite(fine));
  EXPECT_LT(std::abs(fine - coarse), 0.05 * coarse);
}
