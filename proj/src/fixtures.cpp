#include "jaqm/fixtures.hpp"

#include <cmath>
#include <sstream>

#include "jaqm/pieces.hpp"

namespace jaqm {

namespace {

using pieces::smooth;

struct CatalogueEntry {
  const char* name;
  ModelFixture (*make)(const FixtureOverrides&);
};

ModelFixture gbm_jump(const FixtureOverrides& o) {
  return geometric_jump_fixture(0.05, 0.2, -0.1, o.xi.value_or(1.0), o.T.value_or(1.0), o.lambda.value_or(2.0));
}

ModelFixture sign_drift(const FixtureOverrides& o) {
  PiecewiseSmoothFn mu({0.0}, {pieces::constant(1.0), pieces::constant(-1.0)});
  JumpDiffusionModel m(std::move(mu), smooth(pieces::constant(1.0)), smooth(pieces::linear(0.25)), o.xi.value_or(0.1),
                       o.T.value_or(1.0), o.lambda.value_or(1.0));
  return {"sign-drift", "mu = 1_{x<0} - 1_{x>=0}, sigma = 1, rho = x/4", std::move(m), {}, "none (self-reference)"};
}

ModelFixture lipschitz_mix(const FixtureOverrides& o) {
  JumpDiffusionModel m(smooth(pieces::affine(0.5, -0.5)), smooth(pieces::sine(0.2, 1.0, 0.0, 0.3)),
                       smooth(pieces::linear(-0.2)), o.xi.value_or(1.0), o.T.value_or(1.0), o.lambda.value_or(2.0));
  return {"lipschitz-mix", "mu = 0.5 - 0.5x, sigma = 0.3 + 0.2 sin(x), rho = -0.2x", std::move(m), {},
          "none (self-reference)"};
}

ModelFixture double_step(const FixtureOverrides& o) {
  PiecewiseSmoothFn mu({-0.5, 0.5}, {pieces::affine(1.0, -0.5), pieces::linear(-0.5), pieces::affine(-1.0, -0.5)});
  JumpDiffusionModel m(std::move(mu), smooth(pieces::sine(0.25, 1.0, 0.0, 0.5)), smooth(pieces::affine(0.1, -0.2)),
                       o.xi.value_or(0.2), o.T.value_or(1.0), o.lambda.value_or(1.5));
  return {"double-step",
          "mu = -0.5x + (1 on x<-0.5, 0 on [-0.5,0.5), -1 on x>=0.5), sigma = 0.5 + 0.25 sin(x), rho = 0.1 - 0.2x",
          std::move(m), {}, "none (self-reference)"};
}

ModelFixture constant_drift(const FixtureOverrides& o) {
  const double xi = o.xi.value_or(1.0);
  JumpDiffusionModel m(smooth(pieces::constant(0.5)), smooth(pieces::constant(0.0)), smooth(pieces::constant(0.0)), xi,
                       o.T.value_or(1.0), o.lambda.value_or(1.0));
  return {"constant-drift", "mu = 0.5, sigma = 0, rho = 0", std::move(m),
          [xi](double t, double, std::size_t) { return xi + 0.5 * t; }, "closed form xi + 0.5 t"};
}

ModelFixture frozen(const FixtureOverrides& o) {
  const double xi = o.xi.value_or(1.0);
  JumpDiffusionModel m(smooth(pieces::constant(0.0)), smooth(pieces::constant(0.0)), smooth(pieces::constant(0.0)), xi,
                       o.T.value_or(1.0), o.lambda.value_or(1.0));
  return {"frozen", "mu = 0, sigma = 0, rho = 0", std::move(m), [xi](double, double, std::size_t) { return xi; },
          "closed form xi"};
}

constexpr CatalogueEntry kCatalogue[] = {
    {"gbm-jump", &gbm_jump},       {"sign-drift", &sign_drift},         {"lipschitz-mix", &lipschitz_mix},
    {"double-step", &double_step}, {"constant-drift", &constant_drift}, {"frozen", &frozen},
};

}  // namespace

ModelFixture geometric_jump_fixture(double a, double b, double c, double xi, double T, double lambda) {
  JumpDiffusionModel m(smooth(pieces::linear(a)), smooth(pieces::linear(b)), smooth(pieces::linear(c)), xi, T, lambda);
  std::ostringstream formulas;
  formulas << "mu = " << a << "x, sigma = " << b << "x, rho = " << c << "x";
  const double drift = a - 0.5 * b * b;
  return {"gbm-jump", formulas.str(), std::move(m),
          [=](double t, double w, std::size_t n) {
            return xi * std::exp(drift * t + b * w) * std::pow(1.0 + c, static_cast<double>(n));
          },
          "closed form xi exp((a - b^2/2) t + b W_t) (1 + c)^N_t"};
}

std::vector<std::string> fixture_names() {
  std::vector<std::string> names;
  for (const auto& e : kCatalogue) names.emplace_back(e.name);
  return names;
}

ModelFixture make_fixture(std::string_view name, const FixtureOverrides& overrides) {
  for (const auto& e : kCatalogue) {
    if (name == e.name) return e.make(overrides);
  }
  std::string msg = "unknown model '" + std::string(name) + "'; valid names:";
  for (const auto& e : kCatalogue) msg += std::string(" ") + e.name;
  throw ConfigError(msg);
}

std::string describe_fixture(const ModelFixture& f) {
  std::ostringstream os;
  os << f.name << "\n";
  os << "  " << f.formulas << "\n";
  os << "  mu:    " << f.model.mu.describe() << "\n";
  os << "  sigma: " << f.model.sigma.describe() << "\n";
  os << "  rho:   " << f.model.rho.describe() << "\n";
  os << "  drift breakpoints:";
  if (f.model.mu.breakpoints().empty()) os << " none";
  for (double z : f.model.mu.breakpoints()) os << " " << z;
  os << "\n";
  os << "  xi = " << f.model.xi << ", T = " << f.model.T << ", lambda = " << f.model.lambda << "\n";
  os << "  oracle: " << f.oracle_description << "\n";
  return os.str();
}

}  // namespace jaqm
