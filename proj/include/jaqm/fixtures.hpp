#pragma once

// Built-in model catalogue.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jaqm/coefficients.hpp"

namespace jaqm {

/// Exact solution X_t as a function of (t, W_t, N_t).
using Oracle = std::function<double(double t, double w, std::size_t jumps)>;

struct ModelFixture {
  std::string name;
  std::string formulas;
  JumpDiffusionModel model;
  Oracle oracle;  // empty: strong errors use a self-reference
  std::string oracle_description;

  bool has_oracle() const noexcept { return static_cast<bool>(oracle); }
};

struct FixtureOverrides {
  std::optional<double> xi;
  std::optional<double> T;
  std::optional<double> lambda;
};

std::vector<std::string> fixture_names();

/// Throws ConfigError listing the valid names when `name` is unknown.
ModelFixture make_fixture(std::string_view name, const FixtureOverrides& overrides = {});

/// Multi-line human-readable catalogue entry.
std::string describe_fixture(const ModelFixture& fixture);

/// Geometric jump-diffusion dX = aX dt + bX dW + cX- dN and its closed-form solution.
ModelFixture geometric_jump_fixture(double a, double b, double c, double xi, double T, double lambda);

}  // namespace jaqm
