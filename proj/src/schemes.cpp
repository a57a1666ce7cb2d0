#include "jaqm/schemes.hpp"

#include <algorithm>
#include <cmath>

namespace jaqm {

std::string_view scheme_name(SchemeKind kind) noexcept {
  switch (kind) {
    case SchemeKind::euler_jump_adapted:
      return "euler_jump_adapted";
    case SchemeKind::quasi_milstein_jump_adapted:
      return "quasi_milstein_jump_adapted";
    case SchemeKind::transformed_quasi_milstein:
      return "transformed_quasi_milstein";
  }
  return "unknown";
}

std::optional<SchemeKind> parse_scheme(std::string_view name) noexcept {
  if (name == "euler" || name == "euler_jump_adapted") return SchemeKind::euler_jump_adapted;
  if (name == "milstein" || name == "quasi_milstein" || name == "quasi_milstein_jump_adapted") {
    return SchemeKind::quasi_milstein_jump_adapted;
  }
  if (name == "transformed" || name == "transformed_quasi_milstein") return SchemeKind::transformed_quasi_milstein;
  return std::nullopt;
}

Scheme::Scheme(const JumpDiffusionModel& model, SchemeKind kind, double nu_fraction, double inversion_tol)
    : model_(model), kind_(kind) {
  if (kind_ == SchemeKind::transformed_quasi_milstein) {
    transformed_ = std::make_shared<const TransformedModel>(model_, TransformG::build(model_, nu_fraction),
                                                            inversion_tol);
  }
}

SamplePath Scheme::simulate(const DrivingPath& drive) const {
  switch (kind_) {
    case SchemeKind::euler_jump_adapted:
      return simulate_with(DirectCoefficients(model_), model_.xi, drive, {.milstein_correction = false});
    case SchemeKind::quasi_milstein_jump_adapted:
      return simulate_with(DirectCoefficients(model_), model_.xi, drive);
    case SchemeKind::transformed_quasi_milstein: {
      SamplePath p = simulate_with(*transformed_, transformed_->xi_t(), drive);
      p.transformed = transformed_;
      return p;
    }
  }
  throw DomainError("unknown scheme kind");
}

std::vector<double> output_values(const SamplePath& path) {
  std::vector<double> out(path.values.size());
  std::transform(path.values.begin(), path.values.end(), out.begin(), [&](double z) { return path.to_output(z); });
  return out;
}

double interpolate(const SamplePath& path, const PathRandomness& pr, double t) {
  const auto mt = pr.master.times();
  const auto it = std::lower_bound(mt.begin(), mt.end(), t);
  if (it == mt.end() || *it != t) throw DomainError("interpolate: t is not a master grid point");
  const std::size_t j = static_cast<std::size_t>(it - mt.begin());
  const auto& mi = path.master_index;
  const auto pos = std::lower_bound(mi.begin(), mi.end(), j);
  if (pos != mi.end() && *pos == j) return path.to_output(path.values[pos - mi.begin()]);
  const std::size_t n = static_cast<std::size_t>(pos - mi.begin()) - 1;
  const double dt = t - path.times[n];
  const double dw = pr.w[j] - path.w[n];
  const double z = ((path.values[n] + path.drift[n] * dt) + path.diffusion[n] * dw) + path.correction[n] * (dw * dw - dt);
  return path.to_output(z);
}

void interpolate_state_on_master(const SamplePath& path, const PathRandomness& pr, MasterTrace& trace) {
  const std::size_t n_master = pr.master.size();
  const auto mt = pr.master.times();
  trace.post.resize(n_master);
  trace.pre_at_jumps.clear();
  trace.post[0] = path.values[0];
  for (std::size_t n = 0; n + 1 < path.size(); ++n) {
    const std::size_t a = path.master_index[n];
    const std::size_t b = path.master_index[n + 1];
    const kernels::IntervalCoefficients c{path.times[n], path.w[n], path.values[n],
                                          path.drift[n], path.diffusion[n], path.correction[n]};
    if (b > a + 1) {
      kernels::interval_interpolant(mt.subspan(a + 1, b - a - 1), std::span<const double>(pr.w).subspan(a + 1, b - a - 1),
                                    c, std::span<double>(trace.post).subspan(a + 1, b - a - 1));
    }
    trace.post[b] = path.values[n + 1];
    if (path.is_jump(n + 1)) trace.pre_at_jumps.push_back(path.pre_jump_values[n + 1]);
  }
}

void interpolate_on_master(const SamplePath& path, const PathRandomness& pr, MasterTrace& trace) {
  interpolate_state_on_master(path, pr, trace);
  if (!path.transformed) return;
  const auto& tm = *path.transformed;
  for (double& z : trace.post) z = tm.to_original(z);
  for (double& z : trace.pre_at_jumps) z = tm.to_original(z);
}

}  // namespace jaqm
