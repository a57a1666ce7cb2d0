#include "jaqm/experiments.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>

#include "jaqm/kernels/kernels.hpp"
#include "jaqm/parallel.hpp"

namespace jaqm {

namespace {

struct MeanAndError {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Sample mean and its standard error over non-excluded slots, summed in slot order.
template <class Get>
MeanAndError reduce_in_order(std::size_t n_paths, const std::vector<char>& excluded, Get&& get) {
  MeanAndError r;
  double sum = 0.0;
  for (std::size_t i = 0; i < n_paths; ++i) {
    if (excluded[i]) continue;
    sum += get(i);
    ++r.n;
  }
  if (r.n == 0) return r;
  r.mean = sum / static_cast<double>(r.n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n_paths; ++i) {
    if (excluded[i]) continue;
    const double d = get(i) - r.mean;
    ss += d * d;
  }
  if (r.n > 1) r.std_error = std::sqrt(ss / static_cast<double>(r.n - 1) / static_cast<double>(r.n));
  return r;
}

void check_resolutions(std::span<const std::int64_t> resolutions) {
  if (resolutions.empty()) throw DomainError("at least one resolution is required");
  for (std::size_t i = 0; i < resolutions.size(); ++i) {
    if (resolutions[i] < 1) throw DomainError("resolutions must be positive");
    if (i > 0 && resolutions[i] <= resolutions[i - 1]) throw DomainError("resolutions must be strictly increasing");
  }
}

void check_mc(const MonteCarloSettings& mc) {
  if (mc.n_paths < 1) throw DomainError("at least one path is required");
  if (!(mc.nu_fraction > 0.0 && mc.nu_fraction < 1.0)) throw DomainError("nu_fraction must lie in (0, 1)");
  if (!(mc.inversion_tol > 0.0)) throw DomainError("inversion tolerance must be positive");
}

void check_nesting(std::span<const std::int64_t> resolutions, std::int64_t reference) {
  for (auto M : resolutions) {
    if (reference % M != 0) throw DomainError("every resolution must divide the reference resolution");
  }
}

void oracle_trace(const Oracle& oracle, const PathRandomness& pr, MasterTrace& trace) {
  const auto t = pr.master.times();
  trace.post.resize(t.size());
  trace.pre_at_jumps.clear();
  std::size_t jumps = 0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (pr.master.is_jump(j)) {
      trace.pre_at_jumps.push_back(oracle(t[j], pr.w[j], jumps));
      ++jumps;
    }
    trace.post[j] = oracle(t[j], pr.w[j], jumps);
  }
}

constexpr double kRoundingUlps = 16.0;

double trace_distance(const MasterTrace& a, const MasterTrace& b) {
  double d = kernels::max_abs_diff(a.post, b.post);
  if (!a.pre_at_jumps.empty()) d = std::max(d, kernels::max_abs_diff(a.pre_at_jumps, b.pre_at_jumps));
  return d;
}

}  // namespace

std::int64_t default_reference_resolution(std::span<const std::int64_t> resolutions, bool has_oracle) {
  if (resolutions.empty()) throw DomainError("at least one resolution is required");
  const auto top = *std::max_element(resolutions.begin(), resolutions.end());
  return (has_oracle ? 8 : 64) * top;
}

void ExperimentSpec::validate() const {
  check_resolutions(resolutions);
  check_mc(mc);
  if (mc.n_paths < 100) throw DomainError("strong-error experiments need at least 100 paths");
  if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("moment order p must be at least 1");
  if (reference_resolution < 1) throw DomainError("reference resolution must be positive");
  if (!oracle && reference_resolution < 8 * resolutions.back()) {
    throw DomainError("self-reference needs a reference resolution of at least 8 max(M)");
  }
  check_nesting(resolutions, reference_resolution);
}

SlopeFit fit_log2_slope(std::span<const double> delta, std::span<const double> error) {
  SlopeFit fit;
  const std::size_t n = delta.size();
  if (n != error.size()) throw DomainError("slope fit needs matching inputs");
  if (n < 2) return fit;
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(delta[i] > 0.0) || !(error[i] > 0.0)) return fit;
    x[i] = std::log2(delta[i]);
    y[i] = std::log2(error[i]);
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) return fit;
  fit.defined = true;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  fit.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    fit.residuals[i] = y[i] - (fit.intercept + fit.slope * x[i]);
    ssr += fit.residuals[i] * fit.residuals[i];
  }
  if (n > 2) {
    const double se = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
    const boost::math::students_t dist(static_cast<double>(n - 2));
    const double q = boost::math::quantile(dist, 0.975);
    fit.ci_low = fit.slope - q * se;
    fit.ci_high = fit.slope + q * se;
  }
  return fit;
}

std::vector<ErrorReport> strong_errors(const ExperimentSpec& spec_in, std::span<const SchemeKind> schemes) {
  ExperimentSpec spec = spec_in;
  if (spec.reference_resolution == 0) {
    spec.reference_resolution = default_reference_resolution(spec.resolutions, static_cast<bool>(spec.oracle));
  }
  spec.validate();
  if (schemes.empty()) throw DomainError("at least one scheme is required");

  std::vector<Scheme> runners;
  for (auto kind : schemes) runners.emplace_back(spec.model, kind, spec.mc.nu_fraction, spec.mc.inversion_tol);

  const std::size_t n_paths = spec.mc.n_paths;
  const std::size_t n_res = spec.resolutions.size();
  const std::size_t n_schemes = runners.size();
  // errors[path][scheme][resolution]
  std::vector<double> errors(n_paths * n_schemes * n_res, 0.0);
  std::vector<char> excluded(n_paths, 0);
  std::vector<double> scale(n_paths, 0.0);  // max |reference| per path

  parallel_for(n_paths, spec.mc.workers, [&](std::size_t path) {
    try {
      const PathRandomness pr =
          draw_path_randomness(spec.model.T, spec.model.lambda, spec.reference_resolution, spec.mc.seed, path);
      MasterTrace reference;
      MasterTrace approx;
      if (spec.oracle) oracle_trace(spec.oracle, pr, reference);
      const DrivingPath master_drive = restrict_to(pr, pr.master);
      for (std::size_t s = 0; s < n_schemes; ++s) {
        if (!spec.oracle) interpolate_on_master(runners[s].simulate(master_drive), pr, reference);
        for (double v : reference.post) scale[path] = std::max(scale[path], std::abs(v));
        for (std::size_t r = 0; r < n_res; ++r) {
          const SamplePath path_m = runners[s].simulate(restrict_to(pr, spec.resolutions[r]));
          interpolate_on_master(path_m, pr, approx);
          errors[(path * n_schemes + s) * n_res + r] = trace_distance(reference, approx);
        }
      }
    } catch (const NumericError&) {
      excluded[path] = 1;
    }
  });

  const std::size_t n_excluded = static_cast<std::size_t>(std::count(excluded.begin(), excluded.end(), 1));
  std::vector<ErrorReport> reports;
  for (std::size_t s = 0; s < n_schemes; ++s) {
    ErrorReport rep;
    rep.scheme = runners[s].kind();
    rep.p = spec.p;
    rep.n_paths = n_paths;
    rep.excluded_paths = n_excluded;
    rep.exclusion_limit_exceeded = static_cast<double>(n_excluded) > 0.01 * static_cast<double>(n_paths);
    std::vector<double> deltas, errs;
    // exact: every pathwise error is at rounding level of the reference
    bool all_zero = true;
    for (std::size_t i = 0; i < n_paths && all_zero; ++i) {
      if (excluded[i]) continue;
      const double tol = kRoundingUlps * std::numeric_limits<double>::epsilon() * (1.0 + scale[i]);
      for (std::size_t r = 0; r < n_res; ++r) all_zero = all_zero && errors[(i * n_schemes + s) * n_res + r] <= tol;
    }
    for (std::size_t r = 0; r < n_res; ++r) {
      const auto stat = reduce_in_order(n_paths, excluded, [&](std::size_t i) {
        return std::pow(errors[(i * n_schemes + s) * n_res + r], spec.p);
      });
      ErrorRow row;
      row.M = spec.resolutions[r];
      row.delta = spec.model.T / static_cast<double>(row.M);
      row.error = std::pow(stat.mean, 1.0 / spec.p);
      row.std_error = row.error > 0.0 ? std::pow(row.error, 1.0 - spec.p) / spec.p * stat.std_error : 0.0;
      row.n_effective = stat.n;
      deltas.push_back(row.delta);
      errs.push_back(row.error);
      rep.rows.push_back(row);
    }
    rep.exact = all_zero && n_excluded < n_paths;
    if (!rep.exact) rep.fit = fit_log2_slope(deltas, errs);
    reports.push_back(std::move(rep));
  }
  return reports;
}

ErrorReport strong_error(const ExperimentSpec& spec) {
  const SchemeKind kinds[] = {spec.scheme};
  return std::move(strong_errors(spec, kinds).front());
}

ComparisonReport compare_schemes(const ExperimentSpec& spec, SchemeKind baseline, SchemeKind candidate) {
  const SchemeKind kinds[] = {baseline, candidate};
  auto reports = strong_errors(spec, kinds);
  ComparisonReport cmp{std::move(reports[0]), std::move(reports[1]), {}, false};
  const std::size_t n = cmp.baseline.rows.size();
  for (std::size_t r = 0; r < n; ++r) {
    const double b = cmp.baseline.rows[r].error;
    cmp.ratio.push_back(b > 0.0 ? cmp.candidate.rows[r].error / b : std::numeric_limits<double>::quiet_NaN());
  }
  cmp.candidate_better_at_finest_two = n >= 2;
  for (std::size_t r = n >= 2 ? n - 2 : 0; r < n; ++r) {
    cmp.candidate_better_at_finest_two =
        cmp.candidate_better_at_finest_two && cmp.candidate.rows[r].error < cmp.baseline.rows[r].error;
  }
  return cmp;
}

OccupationReport occupation_study(const OccupationSpec& spec_in) {
  OccupationSpec spec = spec_in;
  check_resolutions(spec.resolutions);
  check_mc(spec.mc);
  if (spec.eps.empty()) throw DomainError("at least one eps is required");
  for (double e : spec.eps) {
    if (!(e > 0.0)) throw DomainError("eps must be positive");
  }
  if (spec.reference_resolution == 0) spec.reference_resolution = 8 * spec.resolutions.back();
  check_nesting(spec.resolutions, spec.reference_resolution);

  const Scheme runner(spec.model, spec.scheme, spec.mc.nu_fraction, spec.mc.inversion_tol);
  const std::size_t n_paths = spec.mc.n_paths;
  const std::size_t n_res = spec.resolutions.size();
  const std::size_t n_eps = spec.eps.size();
  std::vector<double> occ(n_paths * n_res * n_eps, 0.0);
  std::vector<char> excluded(n_paths, 0);
  std::vector<double> scale(n_paths, 0.0);  // max |reference| per path

  parallel_for(n_paths, spec.mc.workers, [&](std::size_t path) {
    try {
      const PathRandomness pr =
          draw_path_randomness(spec.model.T, spec.model.lambda, spec.reference_resolution, spec.mc.seed, path);
      const auto t = pr.master.times();
      std::vector<double> weights(t.size(), 0.0);
      for (std::size_t j = 0; j + 1 < t.size(); ++j) weights[j] = t[j + 1] - t[j];
      MasterTrace trace;
      for (std::size_t r = 0; r < n_res; ++r) {
        interpolate_state_on_master(runner.simulate(restrict_to(pr, spec.resolutions[r])), pr, trace);
        for (std::size_t e = 0; e < n_eps; ++e) {
          occ[(path * n_res + r) * n_eps + e] = kernels::band_occupancy(trace.post, weights, spec.zeta, spec.eps[e]);
        }
      }
    } catch (const NumericError&) {
      excluded[path] = 1;
    }
  });

  OccupationReport rep;
  rep.zeta = spec.zeta;
  rep.resolutions = spec.resolutions;
  rep.eps = spec.eps;
  rep.excluded_paths = static_cast<std::size_t>(std::count(excluded.begin(), excluded.end(), 1));
  rep.estimate.assign(n_res, std::vector<double>(n_eps));
  rep.std_error.assign(n_res, std::vector<double>(n_eps));
  for (std::size_t r = 0; r < n_res; ++r) {
    for (std::size_t e = 0; e < n_eps; ++e) {
      const auto stat =
          reduce_in_order(n_paths, excluded, [&](std::size_t i) { return occ[(i * n_res + r) * n_eps + e]; });
      rep.estimate[r][e] = stat.mean;
      rep.std_error[r][e] = stat.std_error;
    }
  }

  rep.monotone_in_eps = true;
  for (std::size_t r = 0; r < n_res; ++r) {
    for (std::size_t a = 0; a < n_eps; ++a) {
      for (std::size_t b = 0; b < n_eps; ++b) {
        if (spec.eps[a] > spec.eps[b] && !(rep.estimate[r][a] > rep.estimate[r][b])) rep.monotone_in_eps = false;
      }
    }
  }

  const Eigen::Index rows = static_cast<Eigen::Index>(n_res * n_eps);
  if (rows >= 3) {
    Eigen::MatrixXd X(rows, 3);
    Eigen::VectorXd y(rows);
    Eigen::Index k = 0;
    for (std::size_t r = 0; r < n_res; ++r) {
      const double sqrt_delta = std::sqrt(spec.model.T / static_cast<double>(spec.resolutions[r]));
      for (std::size_t e = 0; e < n_eps; ++e, ++k) {
        X(k, 0) = 1.0;
        X(k, 1) = spec.eps[e];
        X(k, 2) = sqrt_delta;
        y(k) = rep.estimate[r][e];
      }
    }
    const Eigen::Vector3d beta = X.colPivHouseholderQr().solve(y);
    rep.fit = {beta(0), beta(1), beta(2)};
  }
  return rep;
}

double occupation_time(const JumpDiffusionModel& model, SchemeKind scheme, double zeta, double eps, std::int64_t M,
                       const MonteCarloSettings& mc) {
  OccupationSpec spec{model, scheme, zeta, {eps}, {M}, 0, mc};
  return occupation_study(spec).estimate[0][0];
}

MomentReport moment_diagnostic(const JumpDiffusionModel& model, SchemeKind scheme, double p,
                               std::span<const std::int64_t> resolutions, const MonteCarloSettings& mc) {
  check_resolutions(resolutions);
  check_mc(mc);
  if (!(p >= 2.0) || !std::isfinite(p)) throw DomainError("moment diagnostic needs p >= 2");
  const std::int64_t master = resolutions.back();
  check_nesting(resolutions, master);

  const Scheme runner(model, scheme, mc.nu_fraction, mc.inversion_tol);
  const std::size_t n_res = resolutions.size();
  std::vector<double> sup_p(mc.n_paths * n_res, 0.0);
  std::vector<char> excluded(mc.n_paths, 0);

  parallel_for(mc.n_paths, mc.workers, [&](std::size_t path) {
    try {
      const PathRandomness pr = draw_path_randomness(model.T, model.lambda, master, mc.seed, path);
      for (std::size_t r = 0; r < n_res; ++r) {
        const SamplePath sp = runner.simulate(restrict_to(pr, resolutions[r]));
        double m = 0.0;
        for (double z : sp.values) m = std::max(m, std::abs(z));
        sup_p[path * n_res + r] = std::pow(m, p);
      }
    } catch (const NumericError&) {
      excluded[path] = 1;
    }
  });

  MomentReport rep;
  rep.p = p;
  rep.resolutions.assign(resolutions.begin(), resolutions.end());
  rep.excluded_paths = static_cast<std::size_t>(std::count(excluded.begin(), excluded.end(), 1));
  for (std::size_t r = 0; r < n_res; ++r) {
    const auto stat = reduce_in_order(mc.n_paths, excluded, [&](std::size_t i) { return sup_p[i * n_res + r]; });
    rep.moment.push_back(stat.mean);
    rep.std_error.push_back(stat.std_error);
  }
  const auto [lo, hi] = std::minmax_element(rep.moment.begin(), rep.moment.end());
  rep.max_min_ratio = *lo > 0.0 ? *hi / *lo : (*hi > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
  rep.growth_flagged = rep.max_min_ratio > 1.2;
  return rep;
}

}  // namespace jaqm
