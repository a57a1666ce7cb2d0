// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "jaqm/experiments.hpp"
#include "jaqm/fixtures.hpp"
#include "jaqm/randomness_grid.hpp"
#include "jaqm/schemes.hpp"
#include "jaqm/transform.hpp"

using namespace jaqm;

namespace {

// Tolerances and bands.
constexpr double kOracleSlopeMin = 0.9, kOracleSlopeMax = 1.15;
constexpr double kTransformedSlopeMin = 0.65, kTransformedSlopeMax = 1.1;
constexpr double kEulerSlopeMin = 0.4, kEulerSlopeMax = 0.65;
constexpr double kGPrimeAtZetaTol = 1e-12;
constexpr double kGSecondLimitTol = 1e-8;
constexpr double kRoundTripTol = 1e-10;
constexpr double kDriftKinkTol = 1e-6;
constexpr double kMomentRatioMax = 1.2;
constexpr std::size_t kPaths = 2000;
constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<std::int64_t> m_range(int lo, int hi) {
  std::vector<std::int64_t> out;
  for (int k = lo; k <= hi; ++k) out.push_back(std::int64_t{1} << k);
  return out;
}

MonteCarloSettings mc(std::size_t paths) {
  MonteCarloSettings s;
  s.n_paths = paths;
  s.seed = kSeed;
  s.workers = 0;
  return s;
}

std::string rows_text(const ErrorReport& rep) {
  std::string s;
  for (const auto& r : rep.rows) s += fmt(" %lld:%.3e", static_cast<long long>(r.M), r.error);
  return s;
}

Outcome oracle_convergence() {
  const auto f = make_fixture("gbm-jump");
  ExperimentSpec spec{f.model, f.oracle, SchemeKind::quasi_milstein_jump_adapted, m_range(4, 9), 0, 2.0, mc(kPaths)};
  const auto rep = strong_error(spec);
  const bool ok = rep.fit.defined && rep.fit.slope >= kOracleSlopeMin && rep.fit.slope <= kOracleSlopeMax &&
                  !rep.exclusion_limit_exceeded;
  return {ok, fmt("quasi-Milstein slope %.4f (CI %.4f..%.4f), band [%.2f, %.2f], excluded %zu;", rep.fit.slope,
                  rep.fit.ci_low, rep.fit.ci_high, kOracleSlopeMin, kOracleSlopeMax, rep.excluded_paths) +
                  rows_text(rep)};
}

Outcome transformed_convergence() {
  const auto f = make_fixture("sign-drift");
  ExperimentSpec spec{f.model, {}, SchemeKind::transformed_quasi_milstein, m_range(4, 9), std::int64_t{1} << 15, 2.0,
                      mc(kPaths)};
  const auto rep = strong_error(spec);
  const bool ok = rep.fit.defined && rep.fit.slope >= kTransformedSlopeMin && rep.fit.slope <= kTransformedSlopeMax &&
                  !rep.exclusion_limit_exceeded;
  return {ok, fmt("transformed slope %.4f (CI %.4f..%.4f), band [%.2f, %.2f], excluded %zu;", rep.fit.slope,
                  rep.fit.ci_low, rep.fit.ci_high, kTransformedSlopeMin, kTransformedSlopeMax, rep.excluded_paths) +
                  rows_text(rep)};
}

Outcome euler_separation() {
  const auto f = make_fixture("gbm-jump");
  ExperimentSpec spec{f.model, f.oracle, SchemeKind::euler_jump_adapted, m_range(4, 9), 0, 2.0, mc(kPaths)};
  const auto cmp = compare_schemes(spec, SchemeKind::euler_jump_adapted, SchemeKind::quasi_milstein_jump_adapted);
  const double slope = cmp.baseline.fit.slope;
  const bool band = cmp.baseline.fit.defined && slope >= kEulerSlopeMin && slope <= kEulerSlopeMax;
  const std::size_t n = cmp.ratio.size();
  return {band && cmp.candidate_better_at_finest_two,
          fmt("Euler slope %.4f, band [%.2f, %.2f]; Milstein/Euler error ratio at M=%lld: %.3f, at M=%lld: %.3f", slope,
              kEulerSlopeMin, kEulerSlopeMax, static_cast<long long>(cmp.baseline.rows[n - 2].M), cmp.ratio[n - 2],
              static_cast<long long>(cmp.baseline.rows[n - 1].M), cmp.ratio[n - 1])};
}

Outcome transform_suite() {
  std::vector<std::string> failures;
  double worst_prime = 0.0, worst_second = 0.0, worst_trip = 0.0, worst_kink = 0.0;
  for (const char* name : {"sign-drift", "double-step"}) {
    const auto model = make_fixture(name).model;
    const auto g = TransformG::build(model);
    const auto z = g.zetas();
    const auto a = g.alphas();
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (g.value(z[i]) != z[i]) failures.push_back(fmt("%s: G(zeta_%zu) != zeta_%zu", name, i, i));
      worst_prime = std::max(worst_prime, std::abs(g.prime(z[i]) - 1.0));
      const auto [lo, hi] = g.second_limits(i);
      // sampled one-sided limits as well as the closed form
      const double h = 1e-12;
      for (double d : {lo + 2 * a[i], hi - 2 * a[i], g.second(z[i] - h) + 2 * a[i], g.second(z[i] + h) - 2 * a[i]})
        worst_second = std::max(worst_second, std::abs(d));
    }
    const double lo = z.front() - g.nu(), hi = z.back() + g.nu();
    for (int k = 0; k < 2000; ++k) {
      const double off = 1e-9 + 3.0 * k / 2000.0;
      for (double x : {lo - off, hi + off})
        if (g.prime(x) != 1.0) failures.push_back(fmt("%s: G'(%.6g) != 1 outside the bumps", name, x));
    }
    for (int k = 0; k < 10000; ++k) {
      const double x = lo - 0.5 + (hi - lo + 1.0) * (k + 0.5) / 10000.0;
      worst_trip = std::max(worst_trip, std::abs(g.inverse(g.value(x)) - x));
    }
    const TransformedModel t(model, g);
    for (double zt : t.zeta_t()) {
      for (double h : {1e-8, 1e-9, 1e-10}) worst_kink = std::max(worst_kink, std::abs(t.mu_t(zt - h) - t.mu_t(zt + h)));
    }
  }
  if (worst_prime > kGPrimeAtZetaTol) failures.push_back("G'(zeta) off 1");
  if (worst_second > kGSecondLimitTol) failures.push_back("G'' one-sided limits off +-2 alpha");
  if (worst_trip > kRoundTripTol) failures.push_back("round trip");
  if (worst_kink > kDriftKinkTol) failures.push_back("transformed drift jumps at a kink");
  std::string detail = fmt("|G'(zeta)-1| %.1e, G'' limit error %.1e, round trip %.1e, drift kink gap %.1e",
                           worst_prime, worst_second, worst_trip, worst_kink);
  for (const auto& f : failures) detail += "; " + f;
  return {failures.empty(), detail};
}

bool same_bytes(const std::vector<double>& x, const std::vector<double>& y) {
  return x.size() == y.size() && std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0;
}

Outcome grid_suite() {
  std::vector<std::string> failures;
  const double T = 1.0, lambda = 2.0;
  for (std::uint64_t p = 0; p < 500 && failures.size() < 5; ++p) {
    const auto pr = draw_path_randomness(T, lambda, 1024, kSeed, p);
    const auto again = draw_path_randomness(T, lambda, 1024, kSeed, p);
    if (!same_bytes(pr.w, again.w) || !same_bytes(pr.jumps.times, again.jumps.times))
      failures.push_back(fmt("path %llu not reproducible", static_cast<unsigned long long>(p)));
    for (std::int64_t M : {1, 16, 128, 1024}) {
      const auto d = restrict_to(pr, M);
      const auto t = d.grid.times();
      bool ok = t.front() == 0.0 && t.back() == T;
      for (std::size_t n = 0; n + 1 < t.size(); ++n) ok = ok && t[n] < t[n + 1] && t[n + 1] - t[n] <= T / M * (1 + 1e-12);
      for (std::int64_t m = 0; m <= M; ++m) ok = ok && std::binary_search(t.begin(), t.end(), deterministic_time(m, M, T));
      std::size_t jumps = 0;
      for (std::size_t n = 0; n < d.grid.size(); ++n) jumps += d.grid.is_jump(n);
      ok = ok && jumps == pr.jumps.count();
      for (double nu : pr.jumps.times) ok = ok && std::binary_search(t.begin(), t.end(), nu);
      // telescoping: increments are exact differences and W_T is the same at every resolution
      for (std::size_t n = 0; n < d.dw.size(); ++n) ok = ok && d.dw[n] == d.w[n + 1] - d.w[n];
      ok = ok && d.w.back() == pr.w.back();
      if (M > 1) {
        const auto coarser = d.grid.coarsen(M / 2);
        for (double x : coarser.times()) ok = ok && std::binary_search(t.begin(), t.end(), x);
      }
      if (!ok) failures.push_back(fmt("grid invariant broken (path %llu, M=%lld)", static_cast<unsigned long long>(p),
                                      static_cast<long long>(M)));
    }
  }
  const std::size_t n = 100000;
  double sum = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    CounterStream s(kSeed, p, Substream::jumps);
    sum += static_cast<double>(draw_jump_times(lambda, T, s).count());
  }
  const double mean = sum / n;
  const double band = 3.0 * std::sqrt(lambda * T / n);
  if (std::abs(mean - lambda * T) > band) failures.push_back("Poisson mean outside band");
  std::string detail = fmt("500 paths x 4 resolutions checked; Poisson mean %.5f vs %.1f +- %.5f", mean, lambda * T, band);
  for (const auto& f : failures) detail += "; " + f;
  return {failures.empty(), detail};
}

Outcome occupation() {
  const auto f = make_fixture("sign-drift");
  OccupationSpec spec{f.model, SchemeKind::transformed_quasi_milstein, 0.0, {0.4, 0.2, 0.1, 0.05}, {16, 64, 256, 1024},
                      0, mc(kPaths)};
  const auto rep = occupation_study(spec);
  const bool nonneg = rep.fit.intercept >= 0.0 && rep.fit.eps_coef >= 0.0 && rep.fit.sqrt_delta_coef >= 0.0;
  std::string detail = fmt("monotone %s; fit %.4f + %.4f eps + %.4f sqrt(delta); M=1024 estimates",
                           rep.monotone_in_eps ? "yes" : "no", rep.fit.intercept, rep.fit.eps_coef,
                           rep.fit.sqrt_delta_coef);
  for (double v : rep.estimate.back()) detail += fmt(" %.4f", v);
  return {rep.monotone_in_eps && nonneg, detail};
}

Outcome moments() {
  const auto f = make_fixture("lipschitz-mix");
  const std::vector<std::int64_t> Ms{16, 128, 1024};
  const auto rep = moment_diagnostic(f.model, SchemeKind::quasi_milstein_jump_adapted, 2.0, Ms, mc(kPaths));
  std::string detail = fmt("max/min ratio %.4f (limit %.2f); E[sup|Z|^2]:", rep.max_min_ratio, kMomentRatioMax);
  for (std::size_t i = 0; i < Ms.size(); ++i) detail += fmt(" %lld:%.4f", static_cast<long long>(Ms[i]), rep.moment[i]);
  return {rep.max_min_ratio < kMomentRatioMax, detail};
}

Outcome degenerate_algebra() {
  std::size_t checked = 0;
  std::vector<std::string> failures;
  const auto lip = make_fixture("lipschitz-mix").model;
  const auto gbm = make_fixture("gbm-jump").model;
  FixtureOverrides o;
  o.xi = 0.75;
  const auto frozen = make_fixture("frozen", o).model;
  for (std::uint64_t p = 0; p < 200; ++p) {
    const auto pr = draw_path_randomness(1.0, 2.0, 256, kSeed, p);
    for (std::int64_t M : {16, 256}) {
      const auto drive = restrict_to(pr, M);
      const auto euler = simulate_with(DirectCoefficients(lip), lip.xi, drive, {.milstein_correction = false});
      const auto flat = simulate_with(DirectCoefficients(lip), lip.xi, drive, {.zero_diffusion_slope = true});
      if (!same_bytes(euler.values, flat.values)) failures.push_back("d_sigma = 0 differs from Euler");
      for (const auto* m : {&lip, &gbm}) {
        const auto a = Scheme(*m, SchemeKind::quasi_milstein_jump_adapted).simulate(drive);
        const auto b = Scheme(*m, SchemeKind::transformed_quasi_milstein).simulate(drive);
        if (!same_bytes(output_values(a), output_values(b))) failures.push_back("m = 0 transformed differs");
      }
      for (auto kind : {SchemeKind::euler_jump_adapted, SchemeKind::quasi_milstein_jump_adapted,
                        SchemeKind::transformed_quasi_milstein}) {
        const auto path = Scheme(frozen, kind).simulate(drive);
        for (double v : output_values(path))
          if (v != 0.75) failures.push_back("frozen path moved");
      }
      ++checked;
    }
    if (failures.size() > 5) break;
  }
  std::string detail = fmt("%zu path/resolution pairs compared bitwise", checked);
  for (std::size_t i = 0; i < std::min<std::size_t>(failures.size(), 5); ++i) detail += "; " + failures[i];
  return {failures.empty(), detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"oracle convergence, smooth case", oracle_convergence},
      {"transformed scheme on discontinuous drift", transformed_convergence},
      {"Euler baseline separation", euler_separation},
      {"transform property suite", transform_suite},
      {"grid and randomness invariants", grid_suite},
      {"occupation-time diagnostic", occupation},
      {"moment boundedness", moments},
      {"degenerate algebra", degenerate_algebra},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%s %zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
