#pragma once

// Monte Carlo strong-error estimation and diagnostics.
//
// Every path draws its randomness once at the reference resolution; all
// coarser resolutions and schemes are run on restrictions of that path, so
// pathwise errors are directly comparable. Per-path results land in
// pre-allocated slots and are reduced in path order, which makes every report
// independent of the worker count.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jaqm/coefficients.hpp"
#include "jaqm/fixtures.hpp"
#include "jaqm/schemes.hpp"

namespace jaqm {

/// Settings shared by all experiments.
struct MonteCarloSettings {
  std::size_t n_paths = 1000;
  std::uint64_t seed = 1;
  double nu_fraction = TransformG::kDefaultNuFraction;
  double inversion_tol = TransformG::kDefaultInversionTol;
  unsigned workers = 0;
};

struct ExperimentSpec {
  JumpDiffusionModel model;
  Oracle oracle;  // empty: self-reference with the same scheme at reference_resolution
  SchemeKind scheme = SchemeKind::quasi_milstein_jump_adapted;
  std::vector<std::int64_t> resolutions;
  std::int64_t reference_resolution = 0;
  double p = 2.0;
  MonteCarloSettings mc;

  /// Throws DomainError when an invariant of the experiment is broken.
  void validate() const;
};

/// Default reference resolution: 64 max(M) for self-reference, 8 max(M) with an oracle.
std::int64_t default_reference_resolution(std::span<const std::int64_t> resolutions, bool has_oracle);

struct ErrorRow {
  std::int64_t M;
  double delta;
  double error;
  double std_error;
  std::size_t n_effective;
};

/// Least squares of log2(error) on log2(delta).
struct SlopeFit {
  bool defined = false;
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double ci_low = std::numeric_limits<double>::quiet_NaN();
  double ci_high = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> residuals;
};

SlopeFit fit_log2_slope(std::span<const double> delta, std::span<const double> error);

struct ErrorReport {
  SchemeKind scheme;
  double p = 2.0;
  std::vector<ErrorRow> rows;
  SlopeFit fit;
  /// Every pathwise error is within 16 ulp of the reference's magnitude, so the
  /// scheme reproduces the reference up to rounding; the slope is then not fitted.
  bool exact = false;
  std::size_t n_paths = 0;
  std::size_t excluded_paths = 0;
  /// More than 1% of the paths overflowed.
  bool exclusion_limit_exceeded = false;
};

ErrorReport strong_error(const ExperimentSpec& spec);

/// Runs several schemes on the same paths. Without an oracle each scheme is
/// measured against its own run at the reference resolution.
std::vector<ErrorReport> strong_errors(const ExperimentSpec& spec, std::span<const SchemeKind> schemes);

struct ComparisonReport {
  ErrorReport baseline;
  ErrorReport candidate;
  std::vector<double> ratio;  // candidate / baseline per M
  bool candidate_better_at_finest_two = false;
};

ComparisonReport compare_schemes(const ExperimentSpec& spec, SchemeKind baseline, SchemeKind candidate);

struct OccupationSpec {
  JumpDiffusionModel model;
  SchemeKind scheme = SchemeKind::transformed_quasi_milstein;
  double zeta = 0.0;
  std::vector<double> eps;
  std::vector<std::int64_t> resolutions;
  /// Integration mesh; 0 means 8 max(M).
  std::int64_t reference_resolution = 0;
  MonteCarloSettings mc;
};

/// occupation ~ intercept + eps_coef * eps + sqrt_delta_coef * sqrt(delta)
struct AffineFit {
  double intercept = 0.0;
  double eps_coef = 0.0;
  double sqrt_delta_coef = 0.0;
};

struct OccupationReport {
  double zeta = 0.0;
  std::vector<std::int64_t> resolutions;
  std::vector<double> eps;
  std::vector<std::vector<double>> estimate;   // [resolution][eps]
  std::vector<std::vector<double>> std_error;  // [resolution][eps]
  AffineFit fit;
  bool monotone_in_eps = false;
  std::size_t excluded_paths = 0;
};

/// Expected time the interpolated scheme (in its state space) spends within
/// eps of zeta, integrated by the left-point rule on the reference mesh.
OccupationReport occupation_study(const OccupationSpec& spec);
double occupation_time(const JumpDiffusionModel& model, SchemeKind scheme, double zeta, double eps, std::int64_t M,
                       const MonteCarloSettings& mc);

struct MomentReport {
  double p = 2.0;
  std::vector<std::int64_t> resolutions;
  std::vector<double> moment;  // E[max_n |Z_{tau_n}|^p]
  std::vector<double> std_error;
  double max_min_ratio = 1.0;
  /// max/min ratio above 1.2.
  bool growth_flagged = false;
  std::size_t excluded_paths = 0;
};

MomentReport moment_diagnostic(const JumpDiffusionModel& model, SchemeKind scheme, double p,
                               std::span<const std::int64_t> resolutions, const MonteCarloSettings& mc);

}  // namespace jaqm
