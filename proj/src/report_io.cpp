#include "jaqm/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace jaqm {

namespace {

nlohmann::json number_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_error_csv(std::ostream& out, const ErrorReport& report) {
  out << "M,delta,error,stderr,n_effective\n";
  for (const auto& row : report.rows) {
    out << row.M << ',' << format_double(row.delta) << ',' << format_double(row.error) << ','
        << format_double(row.std_error) << ',' << row.n_effective << '\n';
  }
}

nlohmann::json error_summary_json(const ErrorReport& report) {
  nlohmann::json j;
  j["scheme"] = std::string(scheme_name(report.scheme));
  j["p"] = report.p;
  j["slope"] = number_or_null(report.fit.slope);
  j["intercept"] = number_or_null(report.fit.intercept);
  j["ci_low"] = number_or_null(report.fit.ci_low);
  j["ci_high"] = number_or_null(report.fit.ci_high);
  j["excluded_paths"] = report.excluded_paths;
  j["n_paths"] = report.n_paths;
  j["exact"] = report.exact;
  j["exclusion_limit_exceeded"] = report.exclusion_limit_exceeded;
  j["residuals"] = nlohmann::json::array();
  for (double r : report.fit.residuals) j["residuals"].push_back(number_or_null(r));
  return j;
}

nlohmann::json comparison_json(const ComparisonReport& report) {
  nlohmann::json j;
  j["baseline"] = error_summary_json(report.baseline);
  j["candidate"] = error_summary_json(report.candidate);
  j["ratio"] = nlohmann::json::array();
  for (double r : report.ratio) j["ratio"].push_back(number_or_null(r));
  j["candidate_better_at_finest_two"] = report.candidate_better_at_finest_two;
  return j;
}

void write_occupation_csv(std::ostream& out, const OccupationReport& report, double T) {
  out << "M,delta,eps,occupation,stderr\n";
  for (std::size_t r = 0; r < report.resolutions.size(); ++r) {
    for (std::size_t e = 0; e < report.eps.size(); ++e) {
      out << report.resolutions[r] << ',' << format_double(T / static_cast<double>(report.resolutions[r])) << ','
          << format_double(report.eps[e]) << ',' << format_double(report.estimate[r][e]) << ','
          << format_double(report.std_error[r][e]) << '\n';
    }
  }
}

nlohmann::json occupation_json(const OccupationReport& report) {
  nlohmann::json j;
  j["zeta"] = report.zeta;
  j["fit"] = {{"intercept", report.fit.intercept},
              {"eps_coef", report.fit.eps_coef},
              {"sqrt_delta_coef", report.fit.sqrt_delta_coef}};
  j["monotone_in_eps"] = report.monotone_in_eps;
  j["excluded_paths"] = report.excluded_paths;
  return j;
}

void write_moment_csv(std::ostream& out, const MomentReport& report, double T) {
  out << "M,delta,moment,stderr\n";
  for (std::size_t r = 0; r < report.resolutions.size(); ++r) {
    out << report.resolutions[r] << ',' << format_double(T / static_cast<double>(report.resolutions[r])) << ','
        << format_double(report.moment[r]) << ',' << format_double(report.std_error[r]) << '\n';
  }
}

nlohmann::json moment_json(const MomentReport& report) {
  nlohmann::json j;
  j["p"] = report.p;
  j["max_min_ratio"] = number_or_null(report.max_min_ratio);
  j["growth_flagged"] = report.growth_flagged;
  j["excluded_paths"] = report.excluded_paths;
  return j;
}

std::string format_error_table(const ErrorReport& report) {
  std::ostringstream os;
  char line[160];
  os << scheme_name(report.scheme) << " (p = " << report.p << ", " << report.n_paths << " paths, "
     << report.excluded_paths << " excluded)\n";
  std::snprintf(line, sizeof(line), "%10s %14s %14s %14s %10s\n", "M", "delta", "error", "stderr", "n_eff");
  os << line;
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof(line), "%10lld %14.6e %14.6e %14.6e %10zu\n", static_cast<long long>(r.M), r.delta,
                  r.error, r.std_error, r.n_effective);
    os << line;
  }
  if (report.exact) {
    os << "exact: every error is zero\n";
  } else if (report.fit.defined) {
    std::snprintf(line, sizeof(line), "slope %.4f  (95%% CI %.4f .. %.4f)\n", report.fit.slope, report.fit.ci_low,
                  report.fit.ci_high);
    os << line;
  }
  return os.str();
}

}  // namespace jaqm
