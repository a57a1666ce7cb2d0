#pragma once

// CSV and JSON forms of experiment reports.
//
// Strong-error CSV columns: M,delta,error,stderr,n_effective
// Strong-error JSON summary: slope, intercept, ci_low, ci_high, excluded_paths
// (plus scheme, p, n_paths, exact, residuals). Undefined numbers are null.

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>

#include "jaqm/experiments.hpp"

namespace jaqm {

/// Shortest round-trip form of a double ("%.17g").
std::string format_double(double x);

void write_error_csv(std::ostream& out, const ErrorReport& report);
nlohmann::json error_summary_json(const ErrorReport& report);
nlohmann::json comparison_json(const ComparisonReport& report);

void write_occupation_csv(std::ostream& out, const OccupationReport& report, double T);
nlohmann::json occupation_json(const OccupationReport& report);

void write_moment_csv(std::ostream& out, const MomentReport& report, double T);
nlohmann::json moment_json(const MomentReport& report);

/// Fixed-width table for terminals.
std::string format_error_table(const ErrorReport& report);

}  // namespace jaqm
