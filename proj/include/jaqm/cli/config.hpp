#pragma once

// Run configuration: a flat "section.key = value" text format.
//
//   # comment
//   [model]
//   name = sign-drift
//   xi = 0.1
//   [experiment]
//   M = 16,32,64
//
// Values are kept as strings in an ordered map until the whole stack of
// sources (file, then flags left to right) has been applied; only then is the
// map checked and converted into a RunConfig. The schema is in README.md.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jaqm/experiments.hpp"
#include "jaqm/fixtures.hpp"

namespace jaqm::cli {

using Entries = std::vector<std::pair<std::string, std::string>>;

/// Parses config text into ordered "section.key" entries. Throws ConfigError
/// with the line number on malformed input.
Entries parse_config_text(std::string_view text, std::string_view origin = "<config>");
Entries load_config_file(const std::string& path);

/// Later entries replace earlier ones. Unknown keys throw ConfigError.
using KeyValues = std::map<std::string, std::string>;
KeyValues compose(const std::vector<Entries>& layers);

std::vector<std::string> known_keys();

enum class Mode { strong_error, compare, occupation, moments };

struct Checks {
  std::optional<double> slope_min;
  std::optional<double> slope_max;
  bool candidate_better = false;
  bool monotone = false;
  bool nonnegative_fit = false;
  std::optional<double> max_ratio;
};

struct RunConfig {
  std::string model_name = "gbm-jump";
  KeyValues model_keys;  // raw model.* entries, for custom models
  FixtureOverrides overrides;

  Mode mode = Mode::strong_error;
  std::vector<SchemeKind> schemes{SchemeKind::quasi_milstein_jump_adapted};
  std::vector<std::int64_t> resolutions{16, 32, 64, 128, 256, 512};
  std::int64_t reference_resolution = 0;  // 0: default for the oracle setting
  std::string oracle = "auto";            // auto | none
  double p = 2.0;
  MonteCarloSettings mc;

  double zeta = 0.0;
  std::vector<double> eps{0.4, 0.2, 0.1, 0.05};

  std::string out_dir;  // empty: $JAQM_OUT_DIR, else "jaqm-out"
  Checks checks;

  KeyValues effective;  // what was actually used, echoed into summary.json
};

/// Converts composed key/values into a typed config. Throws ConfigError.
RunConfig to_run_config(const KeyValues& kv);

/// Builds the model named by the config (built-in or custom pieces).
ModelFixture build_model(const RunConfig& config);

std::string_view mode_name(Mode mode);

}  // namespace jaqm::cli
