#include "jaqm/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "jaqm/errors.hpp"
#include "jaqm/pieces.hpp"

namespace jaqm::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    const auto piece = trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    parts.emplace_back(piece);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

const std::vector<std::string>& key_table() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k{
        "model.name",        "model.xi",           "model.T",
        "model.lambda",      "experiment.mode",    "experiment.scheme",
        "experiment.M",      "experiment.Mref",    "experiment.oracle",
        "experiment.p",      "experiment.paths",   "experiment.seed",
        "transform.nu_fraction", "transform.inversion_tol",
        "occupation.zeta",   "occupation.eps",     "run.workers",
        "run.out",           "check.slope_min",    "check.slope_max",
        "check.candidate_better", "check.monotone", "check.nonnegative_fit",
        "check.max_ratio",
    };
    for (const char* fn : {"mu", "sigma", "rho"}) {
      for (const char* field : {"breakpoints", "pieces", "at_breakpoint"}) {
        k.push_back(std::string("model.") + fn + "." + field);
      }
    }
    return k;
  }();
  return keys;
}

double to_double(const std::string& key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(key + ": expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

template <class Int>
Int to_int(const std::string& key, std::string_view text) {
  text = trim(text);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError(key + ": expected an integer, got '" + std::string(text) + "'");
  }
  return v;
}

bool to_bool(const std::string& key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + std::string(text) + "'");
}

const std::string* find(const KeyValues& kv, const std::string& key) {
  const auto it = kv.find(key);
  return it == kv.end() ? nullptr : &it->second;
}

PiecewiseSmoothFn custom_function(const KeyValues& kv, const std::string& fn) {
  const std::string base = "model." + fn + ".";
  const auto* pieces_text = find(kv, base + "pieces");
  if (!pieces_text) throw ConfigError(base + "pieces is required for a custom model");

  std::vector<SmoothPiece> pieces;
  for (const auto& p : split(*pieces_text, ';')) pieces.push_back(pieces::parse(p));

  std::vector<double> breakpoints;
  if (const auto* bp = find(kv, base + "breakpoints"); bp && !trim(*bp).empty()) {
    for (const auto& b : split(*bp, ',')) breakpoints.push_back(to_double(base + "breakpoints", b));
  }
  if (pieces.size() != breakpoints.size() + 1) {
    throw ConfigError(base + "pieces: need " + std::to_string(breakpoints.size() + 1) + " pieces for " +
                      std::to_string(breakpoints.size()) + " breakpoints");
  }

  std::vector<BreakpointValue> at;
  if (const auto* ab = find(kv, base + "at_breakpoint")) {
    const auto items = split(*ab, ',');
    for (const auto& item : items) {
      if (item == "right") {
        at.push_back(BreakpointValue::right());
      } else if (item == "left") {
        at.push_back(BreakpointValue::left());
      } else {
        at.push_back(BreakpointValue::fixed(to_double(base + "at_breakpoint", item)));
      }
    }
    // One value may stand for every breakpoint.
    if (at.size() == 1 && breakpoints.size() > 1) at.assign(breakpoints.size(), at.front());
    if (at.size() != breakpoints.size()) throw ConfigError(base + "at_breakpoint: one value per breakpoint");
  }

  try {
    return PiecewiseSmoothFn(std::move(breakpoints), std::move(pieces), std::move(at));
  } catch (const DomainError& e) {
    throw ConfigError(base + ": " + e.what());
  }
}

}  // namespace

Entries parse_config_text(std::string_view text, std::string_view origin) {
  Entries entries;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = std::string(origin) + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": missing key");
    if (section.empty()) throw ConfigError(where + ": key '" + std::string(key) + "' outside any section");
    entries.emplace_back(section + "." + std::string(key), std::string(trim(line.substr(eq + 1))));
  }
  return entries;
}

Entries load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path);
}

std::vector<std::string> known_keys() { return key_table(); }

KeyValues compose(const std::vector<Entries>& layers) {
  const auto& keys = key_table();
  KeyValues kv;
  for (const auto& layer : layers) {
    for (const auto& [key, value] : layer) {
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError("unknown key '" + key + "'");
      kv[key] = value;
    }
  }
  return kv;
}

std::string_view mode_name(Mode mode) {
  switch (mode) {
    case Mode::strong_error: return "strong_error";
    case Mode::compare: return "compare";
    case Mode::occupation: return "occupation";
    case Mode::moments: return "moments";
  }
  return "?";
}

RunConfig to_run_config(const KeyValues& kv) {
  RunConfig c;
  c.effective = kv;

  for (const auto& [key, value] : kv) {
    if (key == "model.name") {
      c.model_name = value;
    } else if (key == "model.xi") {
      c.overrides.xi = to_double(key, value);
    } else if (key == "model.T") {
      c.overrides.T = to_double(key, value);
    } else if (key == "model.lambda") {
      c.overrides.lambda = to_double(key, value);
    } else if (key.starts_with("model.")) {
      c.model_keys[key] = value;
    } else if (key == "experiment.mode") {
      if (value == "strong_error") c.mode = Mode::strong_error;
      else if (value == "compare") c.mode = Mode::compare;
      else if (value == "occupation") c.mode = Mode::occupation;
      else if (value == "moments") c.mode = Mode::moments;
      else throw ConfigError(key + ": expected strong_error, compare, occupation or moments");
    } else if (key == "experiment.scheme") {
      c.schemes.clear();
      for (const auto& s : split(value, ',')) {
        const auto kind = parse_scheme(s);
        if (!kind) throw ConfigError(key + ": unknown scheme '" + s + "' (euler, milstein, transformed)");
        c.schemes.push_back(*kind);
      }
    } else if (key == "experiment.M") {
      c.resolutions.clear();
      for (const auto& s : split(value, ',')) c.resolutions.push_back(to_int<std::int64_t>(key, s));
    } else if (key == "experiment.Mref") {
      c.reference_resolution = to_int<std::int64_t>(key, value);
    } else if (key == "experiment.oracle") {
      if (value != "auto" && value != "none") throw ConfigError(key + ": expected auto or none");
      c.oracle = value;
    } else if (key == "experiment.p") {
      c.p = to_double(key, value);
    } else if (key == "experiment.paths") {
      c.mc.n_paths = to_int<std::size_t>(key, value);
    } else if (key == "experiment.seed") {
      c.mc.seed = to_int<std::uint64_t>(key, value);
    } else if (key == "transform.nu_fraction") {
      c.mc.nu_fraction = to_double(key, value);
    } else if (key == "transform.inversion_tol") {
      c.mc.inversion_tol = to_double(key, value);
    } else if (key == "occupation.zeta") {
      c.zeta = to_double(key, value);
    } else if (key == "occupation.eps") {
      c.eps.clear();
      for (const auto& s : split(value, ',')) c.eps.push_back(to_double(key, s));
    } else if (key == "run.workers") {
      c.mc.workers = to_int<unsigned>(key, value);
    } else if (key == "run.out") {
      c.out_dir = value;
    } else if (key == "check.slope_min") {
      c.checks.slope_min = to_double(key, value);
    } else if (key == "check.slope_max") {
      c.checks.slope_max = to_double(key, value);
    } else if (key == "check.candidate_better") {
      c.checks.candidate_better = to_bool(key, value);
    } else if (key == "check.monotone") {
      c.checks.monotone = to_bool(key, value);
    } else if (key == "check.nonnegative_fit") {
      c.checks.nonnegative_fit = to_bool(key, value);
    } else if (key == "check.max_ratio") {
      c.checks.max_ratio = to_double(key, value);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }

  if (c.mode == Mode::compare && !kv.contains("experiment.scheme")) {
    c.schemes = {SchemeKind::euler_jump_adapted, SchemeKind::quasi_milstein_jump_adapted};
  }
  if (c.mode == Mode::compare && c.schemes.size() != 2) {
    throw ConfigError("experiment.scheme: compare mode takes exactly two schemes (baseline, candidate)");
  }
  if ((c.mode == Mode::occupation || c.mode == Mode::moments) && c.schemes.size() != 1) {
    throw ConfigError("experiment.scheme: " + std::string(mode_name(c.mode)) + " mode takes one scheme");
  }
  if (c.schemes.empty()) throw ConfigError("experiment.scheme: at least one scheme is required");
  if (c.resolutions.empty()) throw ConfigError("experiment.M: at least one resolution is required");
  if (c.mc.nu_fraction <= 0.0 || c.mc.nu_fraction >= 1.0) {
    throw ConfigError("transform.nu_fraction: must lie in (0, 1)");
  }
  if (!(c.mc.inversion_tol > 0.0)) throw ConfigError("transform.inversion_tol: must be positive");
  for (double e : c.eps) {
    if (!(e > 0.0)) throw ConfigError("occupation.eps: every value must be positive");
  }

  const bool custom = c.model_name == "custom";
  if (!custom && !c.model_keys.empty()) {
    throw ConfigError("model." + c.model_keys.begin()->first.substr(6) +
                      ": piece keys are only valid with model.name = custom");
  }
  return c;
}

ModelFixture build_model(const RunConfig& config) {
  if (config.model_name != "custom") return make_fixture(config.model_name, config.overrides);

  const auto& kv = config.model_keys;
  if (!config.overrides.xi || !config.overrides.T || !config.overrides.lambda) {
    throw ConfigError("custom model needs model.xi, model.T and model.lambda");
  }
  auto mu = custom_function(kv, "mu");
  auto sigma = custom_function(kv, "sigma");
  auto rho = custom_function(kv, "rho");
  std::string formulas = "mu = " + mu.describe() + "; sigma = " + sigma.describe() + "; rho = " + rho.describe();
  try {
    JumpDiffusionModel model(std::move(mu), std::move(sigma), std::move(rho), *config.overrides.xi,
                             *config.overrides.T, *config.overrides.lambda);
    return ModelFixture{"custom", std::move(formulas), std::move(model), {}, "none (self-reference)"};
  } catch (const DomainError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

}  // namespace jaqm::cli
