#include "jaqm/cli/app.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include "jaqm/cli/config.hpp"
#include "jaqm/errors.hpp"
#include "jaqm/experiments.hpp"
#include "jaqm/fixtures.hpp"
#include "jaqm/path_io.hpp"
#include "jaqm/report_io.hpp"
#include "jaqm/schemes.hpp"

namespace fs = std::filesystem;

namespace jaqm::cli {

namespace {

// Flags that map onto config keys; applied after the config file, left to right.
const std::map<std::string, std::string>& flag_keys() {
  static const std::map<std::string, std::string> m{
      {"--model", "model.name"},        {"--xi", "model.xi"},
      {"--mode", "experiment.mode"},    {"--scheme", "experiment.scheme"},
      {"--M", "experiment.M"},          {"--Mref", "experiment.Mref"},
      {"--paths", "experiment.paths"},  {"--p", "experiment.p"},
      {"--seed", "experiment.seed"},    {"--nu-fraction", "transform.nu_fraction"},
      {"--workers", "run.workers"},     {"--out", "run.out"},
  };
  return m;
}

struct OverrideFlags {
  std::map<CLI::Option*, std::string> keys;
  CLI::Option* set = nullptr;
  std::string config_path;
};

void add_override_flags(CLI::App& cmd, OverrideFlags& flags) {
  cmd.add_option("--config", flags.config_path, "config file (applied before any flag)");
  for (const auto& [name, key] : flag_keys()) {
    auto* opt = cmd.add_option(name)
                    ->description("overrides " + key)
                    ->expected(1)
                    ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    flags.keys[opt] = key;
  }
  flags.set = cmd.add_option("--set")
                  ->description("section.key=value override (repeatable)")
                  ->expected(1)
                  ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
}

KeyValues collect(const CLI::App& cmd, const OverrideFlags& flags) {
  std::vector<Entries> layers;
  if (!flags.config_path.empty()) layers.push_back(load_config_file(flags.config_path));

  Entries overrides;
  std::map<const CLI::Option*, std::size_t> seen;
  for (const CLI::Option* opt : cmd.parse_order()) {
    const std::size_t k = seen[opt]++;
    const auto& results = opt->results();
    if (k >= results.size()) continue;
    if (opt == flags.set) {
      const auto& text = results[k];
      const auto eq = text.find('=');
      if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + text + "'");
      overrides.emplace_back(text.substr(0, eq), text.substr(eq + 1));
    } else if (const auto it = flags.keys.find(const_cast<CLI::Option*>(opt)); it != flags.keys.end()) {
      overrides.emplace_back(it->second, results[k]);
    }
  }
  layers.push_back(std::move(overrides));
  return compose(layers);
}

std::string output_dir(const RunConfig& config) {
  if (!config.out_dir.empty()) return config.out_dir;
  if (const char* env = std::getenv("JAQM_OUT_DIR"); env && *env) return env;
  return "jaqm-out";
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + file.string() + "'");
  out << text;
}

template <class Writer>
void write_file(const fs::path& file, Writer&& writer) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + file.string() + "'");
  writer(out);
}

nlohmann::json effective_json(const RunConfig& c, std::int64_t reference, bool oracle_used) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : c.effective) j[k] = v;
  j["resolved"] = {
      {"mode", std::string(mode_name(c.mode))},
      {"model", c.model_name},
      {"resolutions", c.resolutions},
      {"reference_resolution", reference},
      {"oracle", oracle_used},
      {"p", c.p},
      {"paths", c.mc.n_paths},
      {"seed", c.mc.seed},
      {"nu_fraction", c.mc.nu_fraction},
      {"inversion_tol", c.mc.inversion_tol},
  };
  nlohmann::json schemes = nlohmann::json::array();
  for (auto s : c.schemes) schemes.push_back(std::string(scheme_name(s)));
  j["resolved"]["schemes"] = schemes;
  return j;
}

bool over_limit(std::size_t excluded, std::size_t n_paths) {
  return static_cast<double>(excluded) > 0.01 * static_cast<double>(n_paths);
}

struct Outcome {
  bool numeric_failure = false;
  std::vector<std::string> failed_checks;
};

void check_slope(const RunConfig& c, const ErrorReport& r, Outcome& outcome) {
  const std::string name(scheme_name(r.scheme));
  if (c.checks.slope_min && !(r.fit.defined && r.fit.slope >= *c.checks.slope_min)) {
    outcome.failed_checks.push_back(name + ": slope below " + format_double(*c.checks.slope_min));
  }
  if (c.checks.slope_max && !(r.fit.defined && r.fit.slope <= *c.checks.slope_max)) {
    outcome.failed_checks.push_back(name + ": slope above " + format_double(*c.checks.slope_max));
  }
}

ExperimentSpec experiment_spec(const RunConfig& c, const ModelFixture& fixture) {
  const bool use_oracle = c.oracle == "auto" && fixture.has_oracle();
  ExperimentSpec spec{fixture.model, use_oracle ? fixture.oracle : Oracle{}, c.schemes.front(), c.resolutions,
                      c.reference_resolution, c.p, c.mc};
  if (spec.reference_resolution == 0) {
    spec.reference_resolution = default_reference_resolution(c.resolutions, use_oracle);
  }
  spec.validate();
  return spec;
}

Outcome run_experiment(const RunConfig& c, const ModelFixture& fixture, const fs::path& dir, std::ostream& out) {
  Outcome outcome;
  nlohmann::json summary;
  summary["model"] = fixture.name;
  summary["formulas"] = fixture.formulas;

  switch (c.mode) {
    case Mode::strong_error:
    case Mode::compare: {
      const auto spec = experiment_spec(c, fixture);
      summary["config"] = effective_json(c, spec.reference_resolution, static_cast<bool>(spec.oracle));
      std::vector<ErrorReport> reports;
      if (c.mode == Mode::compare) {
        const auto cmp = compare_schemes(spec, c.schemes[0], c.schemes[1]);
        summary["comparison"] = comparison_json(cmp);
        if (c.checks.candidate_better && !cmp.candidate_better_at_finest_two) {
          outcome.failed_checks.push_back("candidate not better than baseline at the two finest M");
        }
        reports = {cmp.baseline, cmp.candidate};
      } else {
        reports = strong_errors(spec, c.schemes);
      }
      summary["reports"] = nlohmann::json::array();
      for (const auto& r : reports) {
        write_file(dir / ("errors_" + std::string(scheme_name(r.scheme)) + ".csv"),
                   [&](std::ostream& os) { write_error_csv(os, r); });
        summary["reports"].push_back(error_summary_json(r));
        out << format_error_table(r) << '\n';
        if (r.exclusion_limit_exceeded) outcome.numeric_failure = true;
        check_slope(c, r, outcome);
      }
      break;
    }
    case Mode::occupation: {
      OccupationSpec spec{fixture.model, c.schemes.front(), c.zeta, c.eps, c.resolutions, c.reference_resolution, c.mc};
      const auto rep = occupation_study(spec);
      summary["config"] = effective_json(c, spec.reference_resolution, false);
      summary["occupation"] = occupation_json(rep);
      write_file(dir / "occupation.csv", [&](std::ostream& os) { write_occupation_csv(os, rep, fixture.model.T); });
      out << "occupation near " << rep.zeta << ": intercept " << rep.fit.intercept << ", eps coef "
          << rep.fit.eps_coef << ", sqrt(delta) coef " << rep.fit.sqrt_delta_coef
          << (rep.monotone_in_eps ? ", monotone in eps\n" : ", NOT monotone in eps\n");
      if (over_limit(rep.excluded_paths, c.mc.n_paths)) outcome.numeric_failure = true;
      if (c.checks.monotone && !rep.monotone_in_eps) outcome.failed_checks.push_back("occupation not monotone in eps");
      if (c.checks.nonnegative_fit && !(rep.fit.eps_coef >= 0.0 && rep.fit.sqrt_delta_coef >= 0.0)) {
        outcome.failed_checks.push_back("occupation fit has a negative coefficient");
      }
      break;
    }
    case Mode::moments: {
      const auto rep = moment_diagnostic(fixture.model, c.schemes.front(), c.p, c.resolutions, c.mc);
      summary["config"] = effective_json(c, 0, false);
      summary["moments"] = moment_json(rep);
      write_file(dir / "moments.csv", [&](std::ostream& os) { write_moment_csv(os, rep, fixture.model.T); });
      out << "E[max |Z|^" << rep.p << "]: max/min ratio " << rep.max_min_ratio
          << (rep.growth_flagged ? " (growth above 20%)\n" : "\n");
      if (over_limit(rep.excluded_paths, c.mc.n_paths)) outcome.numeric_failure = true;
      if (c.checks.max_ratio && !(rep.max_min_ratio < *c.checks.max_ratio)) {
        outcome.failed_checks.push_back("moment ratio " + format_double(rep.max_min_ratio) + " not below " +
                                        format_double(*c.checks.max_ratio));
      }
      break;
    }
  }

  summary["checks_failed"] = outcome.failed_checks;
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  return outcome;
}

int list_models(std::ostream& out) {
  for (const auto& name : fixture_names()) {
    const auto f = make_fixture(name);
    out << name << "\n  " << f.formulas << "\n  oracle: " << f.oracle_description << "\n";
  }
  return kOk;
}

int describe_model(const std::string& name, std::ostream& out) {
  out << describe_fixture(make_fixture(name));
  return kOk;
}

int cmd_run(const CLI::App& cmd, const OverrideFlags& flags, std::ostream& out, std::ostream& err) {
  const auto config = to_run_config(collect(cmd, flags));
  const auto fixture = build_model(config);
  validate_assumption1(fixture.model, default_box(fixture.model), 4001);

  const fs::path dir = output_dir(config);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());

  const auto outcome = run_experiment(config, fixture, dir, out);
  if (outcome.numeric_failure) {
    err << "error: more than 1% of paths overflowed\n";
    return kNumeric;
  }
  if (!outcome.failed_checks.empty()) {
    for (const auto& f : outcome.failed_checks) err << "check failed: " << f << '\n';
    return kCheckFailed;
  }
  out << "reports written to " << dir.string() << '\n';
  return kOk;
}

struct DumpOptions {
  std::uint64_t path = 0;
  std::string file;
};

int cmd_dump(const CLI::App& cmd, const OverrideFlags& flags, const DumpOptions& d, std::ostream& out) {
  const auto config = to_run_config(collect(cmd, flags));
  const auto fixture = build_model(config);
  std::int64_t reference = config.reference_resolution;
  if (reference == 0) reference = default_reference_resolution(config.resolutions, false);
  const auto pr = draw_path_randomness(fixture.model.T, fixture.model.lambda, reference, config.mc.seed, d.path);
  save_path_randomness(d.file, pr);
  out << "path " << d.path << " (seed " << config.mc.seed << ", M_ref " << reference << ", " << pr.jumps.times.size()
      << " jumps) written to " << d.file << '\n';
  return kOk;
}

struct ReplayOptions {
  std::string file;
  std::int64_t M = 0;
};

int cmd_replay(const CLI::App& cmd, const OverrideFlags& flags, const ReplayOptions& r, std::ostream& out) {
  const auto config = to_run_config(collect(cmd, flags));
  const auto fixture = build_model(config);
  const auto pr = load_path_randomness(r.file);
  if (pr.T != fixture.model.T || pr.lambda != fixture.model.lambda) {
    throw ConfigError("stored path does not match the model's T and lambda");
  }
  const std::int64_t M = r.M > 0 ? r.M : pr.master.resolution();
  const Scheme scheme(fixture.model, config.schemes.front(), config.mc.nu_fraction, config.mc.inversion_tol);
  const auto path = scheme.simulate(restrict_to(pr, M));
  const auto values = output_values(path);
  out << "t,jump,value\n";
  for (std::size_t n = 0; n < path.size(); ++n) {
    out << format_double(path.times[n]) << ',' << (path.is_jump(n) ? 1 : 0) << ',' << format_double(values[n]) << '\n';
  }
  return kOk;
}

}  // namespace

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Jump-adapted quasi-Milstein schemes for jump-diffusions with discontinuous drift", "jaqm"};
  app.require_subcommand(0, 1);

  bool top_list = false;
  std::string top_describe;
  app.add_flag("--list-models", top_list, "print the built-in model catalogue");
  app.add_option("--describe", top_describe, "describe one built-in model");

  auto* run = app.add_subcommand("run", "run an experiment and write CSV/JSON reports");
  OverrideFlags run_flags;
  add_override_flags(*run, run_flags);
  bool run_list = false;
  std::string run_describe;
  run->add_flag("--list-models", run_list, "print the built-in model catalogue and exit");
  run->add_option("--describe", run_describe, "describe one built-in model and exit");

  auto* dump = app.add_subcommand("dump-path", "write the master randomness of one path to a file");
  OverrideFlags dump_flags;
  add_override_flags(*dump, dump_flags);
  DumpOptions dump_opts;
  dump->add_option("--path-index", dump_opts.path, "path index within the seed");
  dump->add_option("--file", dump_opts.file, "output file")->required();

  auto* replay = app.add_subcommand("replay", "run a scheme on a stored path, print t,jump,value");
  OverrideFlags replay_flags;
  add_override_flags(*replay, replay_flags);
  ReplayOptions replay_opts;
  replay->add_option("--file", replay_opts.file, "stored path")->required();
  replay->add_option("--at", replay_opts.M, "resolution to run at (default: the stored one)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (top_list || run_list) return list_models(out);
    if (!top_describe.empty()) return describe_model(top_describe, out);
    if (!run_describe.empty()) return describe_model(run_describe, out);
    if (*run) return cmd_run(*run, run_flags, out, err);
    if (*dump) return cmd_dump(*dump, dump_flags, dump_opts, out);
    if (*replay) return cmd_replay(*replay, replay_flags, replay_opts, out);
    out << app.help();
    return kUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const AssumptionViolation& e) {
    err << "assumption " << clause_label(e.clause()) << " violated: " << e.what() << '\n';
    return kAssumption;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  }
}

}  // namespace jaqm::cli
