#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jaqm/cli/app.hpp"
#include "jaqm/cli/config.hpp"
#include "jaqm/errors.hpp"

namespace fs = std::filesystem;
using namespace jaqm;
using namespace jaqm::cli;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "jaqm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string config_path(const std::string& name) { return std::string(JAQM_SOURCE_DIR) + "/configs/" + name; }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("jaqm_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Cli, ListModels) {
  const auto r = run({"--list-models"});
  EXPECT_EQ(r.code, kOk);
  for (const char* name : {"gbm-jump", "sign-drift", "lipschitz-mix", "double-step", "constant-drift", "frozen"}) {
    EXPECT_NE(r.out.find(name), std::string::npos) << name;
  }
  EXPECT_EQ(run({"run", "--list-models"}).code, kOk);
}

TEST(Cli, DescribeModel) {
  const auto r = run({"--describe", "sign-drift"});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("sign-drift"), std::string::npos);
  EXPECT_EQ(run({"--describe", "no-such-model"}).code, kConfig);
}

TEST(Cli, NoCommandIsUsageError) { EXPECT_EQ(run({}).code, kUsage); }

TEST(Cli, UnknownFlagOrKeyIsConfigError) {
  EXPECT_EQ(run({"run", "--bogus"}).code, kConfig);
  const auto r = run({"run", "--set", "experiment.colour=red"});
  EXPECT_EQ(r.code, kConfig);
  EXPECT_NE(r.err.find("experiment.colour"), std::string::npos);
  EXPECT_EQ(run({"run", "--model", "nope"}).code, kConfig);
  EXPECT_EQ(run({"run", "--config", "/nonexistent.cfg"}).code, kConfig);
}

TEST(Cli, InvalidExperimentIsConfigError) {
  const auto dir = scratch("invalid");
  // 24 does not divide 256
  EXPECT_EQ(run({"run", "--M", "16,24", "--Mref", "256", "--paths", "100", "--out", dir.string()}).code, kConfig);
  EXPECT_EQ(run({"run", "--paths", "10", "--out", dir.string()}).code, kConfig);
}

TEST(Cli, DegenerateNoiseIsAssumptionViolation) {
  const auto r = run({"run", "--config", config_path("custom-degenerate.cfg"), "--out", scratch("degenerate").string()});
  EXPECT_EQ(r.code, kAssumption);
  EXPECT_NE(r.err.find("(ii)"), std::string::npos);
}

TEST(Cli, RunWritesReportsDeterministically) {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  const std::vector<std::string> common{"run", "--model", "gbm-jump", "--M", "8,16,32", "--paths", "120", "--seed", "3"};
  auto args_a = common;
  args_a.insert(args_a.end(), {"--out", a.string(), "--workers", "1"});
  auto args_b = common;
  args_b.insert(args_b.end(), {"--out", b.string(), "--workers", "3"});
  ASSERT_EQ(run(args_a).code, kOk);
  ASSERT_EQ(run(args_b).code, kOk);
  const auto csv = "errors_quasi_milstein_jump_adapted.csv";
  ASSERT_TRUE(fs::exists(a / csv));
  EXPECT_EQ(slurp(a / csv), slurp(b / csv));

  std::istringstream lines(slurp(a / csv));
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "M,delta,error,stderr,n_effective");

  const auto summary = nlohmann::json::parse(slurp(a / "summary.json"));
  const auto& rep = summary.at("reports").at(0);
  for (const char* key : {"slope", "intercept", "ci_low", "ci_high", "excluded_paths"}) {
    EXPECT_TRUE(rep.contains(key)) << key;
  }
  EXPECT_EQ(rep.at("excluded_paths"), 0);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const auto dir = scratch("env");
  ::setenv("JAQM_OUT_DIR", dir.string().c_str(), 1);
  const auto r = run({"run", "--model", "frozen", "--M", "4,8", "--paths", "100"});
  ::unsetenv("JAQM_OUT_DIR");
  EXPECT_EQ(r.code, kOk) << r.err;
  EXPECT_TRUE(fs::exists(dir / "summary.json"));
}

TEST(Cli, FailedCheckExitCode) {
  const auto r = run({"run", "--model", "gbm-jump", "--M", "8,16,32", "--paths", "100", "--set", "check.slope_min=5",
                      "--out", scratch("check").string()});
  EXPECT_EQ(r.code, kCheckFailed);
  EXPECT_NE(r.err.find("check failed"), std::string::npos);
}

TEST(Cli, OverridesApplyLeftToRight) {
  const auto dir = scratch("order");
  // gbm.cfg pins a slope band that a 100-path run need not meet
  const std::vector<std::string> loose{"--set", "check.slope_min=-10", "--set", "check.slope_max=10"};
  const auto r = run({"run", "--config", config_path("gbm.cfg"), "--paths", "100", "--set", "experiment.paths=150",
                      "--M", "8,16", "--set", "experiment.M=4,8", "--out", dir.string(), loose[0], loose[1], loose[2],
                      loose[3]});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  EXPECT_EQ(summary.at("reports").at(0).at("n_paths"), 150);
  const auto rows = slurp(dir / "errors_quasi_milstein_jump_adapted.csv");
  EXPECT_EQ(rows.substr(rows.find('\n') + 1, 2), "4,");

  // the later --paths wins over the earlier --set
  const auto r2 = run({"run", "--config", config_path("gbm.cfg"), "--set", "experiment.paths=150", "--paths", "110",
                       "--M", "8,16", "--out", dir.string(), loose[0], loose[1], loose[2], loose[3]});
  ASSERT_EQ(r2.code, kOk) << r2.err;
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "summary.json")).at("reports").at(0).at("n_paths"), 110);
}

TEST(Cli, DumpAndReplay) {
  const auto dir = scratch("dump");
  fs::create_directories(dir);
  const auto file = (dir / "path.bin").string();
  ASSERT_EQ(run({"dump-path", "--model", "sign-drift", "--M", "8,16", "--path-index", "4", "--file", file}).code, kOk);
  const auto a = run({"replay", "--model", "sign-drift", "--scheme", "transformed", "--file", file, "--at", "16"});
  const auto b = run({"replay", "--model", "sign-drift", "--scheme", "transformed", "--file", file, "--at", "16"});
  ASSERT_EQ(a.code, kOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("t,jump,value\n", 0), 0u);
  EXPECT_EQ(run({"replay", "--model", "gbm-jump", "--file", file}).code, kConfig);
}

TEST(Config, ParsesSectionsAndComments) {
  const auto entries = parse_config_text("# comment\n[model]\nname = sign-drift  # trailing\n\n[experiment]\npaths=300\n",
                                         "inline");
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0].first, "model.name");
  EXPECT_EQ(entries[0].second, "sign-drift");
  EXPECT_EQ(entries[1].first, "experiment.paths");
  EXPECT_THROW(parse_config_text("[model\nname = x\n", "inline"), ConfigError);
  EXPECT_THROW(parse_config_text("no equals sign\n", "inline"), ConfigError);
}

TEST(Config, CustomModelFromKeys) {
  const auto kv = compose({load_config_file(config_path("custom-two-kinks.cfg"))});
  const auto config = to_run_config(kv);
  const auto fixture = build_model(config);
  EXPECT_EQ(fixture.model.mu.breakpoints().size(), 2u);
  EXPECT_EQ(fixture.model.mu.eval(-1.0), 1.0);
  EXPECT_EQ(fixture.model.mu.eval(1.0), -1.0);
  EXPECT_DOUBLE_EQ(fixture.model.mu.eval(0.0), 0.2);
  EXPECT_DOUBLE_EQ(fixture.model.rho.eval(2.0), -0.5);
  EXPECT_EQ(fixture.model.xi, 0.2);
  EXPECT_EQ(fixture.model.lambda, 1.5);
}

TEST(Config, PieceKeysRequireCustomModel) {
  KeyValues kv{{"model.name", "gbm-jump"}, {"model.mu.pieces", "const(1)"}};
  EXPECT_THROW(build_model(to_run_config(kv)), ConfigError);
}
