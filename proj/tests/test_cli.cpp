#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace shellhier::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("shellhier_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string config(const std::string& name, const json& j) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << j.dump();
    return p.string();
  }
  int run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "shellhier");
    return run(args);
  }
  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }
  json report(const std::string& out) { return json::parse(slurp(dir_ / out / "report.json")); }
  std::string out(const std::string& name) { return (dir_ / name).string(); }

  fs::path dir_;
};

const json kKirchhoff = json::parse(R"J({
  "surface": {"family": "plate", "grid": 12},
  "regime": "kirchhoff",
  "inputs": {"y": ["2*sin(u/2)", "v", "2*(1-cos(u/2))"]},
  "h_list": [0.0625, 0.03125, 0.015625, 0.0078125],
  "target": {"functional": "kirchhoff"}
})J");

TEST_F(CliTest, Classify) {
  ::testing::internal::CaptureStdout();
  EXPECT_EQ(run_cli({"classify", "--beta", "3.0"}), 0);
  EXPECT_EQ(::testing::internal::GetCapturedStdout(), "N = 2, bracket [3, 4)\n");
  ::testing::internal::CaptureStdout();
  EXPECT_EQ(run_cli({"classify", "--alpha", "3"}), 0);
  EXPECT_EQ(::testing::internal::GetCapturedStdout(), "alpha = 3 -> beta = 4\nN = 1, bracket [4, inf)\n");
  EXPECT_EQ(run_cli({"classify", "--beta", "2"}), 1);
  EXPECT_EQ(run_cli({"classify", "--beta", "3", "--alpha", "1"}), 1);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run_cli({}), 1);
  EXPECT_EQ(run_cli({"frobnicate"}), 1);
  EXPECT_EQ(run_cli({"energy", "eval"}), 1);
  EXPECT_EQ(run_cli({"energy", "eval", "--config", out("missing.json")}), 1);
}

TEST_F(CliTest, IdentityEnergyIsZero) {
  const auto cfg = config("e.json", json::parse(R"J({"surface": {"family": "plate"}, "h": 0.1})J"));
  ASSERT_EQ(run_cli({"energy", "eval", "--config", cfg, "--out", out("e")}), 0);
  const json r = report("e");
  EXPECT_EQ(r["schema_version"], 1);
  EXPECT_EQ(r["results"]["value"], 0.0);
  EXPECT_EQ(r["config_echo"]["ansatz"], "identity");
  EXPECT_TRUE(fs::exists(dir_ / "e" / "config.resolved.json"));
}

TEST_F(CliTest, ValidationAndSolverFailuresGoToTheReport) {
  const auto bad = config("bad.json", json::parse(R"J({"surface": {"family": "plate"}, "h": -1})J"));
  EXPECT_EQ(run_cli({"energy", "eval", "--config", bad, "--out", out("bad")}), 1);
  EXPECT_EQ(report("bad")["results"]["error"]["code"], "BadConfig");

  const auto typo = config("typo.json", json::parse(R"J({"surface": {"family": "plate"}, "hh": 0.1})J"));
  EXPECT_EQ(run_cli({"energy", "eval", "--config", typo, "--out", out("typo")}), 1);

  const auto degenerate = config("deg.json", json::parse(R"J({"surface": {"family": "plate"}, "h": 0.1,
                                  "ansatz": {"kirchhoff_love": ["u", "0", "0"]}})J"));
  EXPECT_EQ(run_cli({"energy", "eval", "--config", degenerate, "--out", out("deg")}), 2);
  EXPECT_EQ(report("deg")["results"]["error"]["code"], "DegenerateImage");
}

TEST_F(CliTest, ScalingRunWritesCsvAndIsReproducible) {
  const auto cfg = config("k.json", kKirchhoff);
  ASSERT_EQ(run_cli({"scaling", "run", "--config", cfg, "--out", out("a"), "--threads", "1"}), 0);
  ASSERT_EQ(run_cli({"scaling", "run", "--config", cfg, "--out", out("b"), "--threads", "4"}), 0);
  const std::string csv = slurp(dir_ / "a" / "data.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "h,E_h,E_h_over_h_beta,stretching,bending");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_EQ(csv, slurp(dir_ / "b" / "data.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "report.json"), slurp(dir_ / "b" / "report.json"));
  EXPECT_NEAR(report("a")["results"]["beta_hat"].get<double>(), 2.0, 0.05);
  EXPECT_TRUE(fs::exists(dir_ / "a" / "energy.dat"));

  // Replaying the resolved config reproduces the report byte for byte.
  const std::string resolved = (dir_ / "a" / "config.resolved.json").string();
  ASSERT_EQ(run_cli({"scaling", "run", "--config", resolved, "--out", out("c")}), 0);
  EXPECT_EQ(slurp(dir_ / "a" / "report.json"), slurp(dir_ / "c" / "report.json"));
}

TEST_F(CliTest, GridOverride) {
  const auto cfg = config("s.json", json::parse(R"J({"surface": {"family": "spherical_cap"}})J"));
  ASSERT_EQ(run_cli({"surface", "show", "--config", cfg, "--out", out("s"), "--grid", "10", "--quad", "3"}), 0);
  const json r = report("s");
  EXPECT_EQ(r["config_echo"]["surface"]["grid"], json::array({10, 10}));
  EXPECT_EQ(r["config_echo"]["surface"]["quad_order"], 3);
  EXPECT_TRUE(r["results"]["ellipticity"]["is_elliptic"].get<bool>());
}

TEST_F(CliTest, MaterialCheckSeed) {
  const auto cfg = config("m.json", json::parse(R"J({"samples": 200})J"));
  ASSERT_EQ(run_cli({"material", "check", "--config", cfg, "--out", out("m1"), "--seed", "9"}), 0);
  ASSERT_EQ(run_cli({"material", "check", "--config", cfg, "--out", out("m2"), "--seed", "9"}), 0);
  EXPECT_EQ(slurp(dir_ / "m1" / "report.json"), slurp(dir_ / "m2" / "report.json"));
  EXPECT_EQ(report("m1")["config_echo"]["seed"], 9);
  EXPECT_LE(report("m1")["results"]["q2_mismatch"].get<double>(), 1e-10);
}

TEST_F(CliTest, IsometrySolve) {
  const auto cfg = config("i.json", json::parse(R"J({"surface": {"family": "plate", "grid": 10}, "count": 2,
      "hierarchy": [["0", "0", "u^2"]], "plate_check": ["0", "0", "u^2+v^2"]})J"));
  ASSERT_EQ(run_cli({"isometry", "solve", "--config", cfg, "--out", out("i")}), 0);
  const json r = report("i")["results"];
  EXPECT_EQ(r["isometry_order"]["order"], 1);
  EXPECT_FALSE(r["plate_check"]["in_V2"].get<bool>());
  EXPECT_EQ(r["modes"]["quotients"].size(), 2u);
}

TEST(EmitReport, EmptyReportHasMetadataOnly) {
  const fs::path dir = fs::temp_directory_path() / "shellhier_emit_empty";
  fs::remove_all(dir);
  const auto files = emit_report(Report{}, dir);
  ASSERT_EQ(files.size(), 1u);
  const json r = json::parse(std::ifstream(dir / "report.json"));
  EXPECT_EQ(r["schema_version"], 1);
  EXPECT_TRUE(r["config_echo"].is_null());
  EXPECT_TRUE(r["results"].empty());
  EXPECT_TRUE(r.contains("tool_version"));
  fs::remove_all(dir);
}

}  // namespace
}  // namespace shellhier::cli
