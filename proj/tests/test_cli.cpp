#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pbsim/sweep.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("pbsim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  Result run(const std::string& args) {
    const auto log = dir_ / "stdout.txt";
    const std::string cmd = std::string(PBSIM_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ifstream is(log);
    std::stringstream ss;
    ss << is.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
  }

  fs::path dir_;
};

const char* kSmallSweep = R"({
  "name": "small",
  "model": "one_cavity",
  "params": { "omega_drive": 46.7, "n_trunc": 6 },
  "sweep": { "axis": "delta", "range": [0.0, 0.5], "points": 6 }
})";

}  // namespace

TEST_F(Cli, SimulateWritesCsv) {
  const auto cfg = write("c.json", kSmallSweep);
  const auto out = dir_ / "out.csv";
  const auto r = run("simulate --config " + cfg.string() + " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const auto rows = pbsim::read_csv(out.string());
  EXPECT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows.back().axis_value, 0.5);
}

TEST_F(Cli, SimulateWithRunsWritesOneFilePerRun) {
  auto cfg_text = std::string(kSmallSweep);
  cfg_text.insert(cfg_text.rfind('}'), R"(, "runs": [ { "name": "a" }, { "name": "b", "params": { "eps": 0.02 } } ])");
  const auto cfg = write("c.json", cfg_text);
  const auto r = run("simulate --config " + cfg.string() + " --out " + (dir_ / "out.csv").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(dir_ / "out_small_a.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out_small_b.csv"));
}

TEST_F(Cli, ConfigErrorsExitTwo) {
  EXPECT_EQ(run("simulate --config " + (dir_ / "missing.json").string() + " --out x.csv").code, 2);
  EXPECT_EQ(run("simulate --config " + write("bad.json", "{ nope").string() + " --out x.csv").code, 2);
  auto unknown = std::string(kSmallSweep);
  unknown.insert(1, R"("colour": "blue",)");
  EXPECT_EQ(run("simulate --config " + write("u.json", unknown).string() + " --out x.csv").code, 2);
  EXPECT_EQ(run("simulate --config " + write("c.json", kSmallSweep).string()).code, 2);  // --out missing
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("presets run no_such_preset").code, 2);
}

TEST_F(Cli, UnwritableOutputExitsTwo) {
  const auto cfg = write("c.json", kSmallSweep);
  const auto r = run("simulate --config " + cfg.string() + " --out /proc/pbsim/denied.csv");
  EXPECT_EQ(r.code, 2) << r.out;
}

TEST_F(Cli, BoundaryMinimumExitsThree) {
  const auto cfg = write("edge.json", R"({
    "model": "one_cavity",
    "params": { "n_trunc": 6 },
    "sweep": { "axis": "omega_drive", "range": [40, 60], "points": 5 }
  })");
  const auto r = run("optimum --config " + cfg.string());
  EXPECT_EQ(r.code, 3) << r.out;
  EXPECT_NE(r.out.find("widen the range"), std::string::npos);
}

TEST_F(Cli, OptimumReportsCoupling) {
  const auto cfg = write("opt.json", R"({
    "model": "one_cavity",
    "params": { "n_trunc": 6 },
    "sweep": { "axis": "omega_drive", "range": [60, 110], "points": 11 }
  })");
  const auto r = run("optimum --config " + cfg.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("omega_drive=83"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("predicted_optimal_coupling=0.5007494"), std::string::npos) << r.out;
}

TEST_F(Cli, BoundariesPrintsSequence) {
  const auto cfg = write("b.json", R"({
    "model": "one_cavity",
    "params": { "omega_drive": 46.7, "n_trunc": 6 },
    "sweep": { "axis": "delta", "range": [0.005, 0.3], "points": 60 },
    "solver": { "boundary_tol": 1e-3 }
  })");
  const auto r = run("boundaries --config " + cfg.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("region A  1>g2>g4>g3"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("region F  g4>g3>g2>1"), std::string::npos) << r.out;
}

TEST_F(Cli, PresetsList) {
  const auto r = run("presets list");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "fig3\nfig4\nfig6a\nfig6b\nfig7\nfig8\n");
}
