#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "orient_cli_test";

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " '" ORIENT_CLI_PATH "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string write_config(const std::string& name, const std::string& body) {
  fs::create_directories(kDir);
  const fs::path p = kDir / name;
  std::ofstream(p) << body;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

const char* kSweep =
    R"({"experiment":"snr_sweep","seed":3,"L":30,"trials":5,"relative_sigma":[0.2,2],"phantom":{"n":10}})";

}  // namespace

TEST(Cli, SuccessWritesOutputs) {
  const auto cfg = write_config("ok.json", kSweep);
  const fs::path out = kDir / "ok_out";
  fs::remove_all(out);
  ASSERT_EQ(run("snr_sweep --config " + cfg + " --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "results.csv"));
  EXPECT_TRUE(fs::exists(out / "results.json"));
  EXPECT_TRUE(fs::is_directory(out / "volumes"));
  EXPECT_TRUE(fs::is_directory(out / "traces"));
  EXPECT_EQ(slurp(out / "results.csv").substr(0, 67),
            "experiment,seed,sigma,snr,L,estimator,metric_mean,metric_se,trials\n");
}

TEST(Cli, ConfigErrorsExitWithTwo) {
  const auto cfg = write_config("ok.json", kSweep);
  EXPECT_EQ(run("snr_sweep"), 2);
  EXPECT_EQ(run("no_such_experiment --config " + cfg), 2);
  EXPECT_EQ(run("snr_sweep --config " + cfg + " --threads 0"), 2);
  EXPECT_EQ(run("snr_sweep --config " + write_config("bad.json", R"({"experiment":"snr_sweep"})")), 2);
  EXPECT_EQ(run("snr_sweep --config " + write_config("broken.json", "{")), 2);
  EXPECT_EQ(run("prior_mismatch --config " + cfg), 2);
  EXPECT_EQ(run("snr_sweep --config " + cfg + " --out " + (kDir / "x").string(), "OB_THREADS=zero"), 2);
}

TEST(Cli, IoErrorsExitWithThree) {
  const auto cfg = write_config("ok.json", kSweep);
  EXPECT_EQ(run("snr_sweep --config " + (kDir / "missing.json").string()), 3);
  const auto blocker = write_config("blocker", "x");
  EXPECT_EQ(run("snr_sweep --config " + cfg + " --out " + blocker + "/sub"), 3);
  const auto loaded = write_config(
      "loaded.json",
      R"({"experiment":"snr_sweep","L":5,"trials":1,"sigma":1,"phantom":{"kind":"loaded","path":"/nonexistent.obv"}})");
  EXPECT_EQ(run("snr_sweep --config " + loaded + " --out " + (kDir / "l").string()), 3);
}

TEST(Cli, SeedFlagOverridesConfig) {
  const auto cfg = write_config("ok.json", kSweep);
  ASSERT_EQ(run("snr_sweep --config " + cfg + " --seed 11 --out " + (kDir / "s11").string()), 0);
  EXPECT_NE(slurp(kDir / "s11" / "results.csv").find("snr_sweep,11,"), std::string::npos);
}

TEST(Cli, OutputsIdenticalAcrossThreadCounts) {
  const auto cfg = write_config("ok.json", kSweep);
  const std::string out = (kDir / "threads").string();
  std::vector<std::string> csv, json;
  for (const std::string& t : {"--threads 1", "--threads 4", "--threads 8"}) {
    ASSERT_EQ(run("snr_sweep --config " + cfg + " " + t + " --out " + out), 0);
    csv.push_back(slurp(kDir / "threads" / "results.csv"));
    json.push_back(slurp(kDir / "threads" / "results.json"));
  }
  ASSERT_EQ(run("snr_sweep --config " + cfg + " --threads 8 --out " + out, "OB_THREADS=2"), 0);
  csv.push_back(slurp(kDir / "threads" / "results.csv"));
  json.push_back(slurp(kDir / "threads" / "results.json"));
  for (std::size_t i = 1; i < csv.size(); ++i) {
    EXPECT_EQ(csv[i], csv[0]);
    EXPECT_EQ(json[i], json[0]);
  }
}
