#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string output;  // stdout and stderr
};

Outcome run(const std::string& args) {
  const std::string cmd = std::string("\"") + SWARMKLD_CLI_PATH + "\" " + args + " 2>&1";
  Outcome r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "swarmkld_cli_test" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Cli, VerifyPassesAndWritesReport) {
  const fs::path out = fresh_dir("verify");
  const Outcome r = run("verify --seed 7 --out \"" + out.string() + "\"");
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(fs::exists(out / "theory_report.txt"));
  EXPECT_TRUE(fs::exists(out / "theory_report.json"));
  EXPECT_NE(slurp(out / "theory_report.txt").find("karamata_occupancy"), std::string::npos);
}

TEST(Cli, UnknownFlagIsUsageError) {
  const Outcome r = run("sweep1d --bogus 3");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("--bogus"), std::string::npos) << r.output;
  EXPECT_NE(r.output.find("Usage"), std::string::npos) << r.output;
}

TEST(Cli, MissingSubcommandIsUsageError) {
  EXPECT_EQ(run("").code, 2);
}

TEST(Cli, HelpExitsZero) {
  const Outcome r = run("--help");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.output.find("sweepcv"), std::string::npos);
}

TEST(Cli, MissingConfigNamesPath) {
  const std::string path = (fs::temp_directory_path() / "swarmkld_missing.cfg").string();
  const Outcome r = run("sweep1d --config \"" + path + "\"");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find(path), std::string::npos) << r.output;
}

TEST(Cli, BadConfigKeyIsUsageError) {
  const fs::path dir = fresh_dir("badkey");
  std::ofstream(dir / "c.json") << R"({"trails": 3})";
  const Outcome r = run("sweep1d --config \"" + (dir / "c.json").string() + "\" --out \"" + dir.string() + "\"");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("trails"), std::string::npos) << r.output;
}

TEST(Cli, VerifyMissingConfigNamesPath) {
  const std::string path = (fs::temp_directory_path() / "swarmkld_missing_verify.json").string();
  const Outcome r = run("verify --config \"" + path + "\"");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find(path), std::string::npos) << r.output;
}

TEST(Cli, SweepWritesCsvAndReplayableSidecar) {
  const fs::path a = fresh_dir("sweep_a");
  const fs::path b = fresh_dir("sweep_b");
  std::ofstream(a / "small.json") << R"({"name": "tiny", "trials": 2, "steps": 8,
    "sweeps": [{"variable": "sigma1", "values": [0.5]}]})";
  Outcome r = run("sweep1d --seed 13 --per-trial --config \"" + (a / "small.json").string() + "\" --out \"" +
              a.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.output;
  const std::string csv = slurp(a / "tiny.csv");
  EXPECT_EQ(csv.rfind("sweep_var,sweep_value,algorithm,rmse_mean,rmse_std,n_mean,n_std,nees_mean,nees_std,"
                      "k_mean,major_rate,trials,seed\n",
                      0),
            0u);
  EXPECT_TRUE(fs::exists(a / "tiny.json"));
  EXPECT_TRUE(fs::exists(a / "tiny_trials.csv"));

  // The sidecar alone reproduces the run.
  r = run("sweep1d --config \"" + (a / "tiny.json").string() + "\" --out \"" + b.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(slurp(b / "tiny.csv"), csv);
}

TEST(Cli, SweepcvRejectsLinearConfig) {
  const fs::path d = fresh_dir("wrong_model");
  std::ofstream(d / "c.json") << R"({"model": "linear1d", "sweeps": [{"variable": "sigma1", "values": [1]}]})";
  EXPECT_EQ(run("sweepcv --config \"" + (d / "c.json").string() + "\" --out \"" + d.string() + "\"").code, 2);
}

TEST(Cli, DemoWritesTrace) {
  const fs::path d = fresh_dir("demo");
  const Outcome r = run("demo --model cv2d --steps 6 --seed 2 --out \"" + d.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.output;
  const std::string trace = slurp(d / "demo_trace.csv");
  EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 13);
  EXPECT_NE(trace.find(",CPF,"), std::string::npos);
}

TEST(Cli, DemoRejectsUnknownModel) {
  EXPECT_EQ(run("demo --model ukf").code, 2);
}
