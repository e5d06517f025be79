#include "swarmkld/bench.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>

using namespace swarmkld;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path d = fs::temp_directory_path() / "swarmkld_bench_test";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ExperimentConfig small_1d(std::vector<double> sigma2) {
  ExperimentConfig c = default_sweep1d_config();
  c.trials = 3;
  c.steps = 10;
  c.sweeps = {{"sigma2", std::move(sigma2)}};
  return c;
}

ResultRow sample_row(const std::string& alg, double v) {
  ResultRow r;
  r.sweep_var = "sigma1";
  r.sweep_value = v;
  r.algorithm = alg;
  r.rmse_mean = 0.1 + v / 3.0;
  r.rmse_std = 1e-17;
  r.n_mean = 123.456;
  r.n_std = 7.0;
  r.nees_mean = 2.0 / 3.0;
  r.nees_std = 0.5;
  r.k_mean = 44.25;
  r.major_rate = 0.1;
  r.trials = 20;
  r.seed = std::numeric_limits<std::uint64_t>::max();
  return r;
}

TrialRecord rec(double rmse, double n, bool failed = false) {
  TrialRecord r;
  r.sweep_var = "sigma1";
  r.sweep_value = 0.5;
  r.algorithm = "PF";
  r.rmse = rmse;
  r.n = n;
  r.nees = 1.0;
  r.k = 3.0;
  r.failed = failed;
  return r;
}

}  // namespace

TEST(Bench, AlgorithmNames) {
  EXPECT_EQ(algorithm_name(Algorithm::pf), "PF");
  EXPECT_EQ(algorithm_name(Algorithm::cpf), "CPF");
  EXPECT_EQ(parse_algorithm("cpf"), Algorithm::cpf);
  EXPECT_THROW(parse_algorithm("ukf"), std::invalid_argument);
}

TEST(Bench, HeaderIsExact) {
  EXPECT_EQ(kResultHeader,
            "sweep_var,sweep_value,algorithm,rmse_mean,rmse_std,n_mean,n_std,nees_mean,nees_std,k_mean,"
            "major_rate,trials,seed");
}

TEST(Bench, EmptyTableWritesHeaderOnly) {
  const fs::path p = temp_dir() / "empty.csv";
  write_results({}, p);
  EXPECT_EQ(slurp(p), std::string(kResultHeader) + "\n");
  EXPECT_TRUE(read_results(p).empty());
}

TEST(Bench, CsvRoundTrip) {
  const std::vector<ResultRow> rows{sample_row("PF", 0.25), sample_row("CPF", 0.25), sample_row("PF", 1e-300)};
  const fs::path p = temp_dir() / "rt.csv";
  write_results(rows, p);
  EXPECT_EQ(read_results(p), rows);
}

TEST(Bench, CsvRoundTripNonFinite) {
  ResultRow r = sample_row("PF", 1.0);
  r.nees_mean = std::numeric_limits<double>::quiet_NaN();
  r.nees_std = std::numeric_limits<double>::infinity();
  const fs::path p = temp_dir() / "nan.csv";
  write_results(std::vector<ResultRow>{r}, p);
  const auto back = read_results(p);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_TRUE(std::isnan(back[0].nees_mean));
  EXPECT_TRUE(std::isinf(back[0].nees_std));
}

TEST(Bench, ReadRejectsMalformed) {
  const fs::path bad_header = temp_dir() / "bad_header.csv";
  std::ofstream(bad_header) << "a,b,c\n";
  EXPECT_THROW(read_results(bad_header), IoError);
  const fs::path short_row = temp_dir() / "short.csv";
  std::ofstream(short_row) << kResultHeader << "\nsigma1,0.5,PF\n";
  EXPECT_THROW(read_results(short_row), IoError);
  const fs::path bad_num = temp_dir() / "num.csv";
  std::ofstream(bad_num) << kResultHeader << "\nsigma1,x,PF,1,1,1,1,1,1,1,1,1,1\n";
  EXPECT_THROW(read_results(bad_num), IoError);
  EXPECT_THROW(read_results(temp_dir() / "absent.csv"), IoError);
}

TEST(Bench, FormatDoubleIsShortestRoundTrip) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  const double x = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_double(x)), x);
}

TEST(Bench, AggregateSkipsFailedTrials) {
  const std::vector<TrialRecord> r{rec(1.0, 100), rec(3.0, 300), rec(99.0, 9999, true)};
  const ResultRow row = aggregate(r, 7);
  EXPECT_EQ(row.trials, 3u);
  EXPECT_DOUBLE_EQ(row.rmse_mean, 2.0);
  EXPECT_DOUBLE_EQ(row.rmse_std, std::sqrt(2.0));  // sample std, n - 1
  EXPECT_DOUBLE_EQ(row.n_mean, 200.0);
  EXPECT_EQ(row.seed, 7u);
}

TEST(Bench, AggregateAllFailedIsNan) {
  const std::vector<TrialRecord> r{rec(1.0, 1, true)};
  EXPECT_TRUE(std::isnan(aggregate(r, 1).rmse_mean));
  EXPECT_THROW(aggregate({}, 1), std::invalid_argument);
}

TEST(Bench, SingleValueGridGivesTwoRows) {
  const SweepResult r = run_sweep(small_1d({0.5}));
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].algorithm, "PF");
  EXPECT_EQ(r.rows[1].algorithm, "CPF");
  EXPECT_EQ(r.rows[0].trials, 3u);
  EXPECT_EQ(r.trials.size(), 6u);
}

TEST(Bench, SweepIsDeterministic) {
  const ExperimentConfig c = small_1d({0.5, 2.0});
  EXPECT_EQ(run_sweep(c).rows, run_sweep(c).rows);
}

TEST(Bench, TrialSeedsSharedAcrossGrid) {
  const SweepResult r = run_sweep(small_1d({0.5, 2.0}));
  for (const auto& a : r.trials) {
    for (const auto& b : r.trials) {
      if (a.trial == b.trial) EXPECT_EQ(a.trial_seed, b.trial_seed);
    }
  }
}

TEST(Bench, SweepCommandsCheckModel) {
  EXPECT_THROW(run_sweep_cv(small_1d({0.5})), ConfigError);
  EXPECT_THROW(run_sweep_1d(default_sweepcv_config()), ConfigError);
}

TEST(Bench, RunTrialRecordsEveryStep) {
  ExperimentConfig c = default_sweep1d_config();
  c.steps = 12;
  const RunMetrics m = run_trial(c, Algorithm::cpf, 5);
  ASSERT_FALSE(m.failed) << m.failure;
  ASSERT_EQ(m.steps.size(), 12u);
  for (const auto& s : m.steps) {
    EXPECT_GE(s.n_selected, c.kld.n_min);
    EXPECT_GE(s.k_occupied, 1u);
    EXPECT_GE(s.nees, 0.0);
  }
  EXPECT_GT(m.avg_particles, 0.0);
}

TEST(Bench, RunTrialRejectsInvalidConfig) {
  ExperimentConfig c = default_sweep1d_config();
  c.kld.bin_width = {0.1, 0.1};
  EXPECT_THROW(run_trial(c, Algorithm::pf, 1), ConfigError);
}

TEST(Bench, PfAndCpfSeeSameTruth) {
  const ExperimentConfig c = default_sweepcv_config();
  const PairedTrial p = run_paired_trial(c, 3);
  ASSERT_EQ(p.pf.steps.size(), p.cpf.steps.size());
  for (std::size_t k = 0; k < p.pf.steps.size(); ++k) EXPECT_EQ(p.pf.steps[k].truth, p.cpf.steps[k].truth);
  EXPECT_EQ(p.compared_steps, c.steps);
}

TEST(Bench, DegenerateKernelReproducesPf) {
  for (ExperimentConfig c : {default_sweep1d_config(), default_sweepcv_config()}) {
    c.steps = 20;
    c.cso.rooster_sigma = 0.0;
    c.cso.hooks.lambda = 0.0;
    c.cso.hooks.s1 = 0.0;
    c.cso.hooks.s2 = 0.0;
    const RunMetrics pf = run_trial(c, Algorithm::pf, 11);
    const RunMetrics cpf = run_trial(c, Algorithm::cpf, 11);
    ASSERT_EQ(pf.steps.size(), cpf.steps.size());
    for (std::size_t k = 0; k < pf.steps.size(); ++k) {
      ASSERT_EQ(pf.steps[k].estimate, cpf.steps[k].estimate);
      ASSERT_EQ(pf.steps[k].n_selected, cpf.steps[k].n_selected);
    }
    EXPECT_EQ(pf.position_rmse, cpf.position_rmse);
  }
}

TEST(Bench, CpfSelectsFewerParticlesOnMostTrials) {
  const ExperimentConfig c = default_sweep1d_config();  // sigma1 0.5, sigma2 1
  int fewer = 0;
  for (std::size_t t = 0; t < 20; ++t) {
    const PairedTrial p = run_paired_trial(c, trial_seed(c.seed, t));
    ASSERT_FALSE(p.pf.failed || p.cpf.failed);
    fewer += p.cpf.avg_particles < p.pf.avg_particles ? 1 : 0;
  }
  EXPECT_GE(fewer, 16);
}

TEST(Bench, SidecarCarriesConfigAndSeed) {
  ExperimentConfig c = small_1d({0.5});
  c.seed = 4242;
  const SweepResult r = run_sweep(c);
  const fs::path p = temp_dir() / "side.json";
  write_sidecar(c, r, p);
  const auto j = nlohmann::json::parse(slurp(p));
  EXPECT_EQ(j.at("run").at("master_seed").get<std::uint64_t>(), 4242u);
  EXPECT_EQ(j.at("run").at("csv_header").get<std::string>(), kResultHeader);
  EXPECT_EQ(j.at("config"), to_json(c));
}

TEST(Bench, TrialRecordsAndTraceFiles) {
  const SweepResult r = run_sweep(small_1d({0.5}));
  const fs::path tp = temp_dir() / "trials.csv";
  write_trial_records(r.trials, tp);
  const std::string body = slurp(tp);
  EXPECT_EQ(body.rfind("sweep_var,sweep_value,algorithm,trial,trial_seed,rmse,n,nees,k,major_rate,failed\n", 0), 0u);
  EXPECT_EQ(std::count(body.begin(), body.end(), '\n'), 7);

  ExperimentConfig c = default_sweepcv_config();
  c.steps = 5;
  const fs::path trace = temp_dir() / "trace.csv";
  write_trace(run_trial(c, Algorithm::pf, 1), Algorithm::pf, trace);
  write_trace(run_trial(c, Algorithm::cpf, 1), Algorithm::cpf, trace, true);
  const std::string t = slurp(trace);
  EXPECT_EQ(t.rfind("step,algorithm,est_0,est_1,est_2,est_3,truth_0,truth_1,truth_2,truth_3,n,k,nees,contraction\n", 0), 0u);
  EXPECT_EQ(std::count(t.begin(), t.end(), '\n'), 11);
}

TEST(Bench, UnwritablePathRaisesIoError) {
  const fs::path blocker = temp_dir() / "blocker";
  std::ofstream(blocker) << "x";
  EXPECT_THROW(write_results({}, blocker / "sub" / "out.csv"), IoError);
}
