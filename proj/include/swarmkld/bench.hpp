#pragma once

#include "swarmkld/config.hpp"
#include "swarmkld/metrics.hpp"
#include "swarmkld/parallel.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace swarmkld {

enum class Algorithm { pf, cpf };

std::string_view algorithm_name(Algorithm a) noexcept;  // "PF" / "CPF"
Algorithm parse_algorithm(std::string_view name);

/// File could not be read or written. The message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stream tags of a trial seed. Truth and filter streams are shared by PF
/// and CPF; only the CPF consumes the rejuvenation stream.
enum StreamTag : std::uint64_t { kTruthStream = 1, kFilterStream = 2, kCsoStream = 3 };

/// Seed of trial `trial` under `master_seed`. Independent of the sweep value,
/// so every grid point sees the same trajectory noise.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial);

/// Called once per step with the selected (post-KLD) cloud and the estimate.
using StepObserver = std::function<void(std::size_t step, const ParticleSet& cloud, const StateVector& estimate)>;

/// One filter run over a freshly simulated trajectory. Errors inside the
/// filter loop are caught and reported through `failed` / `failure`.
RunMetrics run_trial(const ExperimentConfig& config, Algorithm algorithm, std::uint64_t seed,
                     const StepObserver& observer = {}, Exec exec = Exec::serial);

struct PairedTrial {
  RunMetrics pf;
  RunMetrics cpf;
  std::size_t cpf_majorizes_pf = 0;  // steps where the CPF histogram majorizes the PF one
  std::size_t pf_majorizes_cpf = 0;
  std::size_t compared_steps = 0;
};

/// PF and CPF on the same seed. Clouds are compared step by step on a grid
/// anchored at the PF estimate.
PairedTrial run_paired_trial(const ExperimentConfig& config, std::uint64_t seed, Exec exec = Exec::serial);

struct ResultRow {
  std::string sweep_var;
  double sweep_value = 0.0;
  std::string algorithm;
  double rmse_mean = 0.0;
  double rmse_std = 0.0;
  double n_mean = 0.0;
  double n_std = 0.0;
  double nees_mean = 0.0;
  double nees_std = 0.0;
  double k_mean = 0.0;
  double major_rate = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct TrialRecord {
  std::string sweep_var;
  double sweep_value = 0.0;
  std::string algorithm;
  std::size_t trial = 0;
  std::uint64_t trial_seed = 0;
  double rmse = 0.0;
  double n = 0.0;
  double nees = 0.0;
  double k = 0.0;
  double major_rate = 0.0;
  bool failed = false;
  std::string failure;
};

struct SweepResult {
  std::vector<ResultRow> rows;
  std::vector<TrialRecord> trials;
};

inline constexpr std::string_view kResultHeader =
    "sweep_var,sweep_value,algorithm,rmse_mean,rmse_std,n_mean,n_std,nees_mean,nees_std,k_mean,"
    "major_rate,trials,seed";

/// Rows for every axis and grid value of `config.sweeps`, PF then CPF.
/// Trials run as parallel jobs; the output does not depend on the thread count.
SweepResult run_sweep(const ExperimentConfig& config);

/// run_sweep for a linear1d config / a cv2d config.
SweepResult run_sweep_1d(const ExperimentConfig& config);
SweepResult run_sweep_cv(const ExperimentConfig& config);

/// Aggregates per-trial records of one (sweep value, algorithm) cell.
ResultRow aggregate(std::span<const TrialRecord> records, std::uint64_t master_seed);

std::string format_double(double v);

void write_results(std::span<const ResultRow> rows, const std::filesystem::path& path);
std::vector<ResultRow> read_results(const std::filesystem::path& path);
void write_trial_records(std::span<const TrialRecord> records, const std::filesystem::path& path);
void write_sidecar(const ExperimentConfig& config, const SweepResult& result,
                   const std::filesystem::path& path);

/// Per-step trace of one trial: step, algorithm, estimate, truth, n, k,
/// nees, contraction.
void write_trace(const RunMetrics& metrics, Algorithm algorithm, const std::filesystem::path& path,
                 bool append = false);

}  // namespace swarmkld
