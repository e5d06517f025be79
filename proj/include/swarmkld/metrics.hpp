#pragma once

#include "swarmkld/core.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace swarmkld {

class LengthMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Per-step record of one filter run.
struct StepRecord {
  StateVector estimate;
  StateVector truth;
  std::size_t n_selected = 0;
  std::size_t k_occupied = 0;
  double nees = 0.0;
  double contraction = 1.0;  // CSO mean-square ratio; 1 when no rejuvenation ran
};

struct RunMetrics {
  double position_rmse = 0.0;
  double avg_particles = 0.0;
  double avg_nees = 0.0;
  double avg_occupied = 0.0;
  std::size_t regularized_nees_steps = 0;
  std::size_t weight_resets = 0;
  std::size_t reverted_cso_rounds = 0;
  bool failed = false;
  std::string failure;
  std::vector<StepRecord> steps;
};

/// sqrt(mean_t |e_t|^2) over the selected dims.
double rmse(std::span<const StateVector> estimates, std::span<const StateVector> truths,
            std::span<const std::size_t> dims);

struct NeesResult {
  double value = 0.0;
  bool regularized = false;
};

/// Condition number above which a covariance is treated as singular.
inline constexpr double kNeesConditionLimit = 1e12;

/// e^T C^-1 e over `dims`, C over the same dims. A singular or
/// ill-conditioned C gets 1e-9 * trace/dim added to its diagonal.
NeesResult nees(const StateVector& estimate, const Eigen::MatrixXd& covariance,
                const StateVector& truth, std::span<const std::size_t> dims);

/// 100 (n_pf - n_cpf) / n_pf.
double reduction_percent(double n_pf, double n_cpf);

/// Fills the averages of `m` from its step series.
void summarize(RunMetrics& m, std::span<const std::size_t> position_dims);

}  // namespace swarmkld
