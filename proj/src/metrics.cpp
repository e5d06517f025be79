#include "swarmkld/metrics.hpp"

#include <cmath>
#include <string>

namespace swarmkld {

double rmse(std::span<const StateVector> estimates, std::span<const StateVector> truths,
            std::span<const std::size_t> dims) {
  if (estimates.size() != truths.size()) {
    throw LengthMismatch("rmse: " + std::to_string(estimates.size()) + " estimates vs " +
                         std::to_string(truths.size()) + " truths");
  }
  if (estimates.empty()) throw std::invalid_argument("rmse: empty series");
  double acc = 0.0;
  for (std::size_t t = 0; t < estimates.size(); ++t) {
    for (std::size_t d : dims) {
      const double e = estimates[t][d] - truths[t][d];
      acc += e * e;
    }
  }
  return std::sqrt(acc / static_cast<double>(estimates.size()));
}

NeesResult nees(const StateVector& estimate, const Eigen::MatrixXd& covariance,
                const StateVector& truth, std::span<const std::size_t> dims) {
  const auto n = static_cast<Eigen::Index>(dims.size());
  if (covariance.rows() != n || covariance.cols() != n) {
    throw std::invalid_argument("nees: covariance shape does not match dims");
  }
  Eigen::VectorXd e(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto d = dims[static_cast<std::size_t>(i)];
    e[i] = estimate[d] - truth[d];
  }
  Eigen::MatrixXd c = 0.5 * (covariance + covariance.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  NeesResult r;
  if (!(lo > 0.0) || hi / lo > kNeesConditionLimit) {
    const double trace = c.trace();
    const double scale = trace > 0.0 ? trace / static_cast<double>(n) : 1.0;
    c.diagonal().array() += 1e-9 * scale;
    r.regularized = true;
  }
  r.value = e.dot(c.ldlt().solve(e));
  return r;
}

double reduction_percent(double n_pf, double n_cpf) {
  if (!(n_pf > 0.0)) throw std::invalid_argument("reduction_percent: n_pf must be > 0");
  return 100.0 * (n_pf - n_cpf) / n_pf;
}

void summarize(RunMetrics& m, std::span<const std::size_t> position_dims) {
  std::vector<StateVector> est;
  std::vector<StateVector> truth;
  double n = 0.0, k = 0.0, q = 0.0;
  for (const auto& s : m.steps) {
    est.push_back(s.estimate);
    truth.push_back(s.truth);
    n += static_cast<double>(s.n_selected);
    k += static_cast<double>(s.k_occupied);
    q += s.nees;
  }
  const auto t = static_cast<double>(m.steps.size());
  m.position_rmse = rmse(est, truth, position_dims);
  m.avg_particles = n / t;
  m.avg_occupied = k / t;
  m.avg_nees = q / t;
}

}  // namespace swarmkld
