#include "swarmkld/core.hpp"

#include <numeric>

namespace swarmkld {
namespace {

void check_weights(std::span<const double> weights) {
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("weights must be finite and nonnegative");
    }
  }
}

}  // namespace

ParticleSet::ParticleSet(std::vector<StateVector> states, std::vector<double> weights)
    : states_(std::move(states)), weights_(std::move(weights)) {
  if (states_.empty()) throw std::invalid_argument("particle set must not be empty");
  if (states_.size() != weights_.size()) {
    throw std::invalid_argument("particle set: " + std::to_string(states_.size()) + " states but " +
                                std::to_string(weights_.size()) + " weights");
  }
  const std::size_t d = states_.front().size();
  for (const auto& s : states_) {
    if (s.size() != d) throw std::invalid_argument("particle set: mixed state dimensions");
  }
  check_weights(weights_);
}

ParticleSet ParticleSet::uniform(std::vector<StateVector> states) {
  auto w = uniform_weights(states.size());
  return ParticleSet(std::move(states), std::move(w));
}

ParticleSet ParticleSet::with_weights(std::vector<double> weights) const& {
  return ParticleSet(states_, std::move(weights));
}

ParticleSet ParticleSet::with_weights(std::vector<double> weights) && {
  return ParticleSet(std::move(states_), std::move(weights));
}

ParticleSet ParticleSet::with_states(std::vector<StateVector> states) const& {
  return ParticleSet(std::move(states), weights_);
}

std::vector<double> normalize_weights(std::span<const double> weights) {
  check_weights(weights);
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw AllZeroWeights();
  std::vector<double> out(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) out[i] = weights[i] / total;
  return out;
}

std::vector<double> uniform_weights(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_weights: n must be positive");
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

double effective_sample_size(std::span<const double> weights) {
  double sq = 0.0;
  for (double w : weights) sq += w * w;
  return sq > 0.0 ? 1.0 / sq : 0.0;
}

StateVector weighted_mean(const ParticleSet& set) {
  StateVector mean(set.dim());
  const auto states = set.states();
  const auto weights = set.weights();
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += weights[i] * states[i][d];
  }
  return mean;
}

Eigen::MatrixXd weighted_covariance(const ParticleSet& set, std::span<const std::size_t> dims) {
  const auto n = static_cast<Eigen::Index>(dims.size());
  for (std::size_t d : dims) {
    if (d >= set.dim()) throw std::out_of_range("weighted_covariance: dimension out of range");
  }
  const StateVector mean = weighted_mean(set);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd e(n);
  const auto states = set.states();
  const auto weights = set.weights();
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (Eigen::Index a = 0; a < n; ++a) {
      const auto d = dims[static_cast<std::size_t>(a)];
      e[a] = states[i][d] - mean[d];
    }
    cov.noalias() += weights[i] * (e * e.transpose());
  }
  return cov;
}

}  // namespace swarmkld
