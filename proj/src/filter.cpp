#include "swarmkld/filter.hpp"

#include <stdexcept>

namespace swarmkld {

void PfConfig::validate() const {
  if (!(ess_threshold > 0.0 && ess_threshold <= 1.0)) {
    throw std::invalid_argument("pf.ess_threshold must be in (0, 1]");
  }
}

ParticleSet predict(const ParticleSet& set, const StateSpaceModel& model, Rng& rng, Exec exec) {
  const Rng base = rng.split();
  const auto in = set.states();
  std::vector<StateVector> out(in.size());
  for_each_index(in.size(), exec, [&](std::size_t i) {
    Rng local = base.fork(i);
    out[i] = model.transition_sample(in[i], local);
  });
  return set.with_states(std::move(out));
}

std::vector<double> evaluate_likelihoods(std::span<const StateVector> states, const Observation& z,
                                         const StateSpaceModel& model, Exec exec) {
  std::vector<double> out(states.size());
  for_each_index(states.size(), exec,
                 [&](std::size_t i) { out[i] = model.likelihood(states[i], z); });
  return out;
}

ParticleSet reweight(const ParticleSet& set, const Observation& z, const StateSpaceModel& model,
                     Exec exec) {
  auto lik = evaluate_likelihoods(set.states(), z, model, exec);
  const auto prior = set.weights();
  for (std::size_t i = 0; i < lik.size(); ++i) lik[i] *= prior[i];
  return set.with_weights(normalize_weights(lik));
}

std::vector<std::size_t> systematic_resample_with_offset(std::span<const double> weights,
                                                         std::size_t n_out, double u) {
  if (weights.empty()) throw std::invalid_argument("systematic_resample: no weights");
  if (n_out == 0) throw std::invalid_argument("systematic_resample: n_out must be >= 1");
  if (!(u >= 0.0 && u < 1.0)) throw std::invalid_argument("systematic_resample: offset not in [0,1)");
  std::vector<std::size_t> idx(n_out);
  const double step = 1.0 / static_cast<double>(n_out);
  const std::size_t last = weights.size() - 1;
  std::size_t j = 0;
  double cumulative = weights[0];
  for (std::size_t m = 0; m < n_out; ++m) {
    const double target = (static_cast<double>(m) + u) * step;
    // Roundoff can leave the cumulative sum a hair below 1; clamp to the
    // last index carrying weight.
    while (target >= cumulative && j < last) cumulative += weights[++j];
    idx[m] = j;
  }
  // Never hand out a zero-weight tail index picked up by the clamp.
  for (auto& i : idx) {
    while (weights[i] == 0.0 && i > 0) --i;
  }
  return idx;
}

std::vector<std::size_t> systematic_resample(std::span<const double> weights, std::size_t n_out,
                                             Rng& rng) {
  return systematic_resample_with_offset(weights, n_out, rng.uniform());
}

ParticleSet select(const ParticleSet& set, std::span<const std::size_t> ancestors) {
  std::vector<StateVector> states;
  states.reserve(ancestors.size());
  for (std::size_t a : ancestors) states.push_back(set.state(a));
  return ParticleSet::uniform(std::move(states));
}

PfStepResult pf_step(const ParticleSet& set, const Observation& z, const StateSpaceModel& model,
                     const PfConfig& config, Rng& rng, Exec exec) {
  config.validate();
  ParticleSet predicted = predict(set, model, rng, exec);
  bool reset = false;
  ParticleSet weighted = [&] {
    try {
      return reweight(predicted, z, model, exec);
    } catch (const AllZeroWeights&) {
      reset = true;
      return predicted.with_weights(uniform_weights(predicted.size()));
    }
  }();
  StateVector estimate = weighted_mean(weighted);
  const double ess_fraction =
      effective_sample_size(weighted.weights()) / static_cast<double>(weighted.size());
  if (config.ess_threshold >= 1.0 || ess_fraction < config.ess_threshold) {
    const auto ancestors = systematic_resample(weighted.weights(), weighted.size(), rng);
    return {select(weighted, ancestors), estimate, true, reset};
  }
  return {std::move(weighted), estimate, false, reset};
}

}  // namespace swarmkld
