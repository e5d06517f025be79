#pragma once

#include "swarmkld/core.hpp"
#include "swarmkld/models.hpp"
#include "swarmkld/parallel.hpp"
#include "swarmkld/rng.hpp"

#include <vector>

namespace swarmkld {

/// Fixed-size bootstrap filter settings. Resampling is always systematic.
struct PfConfig {
  double ess_threshold = 0.5;  // resample when ESS / N falls below this, (0, 1]

  void validate() const;
};

/// Advances every particle through the transition prior; weights unchanged.
/// Particle i draws from a stream forked from one draw of `rng`.
ParticleSet predict(const ParticleSet& set, const StateSpaceModel& model, Rng& rng,
                    Exec exec = Exec::parallel);

/// Likelihood of every particle against z, in index order.
std::vector<double> evaluate_likelihoods(std::span<const StateVector> states, const Observation& z,
                                         const StateSpaceModel& model, Exec exec = Exec::parallel);

/// w_i <- w_i * p(z | x_i), renormalized. Throws AllZeroWeights.
ParticleSet reweight(const ParticleSet& set, const Observation& z, const StateSpaceModel& model,
                     Exec exec = Exec::parallel);

/// Stratified comb over the cumulative weights with a single uniform offset.
std::vector<std::size_t> systematic_resample(std::span<const double> weights, std::size_t n_out,
                                             Rng& rng);

/// Same comb with the offset supplied directly, u in [0, 1).
std::vector<std::size_t> systematic_resample_with_offset(std::span<const double> weights,
                                                         std::size_t n_out, double u);

/// Equal-weight set built from the given ancestors.
ParticleSet select(const ParticleSet& set, std::span<const std::size_t> ancestors);

struct PfStepResult {
  ParticleSet set;
  StateVector estimate;
  bool resampled = false;
  bool weights_reset = false;  // likelihood collapsed, uniform weights used
};

/// predict -> reweight -> estimate -> resample if ESS fraction < threshold.
PfStepResult pf_step(const ParticleSet& set, const Observation& z, const StateSpaceModel& model,
                     const PfConfig& config, Rng& rng, Exec exec = Exec::parallel);

}  // namespace swarmkld
