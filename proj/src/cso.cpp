#include "swarmkld/cso.hpp"

#include "swarmkld/filter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace swarmkld {
namespace {

// Guards ceil() against products like 0.2 * 10 landing a hair above 2.
constexpr double kCeilSlack = 1e-9;

std::size_t ceil_fraction(double frac, std::size_t n) {
  return static_cast<std::size_t>(std::ceil(frac * static_cast<double>(n) - kCeilSlack));
}

std::size_t pick(std::span<const std::size_t> pool, Rng& rng) {
  const auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(pool.size()));
  return pool[std::min(j, pool.size() - 1)];
}

}  // namespace

TooFewParticles::TooFewParticles(std::size_t n)
    : std::invalid_argument("CSO needs at least 3 particles, got " + std::to_string(n)) {}

void CsoConfig::validate() const {
  if (!(rooster_frac > 0.0 && rooster_frac < 1.0)) throw std::invalid_argument("cso.rooster_frac must be in (0, 1)");
  if (!(hen_frac > 0.0 && hen_frac < 1.0)) throw std::invalid_argument("cso.hen_frac must be in (0, 1)");
  if (!(rooster_frac + hen_frac < 1.0)) throw std::invalid_argument("cso.rooster_frac + cso.hen_frac must be < 1");
  if (!(rooster_sigma >= 0.0) || !std::isfinite(rooster_sigma)) throw std::invalid_argument("cso.rooster_sigma must be >= 0");
  if (!(lambda_max > 0.0 && lambda_max < 1.0)) throw std::invalid_argument("cso.lambda_max must be in (0, 1)");
  if (!(fitness_eps > 0.0)) throw std::invalid_argument("cso.fitness_eps must be > 0");
  if (rounds < 1) throw std::invalid_argument("cso.rounds must be >= 1");
}

TierSizes tier_sizes(std::size_t n, const CsoConfig& config) {
  if (n < 3) throw TooFewParticles(n);
  const std::size_t roosters = std::clamp<std::size_t>(ceil_fraction(config.rooster_frac, n), 1, n);
  const std::size_t hens = std::min(ceil_fraction(config.hen_frac, n), n - roosters);
  return {roosters, hens, n - roosters - hens};
}

RoleAssignment assign_roles(std::span<const double> weights, const CsoConfig& config, Rng& rng) {
  const std::size_t n = weights.size();
  const TierSizes tiers = tier_sizes(n, config);

  RoleAssignment ra;
  ra.rank.resize(n);
  std::iota(ra.rank.begin(), ra.rank.end(), std::size_t{0});
  std::stable_sort(ra.rank.begin(), ra.rank.end(),
                   [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
  ra.roosters = tiers.roosters;
  ra.hens = tiers.hens;
  ra.chicks = tiers.chicks;
  ra.roles.assign(n, Role::chick);
  ra.rooster_leader.assign(n, kNoLeader);
  ra.second_leader.assign(n, kNoLeader);
  ra.mother.assign(n, kNoLeader);

  const std::span<const std::size_t> rank(ra.rank);
  const auto rooster_pool = rank.first(tiers.roosters);
  const auto hen_pool = rank.subspan(tiers.roosters, tiers.hens);
  for (std::size_t i : rooster_pool) ra.roles[i] = Role::rooster;
  for (std::size_t i : hen_pool) ra.roles[i] = Role::hen;

  for (std::size_t slot = 0; slot < hen_pool.size(); ++slot) {
    const std::size_t i = hen_pool[slot];
    ra.rooster_leader[i] = pick(rooster_pool, rng);
    if (hen_pool.size() >= 2) {
      // Uniform over the other hens: draw among n-1 slots and skip our own.
      auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(hen_pool.size() - 1));
      j = std::min(j, hen_pool.size() - 2);
      if (j >= slot) ++j;
      ra.second_leader[i] = hen_pool[j];
    } else {
      ra.second_leader[i] = pick(rooster_pool, rng);
    }
  }
  const auto mother_pool = hen_pool.empty() ? rooster_pool : hen_pool;
  for (std::size_t i : rank.subspan(tiers.roosters + tiers.hens)) ra.mother[i] = pick(mother_pool, rng);
  return ra;
}

StateVector rooster_update(const StateVector& x_r, const CsoConfig& config, Rng& rng) {
  StateVector out = x_r;
  if (config.rooster_sigma == 0.0) return out;
  for (std::size_t d = 0; d < out.size(); ++d) out[d] += config.rooster_sigma * rng.normal();
  return out;
}

StepSizes hen_step_sizes(const HenFitness& f, const CsoConfig& config) {
  const double s1 = config.hooks.s1 ? *config.hooks.s1
                                    : std::exp((f.self - f.rooster) / (std::abs(f.self) + config.fitness_eps));
  const double s2 = config.hooks.s2 ? *config.hooks.s2 : std::exp(f.hen - f.self);
  return {s1, s2};
}

StateVector hen_update(const StateVector& x_i, const StateVector& x_r, const StateVector& x_h,
                       const HenFitness& f, const CsoConfig& config, Rng& rng) {
  const StepSizes s = hen_step_sizes(f, config);
  // Both uniforms are always drawn so hooks do not shift the stream.
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  const double r1 = config.hooks.r1.value_or(u1);
  const double r2 = config.hooks.r2.value_or(u2);
  StateVector out = x_i;
  for (std::size_t d = 0; d < out.size(); ++d) {
    out[d] += s.s1 * r1 * (x_r[d] - x_i[d]) + s.s2 * r2 * (x_h[d] - x_i[d]);
  }
  return out;
}

StateVector chick_update(const StateVector& x_i, const StateVector& x_m, const CsoConfig& config,
                         Rng& rng) {
  const double u = rng.uniform(0.0, config.lambda_max);
  const double lambda = config.hooks.lambda.value_or(u);
  StateVector out = x_i;
  for (std::size_t d = 0; d < out.size(); ++d) out[d] += lambda * (x_m[d] - x_i[d]);
  return out;
}

std::vector<StateVector> cso_moves(const ParticleSet& set, const RoleAssignment& roles,
                                   const CsoConfig& config, const Rng& base, Exec exec) {
  const auto states = set.states();
  const auto w = set.weights();
  std::vector<StateVector> out(states.size());
  for_each_index(states.size(), exec, [&](std::size_t i) {
    Rng local = base.fork(i);
    switch (roles.roles[i]) {
      case Role::rooster:
        out[i] = rooster_update(states[i], config, local);
        break;
      case Role::hen: {
        const std::size_t r = roles.rooster_leader[i];
        const std::size_t h = roles.second_leader[i];
        out[i] = hen_update(states[i], states[r], states[h], {w[i], w[r], w[h]}, config, local);
        break;
      }
      case Role::chick:
        out[i] = chick_update(states[i], states[roles.mother[i]], config, local);
        break;
    }
  });
  return out;
}

CsoResult cso_rejuvenate(const ParticleSet& set, const Observation& z, const StateSpaceModel& model,
                         const CsoConfig& config, Rng& rng, Exec exec) {
  config.validate();
  CsoResult result{set, 0};
  for (std::size_t round = 0; round < config.rounds; ++round) {
    const ParticleSet& current = result.set;
    const RoleAssignment roles = assign_roles(current.weights(), config, rng);
    const Rng base = rng.split();
    ParticleSet moved(cso_moves(current, roles, config, base, exec), uniform_weights(current.size()));
    try {
      result.set = reweight(moved, z, model, exec);
    } catch (const AllZeroWeights&) {
      ++result.reverted_rounds;
    }
  }
  return result;
}

}  // namespace swarmkld
