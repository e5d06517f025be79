#pragma once

#include "swarmkld/core.hpp"
#include "swarmkld/models.hpp"
#include "swarmkld/parallel.hpp"
#include "swarmkld/rng.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace swarmkld {

/// Pins random or derived quantities of the role updates. Used by tests and
/// by the degenerate-kernel equivalence check.
struct CsoHooks {
  std::optional<double> lambda;  // chick interpolation factor
  std::optional<double> s1;      // hen step toward its rooster
  std::optional<double> s2;      // hen step toward its second leader
  std::optional<double> r1;
  std::optional<double> r2;
};

struct CsoConfig {
  double rooster_frac = 0.5;
  double hen_frac = 0.1;
  double rooster_sigma = 0.05;  // per-dimension jitter std, state units
  double lambda_max = 0.45;     // chick lambda ~ U[0, lambda_max]
  double fitness_eps = 1e-12;
  std::size_t rounds = 1;
  CsoHooks hooks;

  void validate() const;
};

enum class Role : std::uint8_t { rooster, hen, chick };

inline constexpr std::size_t kNoLeader = std::numeric_limits<std::size_t>::max();

/// Roles for one CSO round. Leader/mother entries are particle indices, or
/// kNoLeader where the role has none.
struct RoleAssignment {
  std::vector<Role> roles;
  std::vector<std::size_t> rooster_leader;  // hens
  std::vector<std::size_t> second_leader;   // hens: another hen, or a rooster
  std::vector<std::size_t> mother;          // chicks
  std::vector<std::size_t> rank;            // particle indices by weight, best first
  std::size_t roosters = 0;
  std::size_t hens = 0;
  std::size_t chicks = 0;
};

/// Tier sizes ceil(rooster_frac N), ceil(hen_frac N) (capped), rest chicks.
struct TierSizes {
  std::size_t roosters, hens, chicks;
};
TierSizes tier_sizes(std::size_t n, const CsoConfig& config);

/// Raised when the population is too small to form roles.
class TooFewParticles : public std::invalid_argument {
 public:
  explicit TooFewParticles(std::size_t n);
};

/// Sorts by weight (descending, ties by index) and assigns roles and leaders.
RoleAssignment assign_roles(std::span<const double> weights, const CsoConfig& config, Rng& rng);

/// x_r + N(0, rooster_sigma^2) per dimension.
StateVector rooster_update(const StateVector& x_r, const CsoConfig& config, Rng& rng);

struct HenFitness {
  double self = 0.0;
  double rooster = 0.0;
  double hen = 0.0;
};

struct StepSizes {
  double s1, s2;
};

/// S1 = exp((f_i - f_r) / (|f_i| + eps)), S2 = exp(f_h - f_i), unless hooked.
StepSizes hen_step_sizes(const HenFitness& f, const CsoConfig& config);

/// x + S1 r1 (x_r - x) + S2 r2 (x_h - x), r1, r2 ~ U[0, 1].
StateVector hen_update(const StateVector& x_i, const StateVector& x_r, const StateVector& x_h,
                       const HenFitness& f, const CsoConfig& config, Rng& rng);

/// x + lambda (x_m - x), lambda ~ U[0, lambda_max].
StateVector chick_update(const StateVector& x_i, const StateVector& x_m, const CsoConfig& config,
                         Rng& rng);

/// Moves every particle according to its role. Particle i draws from
/// base.fork(i); the result is independent of the execution policy.
std::vector<StateVector> cso_moves(const ParticleSet& set, const RoleAssignment& roles,
                                   const CsoConfig& config, const Rng& base,
                                   Exec exec = Exec::parallel);

struct CsoResult {
  ParticleSet set;
  std::size_t reverted_rounds = 0;  // rounds undone because all weights vanished
};

/// `rounds` iterations of: assign roles, move, re-weight by p(z | x') from a
/// uniform prior. A round whose refreshed weights are all zero is reverted.
CsoResult cso_rejuvenate(const ParticleSet& set, const Observation& z, const StateSpaceModel& model,
                         const CsoConfig& config, Rng& rng, Exec exec = Exec::parallel);

}  // namespace swarmkld
