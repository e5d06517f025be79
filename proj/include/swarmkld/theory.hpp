#pragma once

#include "swarmkld/core.hpp"
#include "swarmkld/cso.hpp"
#include "swarmkld/kld.hpp"
#include "swarmkld/rng.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace swarmkld::theory {

class TooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotMajorized : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ZeroBefore : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Equality tolerance for probability-vector comparisons.
inline constexpr double kProbTol = 1e-12;

/// Largest outcome space brute_force_occupied will enumerate.
inline constexpr double kBruteForceLimit = 1e7;

/// Probability vector over histogram bins. Validated to sum to 1.
class BinProbabilityVector {
 public:
  explicit BinProbabilityVector(std::vector<double> p);

  /// Rescales nonnegative masses to sum to 1.
  static BinProbabilityVector normalized(std::vector<double> masses);

  [[nodiscard]] std::span<const double> values() const noexcept { return p_; }
  [[nodiscard]] std::size_t size() const noexcept { return p_.size(); }

 private:
  std::vector<double> p_;
};

/// f_N(p) = 1 - (1 - p)^N, evaluated as -expm1(N log1p(-p)).
double occupancy_prob(double p, std::size_t n);

/// (1 - p)^N, the probability that a bin of mass p stays empty.
double empty_prob(double p, std::size_t n);

/// Sum_j f_N(p_j).
double expected_occupied_exact(const BinProbabilityVector& p, std::size_t n);

/// Same expectation by enumerating all m^N outcomes. Throws TooLarge past the
/// enumeration limit.
double brute_force_occupied(const BinProbabilityVector& p, std::size_t n);

/// p majorizes q: sorted-descending prefix sums of p dominate those of q and
/// the totals agree. Shorter input is zero-padded.
bool majorizes(std::span<const double> p, std::span<const double> q, double tol = kProbTol);

struct KaramataReport {
  double expected_p = 0.0;
  double expected_q = 0.0;
  double slack = 0.0;  // expected_q - expected_p
  bool holds = false;
  std::size_t n = 0;
};

/// Checks E[K_p] <= E[K_q] for p majorizing q. Throws NotMajorized.
KaramataReport karamata_check(const BinProbabilityVector& p, const BinProbabilityVector& q,
                              std::size_t n);

struct ContractionStats {
  double ratio = 0.0;
  double msd_before = 0.0;
  double msd_after = 0.0;
};

/// Mean squared displacement from x_star before and after, paired by index.
ContractionStats contraction_ratio(std::span<const StateVector> before,
                                   std::span<const StateVector> after, const StateVector& x_star);
ContractionStats contraction_ratio(const ParticleSet& before, const ParticleSet& after,
                                   const StateVector& x_star);

/// Bin frequencies (by count) of a set on `grid`, keyed by bin.
std::vector<std::pair<BinIndex, double>> bin_frequencies(const ParticleSet& set,
                                                         const HistogramGrid& grid);

struct MajorizationVerdict {
  bool a_majorizes_b = false;
  bool b_majorizes_a = false;
  std::vector<double> a;  // zero-padded to the union of occupied bins
  std::vector<double> b;
};

MajorizationVerdict majorization_from_particles(const ParticleSet& a, const ParticleSet& b,
                                                const HistogramGrid& grid);

/// Constants of the role-wise contraction model.
struct ContractionAssumptions {
  StateVector x_star{0.0};
  double r0 = 1.0;          // alignment radius
  double alpha = 0.5;       // leaders at most alpha times the follower displacement
  double l1 = 0.3, l2 = 0.3;  // step caps
  double gamma = 0.1;       // L1 + L2 >= gamma
  double lambda_max = 0.8;
  double rooster_var_bound = 0.0;  // B_r

  void validate() const;

  /// E[(1 - S1 r1 (1 - c_r) - S2 r2 (1 - c_h))^2] with r ~ U[0,1] and
  /// c_r, c_h ~ U[0, alpha], at S1 = l1, S2 = l2.
  [[nodiscard]] double hen_factor() const;
  /// E[(1 - lambda (1 - c_m))^2] with lambda ~ U[0, lambda_max], c_m ~ U[0, alpha].
  [[nodiscard]] double chick_factor() const;
  /// pi_R + pi_H rho_H + pi_C rho_C for the given role probabilities.
  [[nodiscard]] double global_factor(double pi_rooster, double pi_hen, double pi_chick) const;
};

/// Closed-form E[(1 - lambda (1 - c))^2] for lambda ~ U[0, lambda_max] and a
/// fixed alignment coefficient c.
double chick_factor_fixed(double lambda_max, double c);

struct MonteCarloRatio {
  double measured = 0.0;
  double standard_error = 0.0;
  double expected = 0.0;
  std::size_t samples = 0;
  [[nodiscard]] bool within(double n_se) const {
    return std::abs(measured - expected) <= n_se * standard_error;
  }
};

/// Synthetic aligned hens: |d_i| in [r0, 10 r0], leaders at c d_i with
/// c ~ U[0, alpha], steps pinned to (l1, l2) through the CSO hooks, r drawn
/// by the hen update itself.
MonteCarloRatio hen_contraction_experiment(const ContractionAssumptions& a, std::size_t count,
                                           std::size_t rounds, Rng& rng);

/// Synthetic chicks with mothers at c_m d_i for fixed c_m.
MonteCarloRatio chick_contraction_experiment(double lambda_max, double c_m, std::size_t count,
                                             Rng& rng);

struct RoosterMoments {
  std::vector<double> drift;     // per-dimension mean of out - in
  std::vector<double> drift_se;  // per-dimension standard error
  double second_moment = 0.0;    // mean |out - in|^2
  double expected_second_moment = 0.0;
  std::size_t samples = 0;
};

RoosterMoments rooster_moments(std::size_t dim, double sigma, std::size_t count, Rng& rng);

/// Random p majorizing q built by Robin-Hood moves on q: mass shifts from a
/// smaller coordinate to a larger one.
std::pair<BinProbabilityVector, BinProbabilityVector> robin_hood_pair(std::size_t m,
                                                                      std::size_t transfers,
                                                                      Rng& rng);

// ---------------------------------------------------------------------------
// Theory suite

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct TheoryReport {
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;
  double total_seconds = 0.0;

  [[nodiscard]] bool all_passed() const;
  [[nodiscard]] std::string to_text() const;
  [[nodiscard]] std::string to_json() const;
};

struct SuiteSizes {
  std::size_t karamata_pairs = 1000;
  std::size_t oracle_instances = 200;
  std::size_t concavity_grid = 1000;
  std::size_t hen_particles = 10000;
  std::size_t chick_particles = 10000;
  std::size_t rooster_draws = 100000;
};

/// Runs every property check of the contraction/occupancy theory.
TheoryReport run_theory_suite(std::uint64_t seed, const SuiteSizes& sizes = {});

}  // namespace swarmkld::theory
