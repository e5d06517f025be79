#include "swarmkld/theory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>
#include <unordered_map>

namespace swarmkld::theory {
namespace {

std::vector<double> sorted_desc_padded(std::span<const double> v, std::size_t len) {
  std::vector<double> out(v.begin(), v.end());
  out.resize(len, 0.0);
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

// Delta-method standard error of sum(y) / sum(x) with x treated as fixed.
double ratio_standard_error(std::span<const double> x, std::span<const double> y, double ratio) {
  double sx = 0.0;
  double resid = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    const double e = y[i] - ratio * x[i];
    resid += e * e;
  }
  return std::sqrt(resid) / sx;
}

struct Enumerator {
  std::span<const double> p;
  std::size_t n;
  std::vector<std::size_t> counts;

  // Expected number of distinct bins over the remaining draws, given the
  // `distinct` bins already hit by the prefix.
  double expand(std::size_t depth, std::size_t distinct) {
    if (depth == n) return static_cast<double>(distinct);
    double acc = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (p[j] == 0.0) continue;
      const bool fresh = counts[j]++ == 0;
      acc += p[j] * expand(depth + 1, distinct + (fresh ? 1 : 0));
      --counts[j];
    }
    return acc;
  }
};

}  // namespace

BinProbabilityVector::BinProbabilityVector(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) throw std::invalid_argument("probability vector must be nonempty");
  double total = 0.0;
  for (double v : p_) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("probabilities must lie in [0, 1]");
    total += v;
  }
  if (std::abs(total - 1.0) > kProbTol * static_cast<double>(p_.size())) {
    throw std::invalid_argument("probabilities must sum to 1");
  }
}

BinProbabilityVector BinProbabilityVector::normalized(std::vector<double> masses) {
  const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("cannot normalize zero mass");
  for (double& v : masses) v /= total;
  return BinProbabilityVector(std::move(masses));
}

double occupancy_prob(double p, std::size_t n) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("occupancy_prob: p must be in [0, 1]");
  if (n < 1) throw std::invalid_argument("occupancy_prob: N must be >= 1");
  if (p == 1.0) return 1.0;
  return -std::expm1(static_cast<double>(n) * std::log1p(-p));
}

double empty_prob(double p, std::size_t n) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("empty_prob: p must be in [0, 1]");
  if (p == 1.0) return 0.0;
  return std::exp(static_cast<double>(n) * std::log1p(-p));
}

double expected_occupied_exact(const BinProbabilityVector& p, std::size_t n) {
  double total = 0.0;
  for (double pj : p.values()) total += occupancy_prob(pj, n);
  return total;
}

double brute_force_occupied(const BinProbabilityVector& p, std::size_t n) {
  if (n < 1) throw std::invalid_argument("brute_force_occupied: N must be >= 1");
  const double outcomes = std::pow(static_cast<double>(p.size()), static_cast<double>(n));
  if (outcomes > kBruteForceLimit) {
    throw TooLarge("brute_force_occupied: m^N = " + std::to_string(outcomes) + " exceeds 1e7");
  }
  Enumerator e{p.values(), n, std::vector<std::size_t>(p.size(), 0)};
  return e.expand(0, 0);
}

bool majorizes(std::span<const double> p, std::span<const double> q, double tol) {
  const std::size_t len = std::max(p.size(), q.size());
  const auto ps = sorted_desc_padded(p, len);
  const auto qs = sorted_desc_padded(q, len);
  double sp = 0.0;
  double sq = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    sp += ps[k];
    sq += qs[k];
    if (sp < sq - tol) return false;
  }
  return std::abs(sp - sq) <= tol;
}

KaramataReport karamata_check(const BinProbabilityVector& p, const BinProbabilityVector& q,
                              std::size_t n) {
  if (n < 2) throw std::invalid_argument("karamata_check: N must be >= 2");
  if (!majorizes(p.values(), q.values())) throw NotMajorized("karamata_check: p does not majorize q");
  // Pad to a common length; zero bins contribute f_N(0) = 0 either way.
  KaramataReport r;
  r.n = n;
  r.expected_p = expected_occupied_exact(p, n);
  r.expected_q = expected_occupied_exact(q, n);
  r.slack = r.expected_q - r.expected_p;
  const double tol = kProbTol * static_cast<double>(std::max(p.size(), q.size()));
  r.holds = r.slack >= -tol;
  return r;
}

ContractionStats contraction_ratio(std::span<const StateVector> before,
                                   std::span<const StateVector> after, const StateVector& x_star) {
  if (before.size() != after.size() || before.empty()) {
    throw std::invalid_argument("contraction_ratio: sets must be nonempty and of equal size");
  }
  ContractionStats s;
  for (std::size_t i = 0; i < before.size(); ++i) {
    s.msd_before += (before[i] - x_star).squared_norm();
    s.msd_after += (after[i] - x_star).squared_norm();
  }
  const auto n = static_cast<double>(before.size());
  s.msd_before /= n;
  s.msd_after /= n;
  if (s.msd_before == 0.0) throw ZeroBefore("contraction_ratio: zero displacement before the move");
  s.ratio = s.msd_after / s.msd_before;
  return s;
}

ContractionStats contraction_ratio(const ParticleSet& before, const ParticleSet& after,
                                   const StateVector& x_star) {
  return contraction_ratio(before.states(), after.states(), x_star);
}

std::vector<std::pair<BinIndex, double>> bin_frequencies(const ParticleSet& set,
                                                         const HistogramGrid& grid) {
  std::unordered_map<BinIndex, std::size_t, BinIndexHash> counts;
  for (const auto& x : set.states()) ++counts[grid.index_of(x)];
  std::vector<std::pair<BinIndex, double>> out;
  out.reserve(counts.size());
  const auto n = static_cast<double>(set.size());
  for (const auto& [bin, c] : counts) out.emplace_back(bin, static_cast<double>(c) / n);
  return out;
}

MajorizationVerdict majorization_from_particles(const ParticleSet& a, const ParticleSet& b,
                                                const HistogramGrid& grid) {
  const auto fa = bin_frequencies(a, grid);
  const auto fb = bin_frequencies(b, grid);
  std::unordered_map<BinIndex, std::size_t, BinIndexHash> slot;
  for (const auto& [bin, _] : fa) slot.emplace(bin, slot.size());
  for (const auto& [bin, _] : fb) slot.emplace(bin, slot.size());
  MajorizationVerdict v;
  v.a.assign(slot.size(), 0.0);
  v.b.assign(slot.size(), 0.0);
  for (const auto& [bin, f] : fa) v.a[slot.at(bin)] = f;
  for (const auto& [bin, f] : fb) v.b[slot.at(bin)] = f;
  const auto pa = BinProbabilityVector::normalized(v.a);
  const auto pb = BinProbabilityVector::normalized(v.b);
  v.a_majorizes_b = majorizes(pa.values(), pb.values());
  v.b_majorizes_a = majorizes(pb.values(), pa.values());
  return v;
}

void ContractionAssumptions::validate() const {
  auto open01 = [](double v) { return v > 0.0 && v < 1.0; };
  if (!open01(alpha)) throw std::invalid_argument("alpha must be in (0, 1)");
  if (!open01(gamma)) throw std::invalid_argument("gamma must be in (0, 1)");
  if (!open01(lambda_max)) throw std::invalid_argument("lambda_max must be in (0, 1)");
  if (!(r0 >= 0.0 && l1 >= 0.0 && l2 >= 0.0 && rooster_var_bound >= 0.0)) {
    throw std::invalid_argument("R0, L1, L2, B_r must be nonnegative");
  }
  if (l1 + l2 < gamma) throw std::invalid_argument("need L1 + L2 >= gamma");
}

double ContractionAssumptions::hen_factor() const {
  const double m1 = 1.0 - alpha / 2.0;                 // E[1 - c]
  const double m2 = 1.0 - alpha + alpha * alpha / 3.0;  // E[(1 - c)^2]
  const double ea = l1 * 0.5 * m1;
  const double eb = l2 * 0.5 * m1;
  const double ea2 = l1 * l1 / 3.0 * m2;
  const double eb2 = l2 * l2 / 3.0 * m2;
  return 1.0 - 2.0 * (ea + eb) + ea2 + eb2 + 2.0 * ea * eb;
}

double ContractionAssumptions::chick_factor() const {
  const double m1 = 1.0 - alpha / 2.0;
  const double m2 = 1.0 - alpha + alpha * alpha / 3.0;
  return 1.0 - lambda_max * m1 + lambda_max * lambda_max / 3.0 * m2;
}

double ContractionAssumptions::global_factor(double pi_rooster, double pi_hen, double pi_chick) const {
  return pi_rooster + pi_hen * hen_factor() + pi_chick * chick_factor();
}

double chick_factor_fixed(double lambda_max, double c) {
  const double k = 1.0 - c;
  return 1.0 - lambda_max * k + lambda_max * lambda_max * k * k / 3.0;
}

MonteCarloRatio hen_contraction_experiment(const ContractionAssumptions& a, std::size_t count,
                                           std::size_t rounds, Rng& rng) {
  a.validate();
  CsoConfig cfg;
  cfg.hooks.s1 = a.l1;
  cfg.hooks.s2 = a.l2;
  const double xs = a.x_star[0];
  std::vector<double> before(count);
  std::vector<double> after(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    double d = sign * rng.uniform(a.r0, 10.0 * a.r0);
    before[i] = d * d;
    for (std::size_t k = 0; k < rounds; ++k) {
      const double cr = rng.uniform(0.0, a.alpha);
      const double ch = rng.uniform(0.0, a.alpha);
      const StateVector xi{xs + d};
      const StateVector xr{xs + cr * d};
      const StateVector xh{xs + ch * d};
      d = hen_update(xi, xr, xh, {}, cfg, rng)[0] - xs;
    }
    after[i] = d * d;
  }
  MonteCarloRatio r;
  r.samples = count;
  r.measured = std::accumulate(after.begin(), after.end(), 0.0) /
               std::accumulate(before.begin(), before.end(), 0.0);
  r.standard_error = ratio_standard_error(before, after, r.measured);
  r.expected = std::pow(a.hen_factor(), static_cast<double>(rounds));
  return r;
}

MonteCarloRatio chick_contraction_experiment(double lambda_max, double c_m, std::size_t count,
                                             Rng& rng) {
  CsoConfig cfg;
  cfg.lambda_max = lambda_max;
  std::vector<double> before(count);
  std::vector<double> after(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    const double d = sign * rng.uniform(1.0, 10.0);
    const double d_new = chick_update(StateVector{d}, StateVector{c_m * d}, cfg, rng)[0];
    before[i] = d * d;
    after[i] = d_new * d_new;
  }
  MonteCarloRatio r;
  r.samples = count;
  r.measured = std::accumulate(after.begin(), after.end(), 0.0) /
               std::accumulate(before.begin(), before.end(), 0.0);
  r.standard_error = ratio_standard_error(before, after, r.measured);
  r.expected = chick_factor_fixed(lambda_max, c_m);
  return r;
}

RoosterMoments rooster_moments(std::size_t dim, double sigma, std::size_t count, Rng& rng) {
  CsoConfig cfg;
  cfg.rooster_sigma = sigma;
  RoosterMoments m;
  m.samples = count;
  m.drift.assign(dim, 0.0);
  std::vector<double> sq(dim, 0.0);
  double second = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    StateVector x(dim);
    for (std::size_t d = 0; d < dim; ++d) x[d] = rng.uniform(-5.0, 5.0);
    const StateVector eta = rooster_update(x, cfg, rng) - x;
    for (std::size_t d = 0; d < dim; ++d) {
      m.drift[d] += eta[d];
      sq[d] += eta[d] * eta[d];
    }
    second += eta.squared_norm();
  }
  const auto n = static_cast<double>(count);
  m.drift_se.resize(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    m.drift[d] /= n;
    const double var = (sq[d] / n - m.drift[d] * m.drift[d]) * n / (n - 1.0);
    m.drift_se[d] = std::sqrt(var / n);
  }
  m.second_moment = second / n;
  m.expected_second_moment = static_cast<double>(dim) * sigma * sigma;
  return m;
}

std::pair<BinProbabilityVector, BinProbabilityVector> robin_hood_pair(std::size_t m,
                                                                      std::size_t transfers,
                                                                      Rng& rng) {
  if (m < 1) throw std::invalid_argument("robin_hood_pair: m must be >= 1");
  std::vector<double> q(m);
  for (double& v : q) v = -std::log1p(-rng.uniform());  // Exp(1) masses
  const auto qv = BinProbabilityVector::normalized(q);
  std::vector<double> p(qv.values().begin(), qv.values().end());
  for (std::size_t t = 0; t < transfers && m >= 2; ++t) {
    auto i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(m));
    auto j = static_cast<std::size_t>(rng.uniform() * static_cast<double>(m - 1));
    if (j >= i) ++j;
    if (p[i] < p[j]) std::swap(i, j);
    // i is the richer coordinate; it takes a share of j's mass.
    const double amount = rng.uniform() * p[j];
    p[i] += amount;
    p[j] -= amount;
  }
  return {BinProbabilityVector::normalized(std::move(p)), qv};
}

}  // namespace swarmkld::theory
