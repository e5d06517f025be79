#include "swarmkld/filter.hpp"
#include "swarmkld/metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace swarmkld;

namespace {

ParticleSet cloud_1d(std::initializer_list<double> xs) {
  std::vector<StateVector> s;
  for (double x : xs) s.push_back(StateVector{x});
  return ParticleSet::uniform(std::move(s));
}

// Scalar Kalman filter for x_k = x_{k-1} + w, z_k = x_k + v, started from
// the same N(z0, sigma2^2) prior the particle filter uses.
std::vector<double> kalman_estimates(const std::vector<Observation>& zs, double s1, double s2) {
  std::vector<double> out;
  double m = zs.front()[0];
  double p = s2 * s2;
  out.push_back(m);
  for (std::size_t k = 1; k < zs.size(); ++k) {
    p += s1 * s1;
    const double gain = p / (p + s2 * s2);
    m += gain * (zs[k][0] - m);
    p *= 1.0 - gain;
    out.push_back(m);
  }
  return out;
}

}  // namespace

TEST(Predict, VanishingNoiseKeepsStates) {
  LinearGauss1D::Params p;
  p.sigma1 = 1e-300;
  const ParticleSet set = cloud_1d({-1.0, 0.5, 3.0});
  Rng rng(1);
  const ParticleSet out = predict(set, LinearGauss1D(p), rng);
  for (std::size_t i = 0; i < set.size(); ++i) EXPECT_DOUBLE_EQ(out.state(i)[0], set.state(i)[0]);
}

TEST(Predict, WeightsUnchanged) {
  const ParticleSet set({{0.0}, {1.0}, {2.0}}, {0.2, 0.3, 0.5});
  Rng rng(2);
  const ParticleSet out = predict(set, LinearGauss1D({}), rng);
  EXPECT_TRUE(std::equal(out.weights().begin(), out.weights().end(), set.weights().begin()));
}

TEST(Reweight, EqualLikelihoodsKeepWeights) {
  // Two particles symmetric about z see the same likelihood.
  const ParticleSet set({{-1.0}, {1.0}}, {0.3, 0.7});
  const ParticleSet out = reweight(set, Observation{0.0}, LinearGauss1D({}));
  EXPECT_NEAR(out.weight(0), 0.3, 1e-15);
  EXPECT_NEAR(out.weight(1), 0.7, 1e-15);
}

TEST(Reweight, ProportionalToLikelihood) {
  const LinearGauss1D m({});
  const ParticleSet set = cloud_1d({0.0, 1.5});
  const double l0 = m.likelihood(set.state(0), Observation{1.0});
  const double l1 = m.likelihood(set.state(1), Observation{1.0});
  const ParticleSet out = reweight(set, Observation{1.0}, m);
  EXPECT_NEAR(out.weight(0), l0 / (l0 + l1), 1e-15);
  EXPECT_NEAR(out.weight(1), l1 / (l0 + l1), 1e-15);
}

TEST(Reweight, ParticleOnObservationDominates) {
  LinearGauss1D::Params p;
  p.sigma2 = 0.1;
  const ParticleSet out = reweight(cloud_1d({2.0, 7.0}), Observation{2.0}, LinearGauss1D(p));
  EXPECT_GT(out.weight(0), 0.999999);
}

TEST(Reweight, TotalCollapseThrows) {
  LinearGauss1D::Params p;
  p.sigma2 = 1e-3;
  EXPECT_THROW(reweight(cloud_1d({0.0, 1.0}), Observation{1e6}, LinearGauss1D(p)), AllZeroWeights);
}

TEST(SystematicResample, PointMass) {
  const std::vector<double> w{1.0, 0.0, 0.0};
  Rng rng(3);
  for (std::size_t i : systematic_resample(w, 5, rng)) EXPECT_EQ(i, 0u);
}

TEST(SystematicResample, UniformCountsWithinOne) {
  const auto w = uniform_weights(37);
  Rng rng(4);
  std::vector<int> counts(37, 0);
  for (std::size_t i : systematic_resample(w, 37, rng)) counts[i]++;
  for (int c : counts) EXPECT_LE(std::abs(c - 1), 1);
}

TEST(SystematicResample, HalfHalfAnyOffset) {
  const std::vector<double> w{0.5, 0.5};
  for (double u : {0.0, 0.1, 0.5, 0.999999}) {
    const auto idx = systematic_resample_with_offset(w, 4, u);
    EXPECT_EQ(std::count(idx.begin(), idx.end(), 0u), 2) << "u=" << u;
    EXPECT_EQ(std::count(idx.begin(), idx.end(), 1u), 2) << "u=" << u;
  }
}

TEST(SystematicResample, NeverPicksZeroWeightTail) {
  // Cumulative sum falls short of 1 through rounding.
  const std::vector<double> w{0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.0};
  const auto idx = systematic_resample_with_offset(w, 10, 0.999999999);
  for (std::size_t i : idx) EXPECT_LT(i, 10u);
}

TEST(SystematicResample, RejectsBadInput) {
  const std::vector<double> w{1.0};
  EXPECT_THROW(systematic_resample_with_offset({}, 3, 0.5), std::invalid_argument);
  EXPECT_THROW(systematic_resample_with_offset(w, 0, 0.5), std::invalid_argument);
  EXPECT_THROW(systematic_resample_with_offset(w, 3, 1.0), std::invalid_argument);
}

TEST(PfStep, NoiseFreeAtTruth) {
  LinearGauss1D::Params p;
  p.sigma1 = 1e-300;
  p.sigma2 = 1e-3;
  Rng rng(5);
  const auto r = pf_step(cloud_1d({2.0, 2.0, 2.0}), Observation{2.0}, LinearGauss1D(p), {}, rng);
  EXPECT_DOUBLE_EQ(r.estimate[0], 2.0);
}

TEST(PfStep, ThresholdOneAlwaysResamples) {
  PfConfig cfg;
  cfg.ess_threshold = 1.0;
  Rng rng(6);
  ParticleSet set = cloud_1d({0.0, 0.1, 0.2, 0.3});
  for (int k = 0; k < 5; ++k) {
    auto r = pf_step(set, Observation{0.1}, LinearGauss1D({}), cfg, rng);
    EXPECT_TRUE(r.resampled);
    set = std::move(r.set);
  }
}

TEST(PfStep, CollapseFallsBackToUniform) {
  LinearGauss1D::Params p;
  p.sigma2 = 1e-3;
  Rng rng(7);
  const auto r = pf_step(cloud_1d({0.0, 1.0}), Observation{1e6}, LinearGauss1D(p), {}, rng);
  EXPECT_TRUE(r.weights_reset);
}

TEST(PfStep, TracksKalmanFilterRmse) {
  const LinearGauss1D model({});
  const std::vector<std::size_t> dims{0};
  double pf_sq = 0.0, kf_sq = 0.0;
  for (std::uint64_t run = 0; run < 10; ++run) {
    Rng data(1000 + run);
    const Trajectory t = simulate_trajectory(model, 50, data);
    const auto kf = kalman_estimates(t.observations, 0.5, 1.0);

    Rng rng(2000 + run);
    std::vector<StateVector> init;
    for (int i = 0; i < 500; ++i) init.push_back(model.initial_sample(t.observations[0], rng));
    ParticleSet set = ParticleSet::uniform(std::move(init));
    std::vector<StateVector> est{weighted_mean(set)};
    for (std::size_t k = 1; k < 50; ++k) {
      auto r = pf_step(set, t.observations[k], model, {}, rng);
      est.push_back(r.estimate);
      set = std::move(r.set);
    }
    std::vector<StateVector> kf_est;
    for (double m : kf) kf_est.push_back(StateVector{m});
    pf_sq += std::pow(rmse(est, t.states, dims), 2);
    kf_sq += std::pow(rmse(kf_est, t.states, dims), 2);
  }
  const double pf = std::sqrt(pf_sq / 10), kf = std::sqrt(kf_sq / 10);
  EXPECT_LE(std::abs(pf - kf), 0.15 * kf) << "pf " << pf << " kf " << kf;
}
