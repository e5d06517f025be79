#include "swarmkld/kld.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace swarmkld;

namespace {

KldConfig cfg(std::size_t n_min = 1, std::size_t n_max = 100000) {
  KldConfig c;
  c.n_min = n_min;
  c.n_max = n_max;
  return c;
}

}  // namespace

TEST(HistogramGrid, OriginIsBinZero) {
  const auto g = HistogramGrid::zero_anchored({0.5, 0.5}, {0, 2});
  const BinIndex b = g.index_of(StateVector{0, 9, 0, 9});
  EXPECT_EQ(b.dim, 2u);
  EXPECT_EQ(b.cell[0], 0);
  EXPECT_EQ(b.cell[1], 0);
}

TEST(HistogramGrid, LeftClosedBins) {
  const auto g = HistogramGrid::zero_anchored({1.0}, {0});
  EXPECT_EQ(g.index_of(StateVector{0.999}).cell[0], 0);
  EXPECT_EQ(g.index_of(StateVector{1.0}).cell[0], 1);
}

TEST(HistogramGrid, FloorArithmetic2D) {
  const HistogramGrid g({2.0, 2.0}, {0.0, 0.0}, {0, 1});
  const BinIndex b = bin_index(StateVector{3.5, -0.1}, g);
  EXPECT_EQ(b.cell[0], 1);
  EXPECT_EQ(b.cell[1], -1);
}

TEST(HistogramGrid, ShiftedOrigin) {
  const HistogramGrid g({1.0}, {0.5}, {0});
  EXPECT_EQ(g.index_of(StateVector{0.4}).cell[0], -1);
  EXPECT_EQ(g.index_of(StateVector{0.5}).cell[0], 0);
}

TEST(HistogramGrid, RejectsBadGeometry) {
  EXPECT_THROW(HistogramGrid({1.0}, {0.0, 0.0}, {0}), std::invalid_argument);
  EXPECT_THROW(HistogramGrid({0.0}, {0.0}, {0}), std::invalid_argument);
  EXPECT_THROW((void)HistogramGrid::zero_anchored({1.0}, {3}).index_of(StateVector{1.0}), std::out_of_range);
}

TEST(KldBound, SpotValue) {
  EXPECT_EQ(kld_bound(1, cfg()), 53u);
  EXPECT_EQ(static_cast<std::size_t>(std::ceil(10.0 * std::log(200.0))), 53u);
}

TEST(KldBound, LinearInK) {
  EXPECT_NEAR(kld_bound_raw(11, cfg()) - kld_bound_raw(1, cfg()), 100.0, 1e-9);
  EXPECT_EQ(kld_bound(11, cfg()), 153u);
}

TEST(KldBound, Clamps) {
  EXPECT_EQ(kld_bound(1, cfg(500)), 500u);
  EXPECT_EQ(kld_bound(1000, cfg(1, 200)), 200u);
  EXPECT_THROW(kld_bound_raw(0, cfg()), std::invalid_argument);
}

TEST(KldBound, NondecreasingInK) {
  std::size_t prev = 0;
  for (std::size_t k = 1; k < 500; ++k) {
    const std::size_t n = kld_bound(k, cfg());
    ASSERT_GE(n, prev);
    prev = n;
  }
}

TEST(KldConfig, Validation) {
  EXPECT_NO_THROW(KldConfig{}.validate());
  KldConfig c;
  c.epsilon = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.delta = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.n_min = 10;
  c.n_max = 5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(CountOccupied, Examples) {
  const auto g = HistogramGrid::zero_anchored({1.0}, {0});
  EXPECT_EQ(count_occupied(ParticleSet::uniform({{0.3}, {0.3}, {0.3}}), g), 1u);
  EXPECT_EQ(count_occupied(ParticleSet::uniform({{0.1}, {1.1}, {2.1}}), g), 3u);
  // occupancy is by position, zero weight counts
  EXPECT_EQ(count_occupied(ParticleSet({{0.1}, {1.1}, {2.1}}, {1.0, 0.0, 0.0}), g), 3u);
}

TEST(KldSample, SingleBinStopsAtBound) {
  const auto g = HistogramGrid::zero_anchored({1.0}, {0});
  Rng rng(1);
  const auto r = kld_sample([](Rng& q) { return StateVector{0.5 * q.uniform()}; }, g, cfg(50), rng);
  EXPECT_EQ(r.occupied_bins, 1u);
  EXPECT_EQ(r.drawn, 53u);
  EXPECT_EQ(r.set.size(), 53u);
}

TEST(KldSample, ConstantSourceTerminates) {
  const auto g = HistogramGrid::zero_anchored({0.25}, {0});
  Rng rng(2);
  const auto r = kld_sample([](Rng&) { return StateVector{3.0}; }, g, cfg(10), rng);
  EXPECT_EQ(r.occupied_bins, 1u);
  EXPECT_EQ(r.drawn, 53u);
}

TEST(KldSample, ClampedByNMax) {
  const auto g = HistogramGrid::zero_anchored({0.01}, {0});
  Rng rng(3);
  const auto r = kld_sample([](Rng& q) { return StateVector{q.normal(0.0, 100.0)}; }, g, cfg(1, 100), rng);
  EXPECT_EQ(r.drawn, 100u);
}

TEST(KldSample, DrawnMatchesBoundOfFinalOccupancy) {
  const auto g = HistogramGrid::zero_anchored({0.25}, {0});
  Rng rng(4);
  const auto r = kld_sample([](Rng& q) { return StateVector{q.normal()}; }, g, cfg(50), rng);
  EXPECT_EQ(r.drawn, kld_bound(r.occupied_bins, cfg(50)));
  EXPECT_EQ(count_occupied(r.set, g), r.occupied_bins);
}

TEST(KldSample, WiderCloudNeedsMoreParticles) {
  const auto g = HistogramGrid::zero_anchored({0.25}, {0});
  Rng a(5), b(5);
  const auto narrow = kld_sample([](Rng& q) { return StateVector{q.normal(0.0, 0.5)}; }, g, cfg(50), a);
  const auto wide = kld_sample([](Rng& q) { return StateVector{q.normal(0.0, 2.0)}; }, g, cfg(50), b);
  EXPECT_LT(narrow.drawn, wide.drawn);
}

TEST(WeightedSource, ChiSquareAgainstWeights) {
  const std::vector<double> w{0.1, 0.2, 0.3, 0.4};
  const ParticleSet set({{0.0}, {1.0}, {2.0}, {3.0}}, w);
  const ParticleSource src = weighted_source(set);
  Rng rng(6);
  const int n = 40000;
  std::vector<int> counts(4, 0);
  for (int i = 0; i < n; ++i) counts[static_cast<std::size_t>(src(rng)[0])]++;
  double chi2 = 0.0;
  for (std::size_t j = 0; j < 4; ++j) {
    const double e = n * w[j];
    chi2 += (counts[j] - e) * (counts[j] - e) / e;
  }
  EXPECT_LT(chi2, 16.27);  // 3 dof, p = 0.001
}

TEST(WeightedSource, ZeroWeightNeverDrawn) {
  const ParticleSet set({{0.0}, {1.0}}, {0.0, 1.0});
  const ParticleSource src = weighted_source(set);
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(src(rng)[0], 1.0);
}
