#pragma once

#include "swarmkld/core.hpp"
#include "swarmkld/rng.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <unordered_set>
#include <vector>

namespace swarmkld {

/// KLD-sampling parameters. bin_width has one entry per binned dimension.
struct KldConfig {
  double epsilon = 0.05;
  double delta = 0.01;
  std::vector<double> bin_width{0.25};
  std::size_t n_min = 50;
  std::size_t n_max = 5000;

  void validate() const;
};

/// Integer bin coordinates of a state, one entry per binned dimension.
struct BinIndex {
  std::array<std::int64_t, kMaxDim> cell{};
  std::size_t dim = 0;

  friend bool operator==(const BinIndex& a, const BinIndex& b) noexcept {
    return a.dim == b.dim && a.cell == b.cell;
  }
};

struct BinIndexHash {
  std::size_t operator()(const BinIndex& b) const noexcept;
};

/// Axis-aligned histogram over selected state dimensions. Bin j along a
/// dimension covers [origin + j*h, origin + (j+1)*h).
class HistogramGrid {
 public:
  HistogramGrid(std::vector<double> bin_width, std::vector<double> origin,
                std::vector<std::size_t> dims);

  /// Grid over `dims` anchored at zero.
  static HistogramGrid zero_anchored(std::vector<double> bin_width, std::vector<std::size_t> dims);

  [[nodiscard]] BinIndex index_of(const StateVector& x) const;

  /// Marks the bin of x occupied. Returns true if it was empty before.
  bool insert(const StateVector& x);

  [[nodiscard]] std::size_t occupied() const noexcept { return occupied_.size(); }
  [[nodiscard]] bool contains(const BinIndex& b) const { return occupied_.contains(b); }

  /// Same geometry, nothing occupied.
  [[nodiscard]] HistogramGrid empty_copy() const;

  [[nodiscard]] std::span<const double> bin_width() const noexcept { return bin_width_; }
  [[nodiscard]] std::span<const double> origin() const noexcept { return origin_; }
  [[nodiscard]] std::span<const std::size_t> dims() const noexcept { return dims_; }

 private:
  std::vector<double> bin_width_;
  std::vector<double> origin_;
  std::vector<std::size_t> dims_;
  std::unordered_set<BinIndex, BinIndexHash> occupied_;
};

BinIndex bin_index(const StateVector& x, const HistogramGrid& grid);

/// (k - 1 + ln(2/delta)) / (2 epsilon), before rounding and clamping.
double kld_bound_raw(std::size_t k, const KldConfig& config);

/// Required sample count for k occupied bins: ceil of the raw bound,
/// clamped to [n_min, n_max].
std::size_t kld_bound(std::size_t k, const KldConfig& config);

/// Bins touched by at least one particle, regardless of weight.
std::size_t count_occupied(const ParticleSet& set, const HistogramGrid& grid_template);

struct KldSampleResult {
  ParticleSet set;  // uniform weights
  std::size_t occupied_bins = 0;
  std::size_t drawn = 0;
};

using ParticleSource = std::function<StateVector(Rng&)>;

/// Draws from `source` until the drawn count reaches the bound implied by the
/// occupied bins so far, or n_max.
KldSampleResult kld_sample(const ParticleSource& source, const HistogramGrid& grid_template,
                           const KldConfig& config, Rng& rng);

/// Source that picks a particle of `set` with probability equal to its weight.
ParticleSource weighted_source(const ParticleSet& set);

}  // namespace swarmkld
