#include "swarmkld/kld.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

namespace swarmkld {

void KldConfig::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("kld.epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("kld.delta must be in (0, 1)");
  if (bin_width.empty()) throw std::invalid_argument("kld.bin_width must not be empty");
  for (double h : bin_width) {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("kld.bin_width entries must be > 0");
  }
  if (n_min < 1 || n_min > n_max) throw std::invalid_argument("kld: need 1 <= n_min <= n_max");
}

std::size_t BinIndexHash::operator()(const BinIndex& b) const noexcept {
  std::uint64_t h = 0x84222325cbf29ce4ULL ^ b.dim;
  for (std::size_t i = 0; i < b.dim; ++i) {
    h ^= static_cast<std::uint64_t>(b.cell[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

HistogramGrid::HistogramGrid(std::vector<double> bin_width, std::vector<double> origin,
                             std::vector<std::size_t> dims)
    : bin_width_(std::move(bin_width)), origin_(std::move(origin)), dims_(std::move(dims)) {
  if (dims_.empty() || dims_.size() > kMaxDim) throw std::invalid_argument("grid: bad dimension list");
  if (bin_width_.size() != dims_.size() || origin_.size() != dims_.size()) {
    throw std::invalid_argument("grid: bin_width, origin and dims must have equal length");
  }
  for (double h : bin_width_) {
    if (!(h > 0.0)) throw std::invalid_argument("grid: bin widths must be positive");
  }
}

HistogramGrid HistogramGrid::zero_anchored(std::vector<double> bin_width,
                                           std::vector<std::size_t> dims) {
  std::vector<double> origin(dims.size(), 0.0);
  return HistogramGrid(std::move(bin_width), std::move(origin), std::move(dims));
}

BinIndex HistogramGrid::index_of(const StateVector& x) const {
  BinIndex b;
  b.dim = dims_.size();
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const std::size_t d = dims_[i];
    if (d >= x.size()) throw std::out_of_range("grid: binned dimension exceeds state dimension");
    b.cell[i] = static_cast<std::int64_t>(std::floor((x[d] - origin_[i]) / bin_width_[i]));
  }
  return b;
}

bool HistogramGrid::insert(const StateVector& x) { return occupied_.insert(index_of(x)).second; }

HistogramGrid HistogramGrid::empty_copy() const { return HistogramGrid(bin_width_, origin_, dims_); }

BinIndex bin_index(const StateVector& x, const HistogramGrid& grid) { return grid.index_of(x); }

double kld_bound_raw(std::size_t k, const KldConfig& config) {
  if (k < 1) throw std::invalid_argument("kld_bound: k must be >= 1");
  return (static_cast<double>(k) - 1.0 + std::log(2.0 / config.delta)) / (2.0 * config.epsilon);
}

std::size_t kld_bound(std::size_t k, const KldConfig& config) {
  const double raw = std::ceil(kld_bound_raw(k, config));
  if (raw >= static_cast<double>(config.n_max)) return config.n_max;
  return std::max(config.n_min, static_cast<std::size_t>(raw));
}

std::size_t count_occupied(const ParticleSet& set, const HistogramGrid& grid_template) {
  HistogramGrid grid = grid_template.empty_copy();
  for (const auto& x : set.states()) grid.insert(x);
  return grid.occupied();
}

KldSampleResult kld_sample(const ParticleSource& source, const HistogramGrid& grid_template,
                           const KldConfig& config, Rng& rng) {
  config.validate();
  HistogramGrid grid = grid_template.empty_copy();
  std::vector<StateVector> drawn;
  drawn.reserve(config.n_min);
  std::size_t required = config.n_min;
  while (true) {
    StateVector x = source(rng);
    if (grid.insert(x)) required = kld_bound(grid.occupied(), config);
    drawn.push_back(x);
    if (drawn.size() >= required || drawn.size() >= config.n_max) break;
  }
  const std::size_t k = grid.occupied();
  const std::size_t n = drawn.size();
  return {ParticleSet::uniform(std::move(drawn)), k, n};
}

ParticleSource weighted_source(const ParticleSet& set) {
  auto shared = std::make_shared<const ParticleSet>(set);
  const auto w = shared->weights();
  auto pick = std::make_shared<std::discrete_distribution<std::size_t>>(w.begin(), w.end());
  return [shared, pick](Rng& rng) { return shared->state((*pick)(rng)); };
}

}  // namespace swarmkld
