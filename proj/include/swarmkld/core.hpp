#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace swarmkld {

/// Largest state/observation dimension supported by the inline storage.
inline constexpr std::size_t kMaxDim = 4;

/// Raised when every weight is zero (total likelihood collapse).
class AllZeroWeights : public std::runtime_error {
 public:
  AllZeroWeights() : std::runtime_error("all particle weights are zero") {}
};

/// Small fixed-capacity real vector. Tag keeps states and observations apart.
template <class Tag>
class FixedVector {
 public:
  FixedVector() = default;

  explicit FixedVector(std::size_t dim) : dim_(checked_dim(dim)) {}

  FixedVector(std::initializer_list<double> values) : dim_(checked_dim(values.size())) {
    std::copy(values.begin(), values.end(), data_.begin());
  }

  explicit FixedVector(std::span<const double> values) : dim_(checked_dim(values.size())) {
    std::copy(values.begin(), values.end(), data_.begin());
  }

  [[nodiscard]] std::size_t size() const noexcept { return dim_; }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return data_[i]; }
  double& operator[](std::size_t i) noexcept { return data_[i]; }

  [[nodiscard]] std::span<const double> values() const noexcept { return {data_.data(), dim_}; }
  [[nodiscard]] std::span<double> values() noexcept { return {data_.data(), dim_}; }
  [[nodiscard]] const double* begin() const noexcept { return data_.data(); }
  [[nodiscard]] const double* end() const noexcept { return data_.data() + dim_; }

  [[nodiscard]] bool all_finite() const noexcept {
    return std::all_of(begin(), end(), [](double v) { return std::isfinite(v); });
  }

  [[nodiscard]] double squared_norm() const noexcept {
    double s = 0.0;
    for (double v : *this) s += v * v;
    return s;
  }

  FixedVector& operator+=(const FixedVector& o) noexcept {
    for (std::size_t i = 0; i < dim_; ++i) data_[i] += o.data_[i];
    return *this;
  }
  FixedVector& operator-=(const FixedVector& o) noexcept {
    for (std::size_t i = 0; i < dim_; ++i) data_[i] -= o.data_[i];
    return *this;
  }
  FixedVector& operator*=(double s) noexcept {
    for (std::size_t i = 0; i < dim_; ++i) data_[i] *= s;
    return *this;
  }

  friend FixedVector operator+(FixedVector a, const FixedVector& b) noexcept { return a += b; }
  friend FixedVector operator-(FixedVector a, const FixedVector& b) noexcept { return a -= b; }
  friend FixedVector operator*(FixedVector a, double s) noexcept { return a *= s; }
  friend FixedVector operator*(double s, FixedVector a) noexcept { return a *= s; }

  friend bool operator==(const FixedVector& a, const FixedVector& b) noexcept {
    return a.dim_ == b.dim_ && std::equal(a.begin(), a.end(), b.begin());
  }

 private:
  static std::size_t checked_dim(std::size_t dim) {
    if (dim == 0 || dim > kMaxDim) {
      throw std::invalid_argument("vector dimension must be in [1, " +
                                  std::to_string(kMaxDim) + "], got " + std::to_string(dim));
    }
    return dim;
  }

  std::array<double, kMaxDim> data_{};
  std::size_t dim_ = 0;
};

struct StateTag {};
struct ObservationTag {};

using StateVector = FixedVector<StateTag>;
using Observation = FixedVector<ObservationTag>;

struct Particle {
  StateVector state;
  double weight = 0.0;
};

/// Weighted particle approximation of a posterior. Immutable once built; the
/// with_* builders return modified copies.
class ParticleSet {
 public:
  ParticleSet(std::vector<StateVector> states, std::vector<double> weights);

  /// All weights equal to 1/n.
  static ParticleSet uniform(std::vector<StateVector> states);

  [[nodiscard]] std::size_t size() const noexcept { return states_.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return states_.front().size(); }
  [[nodiscard]] std::span<const StateVector> states() const noexcept { return states_; }
  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
  [[nodiscard]] const StateVector& state(std::size_t i) const { return states_.at(i); }
  [[nodiscard]] double weight(std::size_t i) const { return weights_.at(i); }
  [[nodiscard]] Particle particle(std::size_t i) const { return {state(i), weight(i)}; }

  [[nodiscard]] ParticleSet with_weights(std::vector<double> weights) const&;
  [[nodiscard]] ParticleSet with_weights(std::vector<double> weights) &&;
  [[nodiscard]] ParticleSet with_states(std::vector<StateVector> states) const&;

 private:
  std::vector<StateVector> states_;
  std::vector<double> weights_;
};

/// w / sum(w). Throws AllZeroWeights when the sum is zero, invalid_argument on
/// negative or non-finite input.
std::vector<double> normalize_weights(std::span<const double> weights);

/// 1/n repeated n times.
std::vector<double> uniform_weights(std::size_t n);

/// Kish effective sample size 1 / sum(w_i^2) of normalized weights.
double effective_sample_size(std::span<const double> weights);

StateVector weighted_mean(const ParticleSet& set);

/// Weighted covariance over the selected state dimensions. May be singular.
Eigen::MatrixXd weighted_covariance(const ParticleSet& set, std::span<const std::size_t> dims);

}  // namespace swarmkld
