#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace swarmkld {

/// Counter-based random stream (SplitMix64 finalizer over a keyed counter).
///
/// A stream is identified by its key; the n-th output is a pure function of
/// (key, n). Child streams are derived with fork() without touching the
/// parent, which is what lets particle loops run in any order or thread
/// layout and still produce identical draws.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Independent child stream tagged by `tag`. Does not advance *this.
  [[nodiscard]] Rng fork(std::uint64_t tag) const noexcept;
  [[nodiscard]] Rng fork(std::uint64_t tag_a, std::uint64_t tag_b) const noexcept;

  /// Child stream keyed by the next draw of *this (advances by one).
  [[nodiscard]] Rng split() noexcept;

  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  double normal();   // standard normal
  double normal(double mean, double stddev);

  [[nodiscard]] std::uint64_t key() const noexcept { return key_; }
  [[nodiscard]] std::uint64_t position() const noexcept { return counter_; }

 private:
  struct Keyed {};
  Rng(Keyed, std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::normal_distribution<double> gauss_{0.0, 1.0};
};

/// SplitMix64 finalizer; also used to derive seeds from structured ids.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Stable seed for a tuple of ids.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b = 0, std::uint64_t c = 0) noexcept;

}  // namespace swarmkld
