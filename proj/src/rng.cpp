#include "swarmkld/rng.hpp"

namespace swarmkld {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kStreamSalt = 0xd1b54a32d192ed03ULL;
constexpr std::uint64_t kForkSalt = 0x8cb92ba72f3d8dd7ULL;

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b, std::uint64_t c) noexcept {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ (a * kStreamSalt));
  h = mix64(h ^ (b * kForkSalt));
  return mix64(h ^ (c * kGolden));
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix64(mix64(seed) ^ mix64(stream * kStreamSalt + 1))) {}

Rng::result_type Rng::operator()() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

Rng Rng::fork(std::uint64_t tag) const noexcept {
  return Rng(Keyed{}, mix64(key_ ^ mix64(tag * kForkSalt + kStreamSalt)));
}

Rng Rng::fork(std::uint64_t tag_a, std::uint64_t tag_b) const noexcept {
  return fork(tag_a).fork(tag_b);
}

Rng Rng::split() noexcept { return Rng(Keyed{}, mix64((*this)() ^ kForkSalt)); }

// 53 high bits, so the result is strictly below 1.
double Rng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() { return gauss_(*this); }

double Rng::normal(double mean, double stddev) { return mean + stddev * normal(); }

}  // namespace swarmkld
