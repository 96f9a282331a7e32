#pragma once

#include <cstdint>
#include <random>

namespace swarmsgd {

/// SplitMix64 finalizer. Used for all seed derivation.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derive the seed of sub-stream `stream` from `master`.
///
/// split(m, s) = mix64(m ^ mix64(s)). Distinct (master, stream) pairs give
/// statistically independent mt19937_64 streams; the mapping is stable across
/// releases so recorded seeds keep reproducing the same runs.
constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return mix64(master ^ mix64(stream));
}

/// Seeded generator with the handful of variates the simulator needs.
///
/// Wraps mt19937_64 and performs every transform itself so a seed pins the
/// exact stream independent of the standard library's distribution classes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform on {0, ..., n-1}; unbiased (rejection on the top range).
  std::uint64_t uniform_index(std::uint64_t n);

  /// Standard normal via the Marsaglia polar method (one spare cached).
  double normal();

  /// Exponential with the given mean (inverse CDF).
  double exponential(double mean);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace swarmsgd
