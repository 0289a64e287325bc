#pragma once

#include <cmath>
#include <cstdint>

namespace qsn {

/// Deterministic counter-based random stream.
///
/// Every draw is a pure function of (seed, stream, counter): sample i of any
/// stream can be computed without generating samples 0..i-1. That makes
/// randomized searches reproducible bit-for-bit for a fixed seed no matter
/// how candidates are scheduled across workers, and makes seeds portable
/// across platforms. The mixer is the SplitMix64 finalizer, which passes the
/// usual avalanche tests and is more than enough for sampling purposes.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ 0x9E3779B97F4A7C15ull) ^ mix(stream + 0x1234567887654321ull)) {}

  /// Uniform double in [0, 1), indexed draw.
  double uniform(std::uint64_t counter) const {
    return double(mix(key_ + counter * 0xBF58476D1CE4E5B9ull) >> 11) * 0x1.0p-53;
  }

  /// Standard normal, indexed draw (Box-Muller; consumes counters 2i, 2i+1).
  double normal(std::uint64_t counter) const {
    const double u1 = uniform(2 * counter);
    const double u2 = uniform(2 * counter + 1);
    const double r = std::sqrt(-2.0 * std::log1p(-u1));  // log(1-u1), u1 < 1
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t h) {
    h ^= h >> 30;
    h *= 0xBF58476D1CE4E5B9ull;
    h ^= h >> 27;
    h *= 0x94D049BB133111EBull;
    h ^= h >> 31;
    return h;
  }

  std::uint64_t key_;
};

}  // namespace qsn
