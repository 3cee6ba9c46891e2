#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace pauc {

// Deterministic generator used everywhere a seed is consumed.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Independent streams are derived from (seed, stream) through a
// SplitMix64 finalizer, so e.g. fold k of a cross-validation plan can be
// regenerated without replaying the streams before it. All derived
// quantities (uniform reals, bounded integers, normals, shuffles) are computed
// here rather than through <random> distributions, whose algorithms differ
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, bound), bound > 0. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal via the Box-Muller transform (one value per call).
  double normal();

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace pauc
