#pragma once

#include <cstdint>
#include <random>

#include "slidefield/common.hpp"

namespace slidefield {

/// Deterministic random source. Draws go through mt19937_64 directly so that
/// sequences are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Sub-stream for an independent unit of work, e.g. one audit trial.
  static Rng for_trial(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix(seed ^ splitmix(index + 0x632be59bd9b4e019ULL)));
  }

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  bool coin() { return (engine_() >> 63) != 0; }

  double sign() { return coin() ? 1.0 : -1.0; }

  /// Random sign times a magnitude drawn uniformly from [lo, hi].
  double signed_magnitude(double lo, double hi) { return sign() * uniform(lo, hi); }

  std::uint64_t index(std::uint64_t count) { return engine_() % count; }

  Vec vector(Eigen::Index size, double lo, double hi) {
    Vec v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = uniform(lo, hi);
    return v;
  }

  Vec signed_vector(Eigen::Index size, double lo, double hi) {
    Vec v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = signed_magnitude(lo, hi);
    return v;
  }

 private:
  static std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace slidefield
