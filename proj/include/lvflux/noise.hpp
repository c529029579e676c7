#pragma once

#include "lvflux/model.hpp"

#include <cstdint>
#include <random>

namespace lvflux {

/// Seedable uniform source. Each trajectory of an ensemble owns one.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for trajectory `index` of a run seeded with `master`.
  static RandomStream for_trajectory(std::uint64_t master, std::uint64_t index);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1); an exact zero is replaced by the smallest positive double.
  double uniform_open();

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// Per-step perturbation with mean 0 and variance A^2/dt.
/// Uniform:  (A/sqrt(dt)) * sqrt(3) * (2u - 1)
/// Gaussian: (A/sqrt(dt)) * sin(2 pi u1) * sqrt(2 ln(1/u2))
/// Throws std::invalid_argument for dt <= 0 or a negative amplitude.
double sample_noise(const NoiseSpec& spec, double dt, RandomStream& rng);

}  // namespace lvflux
