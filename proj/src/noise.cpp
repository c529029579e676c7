#include "lvflux/noise.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace lvflux {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RandomStream RandomStream::for_trajectory(std::uint64_t master, std::uint64_t index) {
  return RandomStream(mix64(master ^ mix64(index)));
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_open() {
  const double u = uniform();
  return u > 0.0 ? u : std::numeric_limits<double>::denorm_min();
}

double sample_noise(const NoiseSpec& spec, double dt, RandomStream& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("sample_noise: dt must be positive");
  if (!(spec.amplitude >= 0.0)) throw std::invalid_argument("sample_noise: amplitude must be >= 0");
  const double scale = spec.amplitude / std::sqrt(dt);
  if (spec.distribution == NoiseDistribution::Uniform) {
    return scale * std::numbers::sqrt3 * (2.0 * rng.uniform() - 1.0);
  }
  const double u1 = rng.uniform_open();
  const double u2 = rng.uniform_open();
  return scale * std::sin(2.0 * std::numbers::pi * u1) * std::sqrt(2.0 * std::log(1.0 / u2));
}

}  // namespace lvflux
