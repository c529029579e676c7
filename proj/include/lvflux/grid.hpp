#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace lvflux {

/// Closed, evenly sampled interval [min, max]: nodes min + k*step for k < count().
struct Axis {
  double min = 0.0;
  double max = 0.0;
  double step = 1.0;

  void validate() const {
    if (!std::isfinite(min) || !std::isfinite(max) || !std::isfinite(step))
      throw std::invalid_argument("axis bounds must be finite");
    if (!(step > 0.0)) throw std::invalid_argument("axis step must be positive");
    if (max < min) throw std::invalid_argument("axis range is inverted");
  }

  // The 1e-9 slack keeps e.g. 4/0.01 from flooring to 399.
  std::size_t count() const {
    return static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
  }

  double at(std::size_t k) const { return min + static_cast<double>(k) * step; }

  /// Index of the node nearest to v, clamped to the axis.
  std::size_t nearest(double v) const {
    const double k = std::round((v - min) / step);
    if (k <= 0.0) return 0;
    const auto n = count();
    return k >= static_cast<double>(n - 1) ? n - 1 : static_cast<std::size_t>(k);
  }
};

}  // namespace lvflux
