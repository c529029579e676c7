#pragma once

#include "lvflux/model.hpp"
#include "lvflux/noise.hpp"
#include "lvflux/stability.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lvflux {

struct SimConfig {
  FluxParams<double> flux{};
  std::optional<NoiseSpec> noise;
  /// Absolute start coordinates, also when `linearized` is set.
  State<double> start{1.0, 1.0};
  double dt = 0.01;
  double t_end = 0.0;
  std::uint64_t seed = 1;
  /// Evolve deviations from the stationary point under the linearized system.
  bool linearized = false;

  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State<double>> states;

  std::size_t size() const { return times.size(); }
};

/// A full-system trajectory left the positive quadrant or became non-finite.
class NonPhysicalState : public std::runtime_error {
 public:
  NonPhysicalState(double time, Trajectory partial);

  double time() const { return time_; }
  /// Accepted states up to (excluding) the offending one.
  const Trajectory& partial() const { return partial_; }

 private:
  double time_;
  Trajectory partial_;
};

class NoStationaryPoint : public std::runtime_error {
 public:
  explicit NoStationaryPoint(const std::string& what) : std::runtime_error(what) {}
};

/// Number of whole steps: floor(t_end / dt).
std::size_t step_count(double dt, double t_end);

/// One classical fourth-order Runge-Kutta step.
template <typename Scalar, int N, typename Rhs>
Eigen::Matrix<Scalar, N, 1> rk4_step(const Eigen::Matrix<Scalar, N, 1>& s, Scalar h, Rhs&& rhs) {
  const Eigen::Matrix<Scalar, N, 1> k1 = rhs(s);
  const Eigen::Matrix<Scalar, N, 1> k2 = rhs((s + Scalar(0.5) * h * k1).eval());
  const Eigen::Matrix<Scalar, N, 1> k3 = rhs((s + Scalar(0.5) * h * k2).eval());
  const Eigen::Matrix<Scalar, N, 1> k4 = rhs((s + h * k3).eval());
  return s + (h / Scalar(6)) * (k1 + Scalar(2) * (k2 + k3) + k4);
}

/// Steps a single trajectory. The noise value is drawn once per step and held fixed while
/// the Runge-Kutta stages evaluate the perturbed vector field.
class Propagator {
 public:
  Propagator(const SimConfig& cfg, RandomStream stream);

  struct Step {
    double xi = 0.0;
    bool physical = true;
  };

  Step advance();

  /// Current coordinates: absolute for the full system, deviations when linearized.
  const State<double>& state() const { return state_; }
  /// Offset from the stationary point in either mode.
  State<double> displacement() const;
  const StationaryAnalysis<double>& stationary() const { return stationary_; }

 private:
  SimConfig cfg_;
  RandomStream stream_;
  StationaryAnalysis<double> stationary_;
  Matrix2<double> jacobian_ = Matrix2<double>::Zero();
  State<double> column_ = State<double>::Zero();
  State<double> state_;
};

Trajectory integrate_deterministic(const SimConfig& cfg);
Trajectory integrate_stochastic(const SimConfig& cfg);
/// Deviations (dX, dY) about the stationary point of cfg.flux; the noise target is taken
/// from cfg.noise. Throws NoStationaryPoint for red or black flux pairs.
Trajectory integrate_linearized(const SimConfig& cfg);
/// Dispatches on cfg.linearized and cfg.noise.
Trajectory integrate(const SimConfig& cfg);

/// Stationary analysis that must be physical; otherwise NoStationaryPoint.
StationaryAnalysis<double> require_stationary(const FluxParams<double>& f);

}  // namespace lvflux
