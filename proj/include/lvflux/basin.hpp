#pragma once

#include "lvflux/grid.hpp"
#include "lvflux/model.hpp"
#include "lvflux/stability.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lvflux {

enum class BasinOutcome { Converged = 0, Diverged = 1, Undecided = 2, NonPhysical = 3 };

constexpr std::string_view to_string(BasinOutcome o) {
  switch (o) {
    case BasinOutcome::Converged: return "converged";
    case BasinOutcome::Diverged: return "diverged";
    case BasinOutcome::Undecided: return "undecided";
    case BasinOutcome::NonPhysical: return "non-physical";
  }
  return "?";
}

class NotStableRegime : public std::runtime_error {
 public:
  explicit NotStableRegime(const std::string& what) : std::runtime_error(what) {}
};

struct BasinOptions {
  /// Horizon; when empty, default_horizon() is used.
  std::optional<double> t_max;
  /// Capture disk radius about the stationary point.
  double eps_in = 1e-3;
  /// Escape radius for |state|.
  double r_out = 1e3;
  /// RK4 step.
  double dt = 0.05;
};

/// Time the state must stay inside the capture disk: 2 pi / |Im lambda| for a focus,
/// the slowest e-folding time 1 / min|Re lambda| for a node.
double dwell_time(const StationaryAnalysis<double>& a);

/// max(500, ln(10 / eps_in) / |Re lambda|_slowest + dwell). Weakly attracting points
/// (Re lambda close to 0) need horizons far beyond 500 to be decided at all.
double default_horizon(const StationaryAnalysis<double>& a, double eps_in);

/// Deterministic outcome of the flow started at `start`. Throws NotStableRegime unless
/// classify(f) is Stable.
BasinOutcome converges(const FluxParams<double>& f, const State<double>& start,
                       const BasinOptions& options = {});

struct BasinGrid {
  Axis x_axis;
  Axis y_axis;
  std::size_t rows = 0;  // along y
  std::size_t cols = 0;  // along x
  std::vector<BasinOutcome> outcome;

  BasinOutcome at(std::size_t i, std::size_t j) const { return outcome[i * cols + j]; }
  double converged_fraction() const;
};

/// Row-major grid: row i is y = y_axis.at(i), column j is x = x_axis.at(j).
BasinGrid map_basin(const FluxParams<double>& f, const Axis& x_axis, const Axis& y_axis,
                    const BasinOptions& options = {}, unsigned threads = 1);

}  // namespace lvflux
