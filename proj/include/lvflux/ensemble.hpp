#pragma once

#include "lvflux/integrator.hpp"

#include <cstddef>
#include <vector>

namespace lvflux {

/// Ensemble mean of (dX)^2 + (dY)^2 about the stationary point.
///
/// This is the raw second moment, not the ensemble variance. Trajectories that turn
/// non-physical are dropped from every time after their failure; `valid[k]` counts the
/// trajectories still contributing at times[k]. Where no trajectory is left, msd is NaN.
struct MsdSeries {
  std::vector<double> times;
  std::vector<double> msd;
  std::vector<std::size_t> valid;
  std::size_t m = 0;

  std::size_t failed() const { return valid.empty() ? 0 : m - valid.back(); }
};

/// Runs `m` independent copies of cfg (trajectory k draws from stream (cfg.seed, k)).
/// Full or linearized per cfg.linearized. Results do not depend on `threads`.
MsdSeries run_msd(const SimConfig& cfg, std::size_t m, unsigned threads = 1);

/// Least-squares slope of msd(t) through the origin over [t_min, t_max], divided by A^2.
double fit_alpha(const MsdSeries& series, double amplitude, double t_min, double t_max);
/// Same over the default window [t_end/10, t_end].
double fit_alpha(const MsdSeries& series, double amplitude);

struct NoiseCorrelation {
  double xi_dx = 0.0;
  double xi_dy = 0.0;
};

/// Time average over step ends in [t_min, t_end] of the ensemble means <xi dX>, <xi dY>.
///
/// Each step's draw is paired with the displacement averaged over the step's start and end,
/// i.e. half of the increment it produced; this is the continuous-time <xi(t) dX(t)>.
/// Requires m >= 100 and a noise spec.
NoiseCorrelation noise_displacement_correlation(const SimConfig& cfg, std::size_t m,
                                                double t_min, unsigned threads = 1);

}  // namespace lvflux
