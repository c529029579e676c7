#include "lvflux/ensemble.hpp"

#include "lvflux/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lvflux {

namespace {

// Trajectories are accumulated in fixed-size blocks that are reduced in block order, so the
// floating-point summation order never depends on the thread count.
constexpr std::size_t kBlock = 8;

std::size_t block_count(std::size_t m) { return (m + kBlock - 1) / kBlock; }

}  // namespace

MsdSeries run_msd(const SimConfig& cfg, std::size_t m, unsigned threads) {
  if (m < 1) throw std::invalid_argument("run_msd: ensemble size must be >= 1");
  cfg.validate();
  require_stationary(cfg.flux);

  const std::size_t n = step_count(cfg.dt, cfg.t_end);
  const std::size_t blocks = block_count(m);
  std::vector<std::vector<double>> sums(blocks);
  std::vector<std::vector<std::size_t>> counts(blocks);

  parallel_for(blocks, threads, [&](std::size_t b) {
    auto& sum = sums[b];
    auto& count = counts[b];
    sum.assign(n + 1, 0.0);
    count.assign(n + 1, 0);
    const std::size_t last = std::min(m, (b + 1) * kBlock);
    for (std::size_t traj = b * kBlock; traj < last; ++traj) {
      Propagator p(cfg, RandomStream::for_trajectory(cfg.seed, traj));
      sum[0] += p.displacement().squaredNorm();
      ++count[0];
      for (std::size_t k = 1; k <= n; ++k) {
        if (!p.advance().physical) break;
        sum[k] += p.displacement().squaredNorm();
        ++count[k];
      }
    }
  });

  MsdSeries s;
  s.m = m;
  s.times.resize(n + 1);
  s.msd.assign(n + 1, 0.0);
  s.valid.assign(n + 1, 0);
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t k = 0; k <= n; ++k) {
      s.msd[k] += sums[b][k];
      s.valid[k] += counts[b][k];
    }
  }
  for (std::size_t k = 0; k <= n; ++k) {
    s.times[k] = static_cast<double>(k) * cfg.dt;
    s.msd[k] = s.valid[k] > 0 ? s.msd[k] / static_cast<double>(s.valid[k])
                              : std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

double fit_alpha(const MsdSeries& series, double amplitude, double t_min, double t_max) {
  if (!(amplitude > 0.0)) throw std::invalid_argument("fit_alpha: amplitude must be positive");
  double num = 0.0;
  double den = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    const double t = series.times[k];
    if (t < t_min || t > t_max || std::isnan(series.msd[k])) continue;
    num += t * series.msd[k];
    den += t * t;
    ++used;
  }
  if (used == 0 || den == 0.0) throw std::invalid_argument("fit_alpha: empty fit window");
  return num / den / (amplitude * amplitude);
}

double fit_alpha(const MsdSeries& series, double amplitude) {
  if (series.times.empty()) throw std::invalid_argument("fit_alpha: empty series");
  const double t_end = series.times.back();
  return fit_alpha(series, amplitude, t_end / 10.0, t_end);
}

NoiseCorrelation noise_displacement_correlation(const SimConfig& cfg, std::size_t m,
                                                double t_min, unsigned threads) {
  if (m < 100) throw std::invalid_argument("noise_displacement_correlation: m must be >= 100");
  if (!cfg.noise) throw std::invalid_argument("noise_displacement_correlation: noise spec required");
  cfg.validate();
  require_stationary(cfg.flux);

  const std::size_t n = step_count(cfg.dt, cfg.t_end);
  const std::size_t blocks = block_count(m);
  // Per block and step: sums of xi*dX, xi*dY and the number of contributing trajectories.
  std::vector<std::vector<State<double>>> sums(blocks);
  std::vector<std::vector<std::size_t>> counts(blocks);

  parallel_for(blocks, threads, [&](std::size_t b) {
    auto& sum = sums[b];
    auto& count = counts[b];
    sum.assign(n + 1, State<double>::Zero());
    count.assign(n + 1, 0);
    const std::size_t last = std::min(m, (b + 1) * kBlock);
    for (std::size_t traj = b * kBlock; traj < last; ++traj) {
      Propagator p(cfg, RandomStream::for_trajectory(cfg.seed, traj));
      for (std::size_t k = 1; k <= n; ++k) {
        const State<double> before = p.displacement();
        const auto step = p.advance();
        if (!step.physical) break;
        sum[k] += step.xi * (0.5 * (before + p.displacement()));
        ++count[k];
      }
    }
  });

  State<double> total = State<double>::Zero();
  std::size_t samples = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    if (static_cast<double>(k) * cfg.dt < t_min) continue;
    State<double> step_sum = State<double>::Zero();
    std::size_t step_count_k = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
      step_sum += sums[b][k];
      step_count_k += counts[b][k];
    }
    if (step_count_k == 0) continue;
    total += step_sum / static_cast<double>(step_count_k);
    ++samples;
  }
  if (samples == 0) throw std::invalid_argument("noise_displacement_correlation: empty window");
  total /= static_cast<double>(samples);
  return {total.x(), total.y()};
}

}  // namespace lvflux
