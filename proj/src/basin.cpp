#include "lvflux/basin.hpp"

#include "lvflux/integrator.hpp"
#include "lvflux/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lvflux {

namespace {

StationaryAnalysis<double> require_stable(const FluxParams<double>& f) {
  const auto a = analyze(f);
  if (a.regime != Regime::Stable)
    throw NotStableRegime("regime is " + std::string(to_string(a.regime)) + ", not stable");
  return a;
}

double slowest_decay(const StationaryAnalysis<double>& a) {
  return std::min(std::abs(a.lambda1.real()), std::abs(a.lambda2.real()));
}

BasinOutcome run_cell(const FluxParams<double>& f, const StationaryAnalysis<double>& a,
                      const State<double>& start, const BasinOptions& o, double horizon,
                      double dwell) {
  if (!start.allFinite() || start.x() <= 0.0 || start.y() <= 0.0) return BasinOutcome::NonPhysical;
  const State<double> target(a.x_st, a.y_st);
  const double eps2 = o.eps_in * o.eps_in;
  const double r_out2 = o.r_out * o.r_out;
  const auto steps = step_count(o.dt, horizon);
  const auto rhs = [&](const State<double>& s) { return deterministic_rhs(s, f); };

  State<double> s = start;
  // Time of the most recent entry into the capture disk; negative while outside.
  double entered = -1.0;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * o.dt;
    if (!s.allFinite() || s.x() <= 0.0 || s.y() <= 0.0 || s.squaredNorm() > r_out2)
      return BasinOutcome::Diverged;
    if ((s - target).squaredNorm() <= eps2) {
      if (entered < 0.0) entered = t;
      if (t - entered >= dwell) return BasinOutcome::Converged;
    } else {
      entered = -1.0;
    }
    if (k == steps) break;
    s = rk4_step(s, o.dt, rhs);
  }
  return BasinOutcome::Undecided;
}

void validate(const BasinOptions& o) {
  if (!(o.dt > 0.0)) throw std::invalid_argument("basin: dt must be positive");
  if (!(o.eps_in > 0.0)) throw std::invalid_argument("basin: eps_in must be positive");
  if (!(o.r_out > 0.0)) throw std::invalid_argument("basin: r_out must be positive");
  if (o.t_max && !(*o.t_max >= 0.0)) throw std::invalid_argument("basin: t_max must be >= 0");
}

}  // namespace

double dwell_time(const StationaryAnalysis<double>& a) {
  const double im = std::max(std::abs(a.lambda1.imag()), std::abs(a.lambda2.imag()));
  if (im > 0.0) return 2.0 * std::numbers::pi / im;
  return 1.0 / slowest_decay(a);
}

double default_horizon(const StationaryAnalysis<double>& a, double eps_in) {
  const double decay = slowest_decay(a);
  const double needed = std::log(10.0 / eps_in) / decay + dwell_time(a);
  return std::max(500.0, needed);
}

BasinOutcome converges(const FluxParams<double>& f, const State<double>& start,
                       const BasinOptions& options) {
  validate(options);
  const auto a = require_stable(f);
  const double horizon = options.t_max.value_or(default_horizon(a, options.eps_in));
  return run_cell(f, a, start, options, horizon, dwell_time(a));
}

double BasinGrid::converged_fraction() const {
  if (outcome.empty()) return 0.0;
  const auto n = std::count(outcome.begin(), outcome.end(), BasinOutcome::Converged);
  return static_cast<double>(n) / static_cast<double>(outcome.size());
}

BasinGrid map_basin(const FluxParams<double>& f, const Axis& x_axis, const Axis& y_axis,
                    const BasinOptions& options, unsigned threads) {
  validate(options);
  x_axis.validate();
  y_axis.validate();
  const auto a = require_stable(f);
  const double horizon = options.t_max.value_or(default_horizon(a, options.eps_in));
  const double dwell = dwell_time(a);

  BasinGrid g{x_axis, y_axis, y_axis.count(), x_axis.count(), {}};
  g.outcome.resize(g.rows * g.cols);
  parallel_for(g.outcome.size(), threads, [&](std::size_t cell) {
    const std::size_t i = cell / g.cols;
    const std::size_t j = cell % g.cols;
    g.outcome[cell] = run_cell(f, a, State<double>(x_axis.at(j), y_axis.at(i)), options,
                               horizon, dwell);
  });
  return g;
}

}  // namespace lvflux
