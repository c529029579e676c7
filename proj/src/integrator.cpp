#include "lvflux/integrator.hpp"

#include <cmath>
#include <sstream>

namespace lvflux {

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("t_end must be >= 0");
  if (!start.allFinite()) throw std::invalid_argument("start state must be finite");
  if (!std::isfinite(flux.bx) || !std::isfinite(flux.by))
    throw std::invalid_argument("fluxes must be finite");
  if (noise && !(noise->amplitude >= 0.0)) throw std::invalid_argument("amplitude must be >= 0");
}

NonPhysicalState::NonPhysicalState(double time, Trajectory partial)
    : std::runtime_error([time] {
        std::ostringstream os;
        os.precision(17);
        os << "trajectory became non-physical at t=" << time;
        return os.str();
      }()),
      time_(time),
      partial_(std::move(partial)) {}

std::size_t step_count(double dt, double t_end) {
  return static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
}

StationaryAnalysis<double> require_stationary(const FluxParams<double>& f) {
  const auto a = analyze(f);
  if (a.regime == Regime::NoStationary)
    throw NoStationaryPoint("no stationary point: negative discriminant");
  if (a.regime == Regime::NonPhysical)
    throw NoStationaryPoint("stationary point is non-physical");
  return a;
}

Propagator::Propagator(const SimConfig& cfg, RandomStream stream)
    : cfg_(cfg), stream_(stream), state_(cfg.start) {
  cfg_.validate();
  if (cfg_.linearized) {
    stationary_ = require_stationary(cfg_.flux);
    jacobian_ = jacobian(stationary_.x_st, stationary_.y_st);
    if (cfg_.noise) column_ = noise_column(cfg_.noise->target, stationary_.x_st, stationary_.y_st);
    state_ = cfg_.start - State<double>(stationary_.x_st, stationary_.y_st);
  } else {
    stationary_ = analyze(cfg_.flux);
  }
}

State<double> Propagator::displacement() const {
  if (cfg_.linearized) return state_;
  return state_ - State<double>(stationary_.x_st, stationary_.y_st);
}

Propagator::Step Propagator::advance() {
  Step step;
  if (cfg_.noise) step.xi = sample_noise(*cfg_.noise, cfg_.dt, stream_);
  const double xi = step.xi;
  if (cfg_.linearized) {
    state_ = rk4_step(state_, cfg_.dt, [&](const State<double>& d) -> State<double> {
      return jacobian_ * d + column_ * xi;
    });
    return step;
  }
  if (cfg_.noise) {
    const NoiseTarget target = cfg_.noise->target;
    state_ = rk4_step(state_, cfg_.dt, [&](const State<double>& s) {
      return perturbed_rhs(s, cfg_.flux, target, xi);
    });
  } else {
    state_ = rk4_step(state_, cfg_.dt,
                      [&](const State<double>& s) { return deterministic_rhs(s, cfg_.flux); });
  }
  step.physical = state_.allFinite() && state_.x() > 0.0 && state_.y() > 0.0;
  return step;
}

namespace {

Trajectory run(const SimConfig& cfg) {
  Propagator p(cfg, RandomStream::for_trajectory(cfg.seed, 0));
  const std::size_t n = step_count(cfg.dt, cfg.t_end);
  Trajectory traj;
  traj.times.reserve(n + 1);
  traj.states.reserve(n + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(p.state());
  for (std::size_t k = 1; k <= n; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    if (!p.advance().physical) throw NonPhysicalState(t, std::move(traj));
    traj.times.push_back(t);
    traj.states.push_back(p.state());
  }
  return traj;
}

}  // namespace

Trajectory integrate_deterministic(const SimConfig& cfg) {
  if (cfg.noise) throw std::invalid_argument("integrate_deterministic: noise must be absent");
  if (cfg.linearized) throw std::invalid_argument("integrate_deterministic: use integrate_linearized");
  return run(cfg);
}

Trajectory integrate_stochastic(const SimConfig& cfg) {
  if (!cfg.noise) throw std::invalid_argument("integrate_stochastic: noise spec required");
  if (cfg.linearized) throw std::invalid_argument("integrate_stochastic: use integrate_linearized");
  return run(cfg);
}

Trajectory integrate_linearized(const SimConfig& cfg) {
  SimConfig lin = cfg;
  lin.linearized = true;
  return run(lin);
}

Trajectory integrate(const SimConfig& cfg) {
  if (cfg.linearized) return integrate_linearized(cfg);
  return cfg.noise ? integrate_stochastic(cfg) : integrate_deterministic(cfg);
}

}  // namespace lvflux
