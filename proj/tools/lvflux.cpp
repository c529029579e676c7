// lvflux: command-line front end for the open Lotka-Volterra toolkit.
//
// Exit codes: 0 success, 2 usage, 3 non-physical trajectory, 4 no stationary point,
// 5 regime not stable.

#include "lvflux/basin.hpp"
#include "lvflux/ensemble.hpp"
#include "lvflux/integrator.hpp"
#include "lvflux/io.hpp"
#include "lvflux/moments.hpp"
#include "lvflux/stability.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using lvflux::io::format_double;
using json = nlohmann::ordered_json;

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kNonPhysical = 3,
  kNoStationary = 4,
  kNotStable = 5,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::map<std::string, lvflux::NoiseTarget> kTargets{
    {"k1", lvflux::NoiseTarget::K1},        {"k2", lvflux::NoiseTarget::K2},
    {"k3", lvflux::NoiseTarget::K3},        {"k4", lvflux::NoiseTarget::K4},
    {"flux-x", lvflux::NoiseTarget::FluxX}, {"flux-y", lvflux::NoiseTarget::FluxY}};

const std::map<std::string, lvflux::NoiseDistribution> kDistributions{
    {"uniform", lvflux::NoiseDistribution::Uniform},
    {"gaussian", lvflux::NoiseDistribution::Gaussian}};

// Records every resolved parameter of a run so the manifest can both describe it and
// reproduce it as a command line. --threads is deliberately not recorded.
class Manifest {
 public:
  explicit Manifest(std::string subcommand) : subcommand_(std::move(subcommand)) {}

  void number(const std::string& flag, double v) { add(flag, v, format_double(v)); }
  void integer(const std::string& flag, std::uint64_t v) { add(flag, v, std::to_string(v)); }
  void text(const std::string& flag, const std::string& v) { add(flag, v, v); }
  void toggle(const std::string& flag, bool on) {
    params_[flag] = on;
    if (on) command_.push_back("--" + flag);
  }
  void artifact(const std::string& path) { artifacts_.push_back(path); }
  void seed(std::uint64_t s) { seed_ = s; }

  json to_json() const {
    json j;
    j["tool"] = "lvflux";
    j["version"] = LVFLUX_VERSION;
    j["subcommand"] = subcommand_;
    j["parameters"] = params_;
    if (seed_) j["seed"] = *seed_;
    j["artifacts"] = artifacts_;
    std::vector<std::string> cmd{"lvflux", subcommand_};
    cmd.insert(cmd.end(), command_.begin(), command_.end());
    j["command"] = cmd;
    return j;
  }

  // One sidecar "<artifact>.manifest.json" per file artifact.
  void write_sidecars() const {
    const std::string doc = to_json().dump(2) + "\n";
    for (const auto& a : artifacts_) {
      std::ofstream os(a + ".manifest.json", std::ios::binary);
      os << doc;
    }
  }

 private:
  template <typename V>
  void add(const std::string& flag, const V& v, const std::string& arg) {
    params_[flag] = v;
    command_.push_back("--" + flag);
    command_.push_back(arg);
  }

  std::string subcommand_;
  json params_ = json::object();
  std::vector<std::string> command_;
  std::vector<std::string> artifacts_;
  std::optional<std::uint64_t> seed_;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot open output file: " + path);
  return os;
}

// Writes to `path`, or to stdout when the path is empty.
void emit(const std::string& path, const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(std::cout);
    std::cout.flush();
    return;
  }
  auto os = open_output(path);
  write(os);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("LVFLUX_SEED")) {
    try {
      std::size_t pos = 0;
      const auto v = std::stoull(env, &pos);
      if (pos != std::string(env).size()) throw std::invalid_argument(env);
      return v;
    } catch (const std::exception&) {
      throw UsageError(std::string("LVFLUX_SEED is not an unsigned integer: ") + env);
    }
  }
  return 1;
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

json complex_json(std::complex<double> c) { return json{{"re", c.real()}, {"im", c.imag()}}; }

// ---------------------------------------------------------------------------------------
// steady-state

struct SteadyStateArgs {
  double bx = 0.0;
  double by = 0.0;
};

int run_steady_state(const SteadyStateArgs& a) {
  const auto s = lvflux::analyze(lvflux::FluxParams<double>{a.bx, a.by});
  json j;
  j["bx"] = a.bx;
  j["by"] = a.by;
  j["exists"] = s.exists;
  j["discriminant"] = s.discriminant;
  if (s.exists) {
    j["x_st"] = s.x_st;
    j["y_st"] = s.y_st;
    j["lambda1"] = complex_json(s.lambda1);
    j["lambda2"] = complex_json(s.lambda2);
  } else {
    j["x_st"] = nullptr;
    j["y_st"] = nullptr;
    j["lambda1"] = nullptr;
    j["lambda2"] = nullptr;
  }
  j["regime"] = std::string(lvflux::to_string(s.regime));
  std::cout << j.dump(2) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------------------
// regime-diagram

struct RegimeArgs {
  double bx_min = -2, bx_max = 2, by_min = -2, by_max = 2, step = 0.01;
  std::string csv, ppm;
  unsigned threads = default_threads();
};

int run_regime_diagram(const RegimeArgs& a) {
  const lvflux::Axis bx{a.bx_min, a.bx_max, a.step};
  const lvflux::Axis by{a.by_min, a.by_max, a.step};
  try {
    bx.validate();
    by.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Manifest m("regime-diagram");
  m.number("bx-min", a.bx_min);
  m.number("bx-max", a.bx_max);
  m.number("by-min", a.by_min);
  m.number("by-max", a.by_max);
  m.number("step", a.step);
  if (!a.csv.empty()) {
    m.text("csv", a.csv);
    m.artifact(a.csv);
  }
  if (!a.ppm.empty()) {
    m.text("ppm", a.ppm);
    m.artifact(a.ppm);
  }

  const auto grid = lvflux::regime_diagram(bx, by, a.threads);
  if (!a.csv.empty() || a.ppm.empty())
    emit(a.csv, [&](std::ostream& os) { lvflux::io::write_regime_csv(os, grid); });
  if (!a.ppm.empty()) {
    auto os = open_output(a.ppm);
    lvflux::io::write_regime_ppm(os, grid);
  }
  m.write_sidecars();
  return kOk;
}

// ---------------------------------------------------------------------------------------
// simulate / ensemble share the run description

struct RunArgs {
  double bx = 0, by = 0;
  std::optional<double> x0, y0;
  double dt = 0.01;
  double t_end = 0;
  std::optional<std::string> target;
  std::optional<double> amplitude;
  std::string dist = "uniform";
  std::optional<std::uint64_t> seed;
  bool linearized = false;
  std::string out;
};

void add_run_options(CLI::App* app, RunArgs& a) {
  app->add_option("--bx", a.bx, "prey flux")->capture_default_str();
  app->add_option("--by", a.by, "predator flux")->capture_default_str();
  app->add_option("--x0", a.x0, "initial prey (default: stationary point)");
  app->add_option("--y0", a.y0, "initial predators (default: stationary point)");
  app->add_option("--dt", a.dt, "time step")->capture_default_str();
  app->add_option("--t-end", a.t_end, "horizon")->required();
  app->add_option("--noise-target", a.target, "k1|k2|k3|k4|flux-x|flux-y")
      ->check(CLI::IsMember({"k1", "k2", "k3", "k4", "flux-x", "flux-y"}));
  app->add_option("--amplitude", a.amplitude, "noise amplitude A");
  app->add_option("--dist", a.dist, "uniform|gaussian")
      ->check(CLI::IsMember({"uniform", "gaussian"}))
      ->capture_default_str();
  app->add_option("--seed", a.seed, "master seed (default: $LVFLUX_SEED, else 1)");
  app->add_flag("--linearized", a.linearized, "evolve deviations under the linearized system");
  app->add_option("--out", a.out, "CSV output path (default: stdout)");
}

lvflux::SimConfig build_config(const RunArgs& a, Manifest& m) {
  lvflux::SimConfig cfg;
  cfg.flux = {a.bx, a.by};
  cfg.dt = a.dt;
  cfg.t_end = a.t_end;
  cfg.seed = resolve_seed(a.seed);
  cfg.linearized = a.linearized;

  double x0 = 0, y0 = 0;
  if (a.x0 && a.y0) {
    x0 = *a.x0;
    y0 = *a.y0;
  } else {
    const auto s = lvflux::analyze(cfg.flux);
    if (!s.exists) throw lvflux::NoStationaryPoint("no stationary point to start from; pass --x0 --y0");
    x0 = a.x0.value_or(s.x_st);
    y0 = a.y0.value_or(s.y_st);
  }
  cfg.start = {x0, y0};

  const bool noisy = a.target.has_value() || a.amplitude.has_value();
  if (noisy) {
    lvflux::NoiseSpec n;
    n.target = kTargets.at(a.target.value_or("k1"));
    n.amplitude = a.amplitude.value_or(0.0);
    n.distribution = kDistributions.at(a.dist);
    cfg.noise = n;
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  m.number("bx", a.bx);
  m.number("by", a.by);
  m.number("x0", x0);
  m.number("y0", y0);
  m.number("dt", a.dt);
  m.number("t-end", a.t_end);
  if (cfg.noise) {
    m.text("noise-target", std::string(lvflux::to_string(cfg.noise->target)));
    m.number("amplitude", cfg.noise->amplitude);
    m.text("dist", a.dist);
  }
  m.integer("seed", cfg.seed);
  m.seed(cfg.seed);
  m.toggle("linearized", a.linearized);
  return cfg;
}

int run_simulate(const RunArgs& a) {
  Manifest m("simulate");
  const auto cfg = build_config(a, m);
  if (!a.out.empty()) {
    m.text("out", a.out);
    m.artifact(a.out);
  }

  lvflux::Trajectory traj;
  std::optional<double> failed_at;
  try {
    traj = lvflux::integrate(cfg);
  } catch (const lvflux::NonPhysicalState& e) {
    traj = e.partial();
    failed_at = e.time();
  }
  emit(a.out, [&](std::ostream& os) {
    os << "t,x,y\n";
    for (std::size_t k = 0; k < traj.size(); ++k)
      os << format_double(traj.times[k]) << ',' << format_double(traj.states[k].x()) << ','
         << format_double(traj.states[k].y()) << '\n';
    if (failed_at) os << "# nonphysical at t=" << format_double(*failed_at) << '\n';
  });
  m.write_sidecars();
  if (failed_at) {
    std::cerr << "lvflux: trajectory became non-physical at t=" << format_double(*failed_at) << "\n";
    return kNonPhysical;
  }
  return kOk;
}

struct EnsembleArgs {
  RunArgs run;
  std::size_t m = 0;
  std::optional<double> fit_from, fit_to;
  unsigned threads = default_threads();
};

int run_ensemble(const EnsembleArgs& a) {
  Manifest man("ensemble");
  const auto cfg = build_config(a.run, man);
  if (a.m < 1) throw UsageError("--m must be >= 1");
  man.integer("m", a.m);
  const double fit_from = a.fit_from.value_or(a.run.t_end / 10.0);
  const double fit_to = a.fit_to.value_or(a.run.t_end);
  man.number("fit-from", fit_from);
  man.number("fit-to", fit_to);
  if (!a.run.out.empty()) {
    man.text("out", a.run.out);
    man.artifact(a.run.out);
  }

  const auto series = lvflux::run_msd(cfg, a.m, a.threads);
  emit(a.run.out, [&](std::ostream& os) {
    os << "t,msd,valid_count\n";
    for (std::size_t k = 0; k < series.times.size(); ++k)
      os << format_double(series.times[k]) << ',' << format_double(series.msd[k]) << ','
         << series.valid[k] << '\n';
  });
  man.write_sidecars();

  std::string alpha = "undefined";
  const double amp = cfg.noise ? cfg.noise->amplitude : 0.0;
  if (amp > 0.0) {
    try {
      alpha = format_double(lvflux::fit_alpha(series, amp, fit_from, fit_to));
    } catch (const std::invalid_argument&) {
    }
  }
  std::cout << "alpha=" << alpha << "\n";
  std::cout << "failed=" << series.failed() << "\n";
  return series.failed() == a.m ? kNonPhysical : kOk;
}

// ---------------------------------------------------------------------------------------
// moments

struct MomentsArgs {
  double bx = 0, by = 0, amplitude = 0, dt = 0.01, t_end = 0;
  std::string target = "k1";
  bool closed_form = false;
  std::string out;
};

int run_moments(const MomentsArgs& a) {
  const auto target = kTargets.at(a.target);
  if (!(a.dt > 0.0) || !(a.t_end >= 0.0) || !(a.amplitude >= 0.0))
    throw UsageError("moments: need dt > 0, t-end >= 0, amplitude >= 0");
  if (a.closed_form) {
    const bool zero_flux = a.bx == 0.0 && a.by == 0.0;
    const bool x_driven = target == lvflux::NoiseTarget::K1 || target == lvflux::NoiseTarget::K2 ||
                          target == lvflux::NoiseTarget::FluxX;
    if (!zero_flux || !x_driven)
      throw UsageError("--closed-form needs bx = by = 0 and noise target k1, k2 or flux-x");
  }
  Manifest m("moments");
  m.number("bx", a.bx);
  m.number("by", a.by);
  m.number("amplitude", a.amplitude);
  m.number("dt", a.dt);
  m.number("t-end", a.t_end);
  m.text("noise-target", a.target);
  m.toggle("closed-form", a.closed_form);
  if (!a.out.empty()) {
    m.text("out", a.out);
    m.artifact(a.out);
  }

  const auto series = lvflux::solve_moments(lvflux::FluxParams<double>{a.bx, a.by}, a.amplitude,
                                            a.dt, a.t_end, target);
  double max_dev = 0.0;
  emit(a.out, [&](std::ostream& os) {
    os << "t,var_x,var_y,cov_xy";
    if (a.closed_form) os << ",var_x_exact,var_y_exact,cov_xy_exact";
    os << '\n';
    for (std::size_t k = 0; k < series.times.size(); ++k) {
      const auto& s = series.states[k];
      os << format_double(series.times[k]) << ',' << format_double(s.var_x) << ','
         << format_double(s.var_y) << ',' << format_double(s.cov_xy);
      if (a.closed_form) {
        const auto e = lvflux::closed_form_zero_flux(a.amplitude, series.times[k]);
        os << ',' << format_double(e.var_x) << ',' << format_double(e.var_y) << ','
           << format_double(e.cov_xy);
        max_dev = std::max({max_dev, std::abs(s.var_x - e.var_x), std::abs(s.var_y - e.var_y),
                            std::abs(s.cov_xy - e.cov_xy)});
      }
      os << '\n';
    }
  });
  m.write_sidecars();
  if (a.closed_form) std::cout << "max_deviation=" << format_double(max_dev) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------------------
// basin

struct BasinArgs {
  double bx = 0, by = 0;
  double x_min = 0, x_max = 4, y_min = 0, y_max = 4, step = 0.05;
  std::optional<double> t_max;
  double eps_in = 1e-3, r_out = 1e3, dt = 0.05;
  std::string csv, ppm;
  unsigned threads = default_threads();
};

int run_basin(const BasinArgs& a) {
  const lvflux::Axis xs{a.x_min, a.x_max, a.step};
  const lvflux::Axis ys{a.y_min, a.y_max, a.step};
  lvflux::BasinOptions o;
  o.t_max = a.t_max;
  o.eps_in = a.eps_in;
  o.r_out = a.r_out;
  o.dt = a.dt;
  try {
    xs.validate();
    ys.validate();
    if (!(o.dt > 0.0) || !(o.eps_in > 0.0) || !(o.r_out > 0.0) || (o.t_max && !(*o.t_max >= 0.0)))
      throw std::invalid_argument("basin: dt, eps-in, r-out must be positive and t-max >= 0");
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const lvflux::FluxParams<double> f{a.bx, a.by};
  const auto s = lvflux::analyze(f);
  if (s.regime != lvflux::Regime::Stable)
    throw lvflux::NotStableRegime("regime is " + std::string(lvflux::to_string(s.regime)) +
                                  ", basin mapping needs a stable point");
  const double horizon = a.t_max.value_or(lvflux::default_horizon(s, a.eps_in));
  o.t_max = horizon;

  Manifest m("basin");
  m.number("bx", a.bx);
  m.number("by", a.by);
  m.number("x-min", a.x_min);
  m.number("x-max", a.x_max);
  m.number("y-min", a.y_min);
  m.number("y-max", a.y_max);
  m.number("step", a.step);
  m.number("t-max", horizon);
  m.number("eps-in", a.eps_in);
  m.number("r-out", a.r_out);
  m.number("dt", a.dt);
  if (!a.csv.empty()) {
    m.text("csv", a.csv);
    m.artifact(a.csv);
  }
  if (!a.ppm.empty()) {
    m.text("ppm", a.ppm);
    m.artifact(a.ppm);
  }

  const auto grid = lvflux::map_basin(f, xs, ys, o, a.threads);
  if (!a.csv.empty() || a.ppm.empty())
    emit(a.csv, [&](std::ostream& os) { lvflux::io::write_basin_csv(os, grid); });
  if (!a.ppm.empty()) {
    auto os = open_output(a.ppm);
    lvflux::io::write_basin_ppm(os, grid);
  }
  m.write_sidecars();
  std::cout << "converged_fraction=" << format_double(grid.converged_fraction()) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open Lotka-Volterra system with external fluxes and Langevin noise"};
  app.set_version_flag("--version", std::string(LVFLUX_VERSION));
  app.require_subcommand(1);

  SteadyStateArgs ss;
  auto* c_ss = app.add_subcommand("steady-state", "stationary point, eigenvalues and regime (JSON)");
  c_ss->add_option("--bx", ss.bx, "prey flux")->required();
  c_ss->add_option("--by", ss.by, "predator flux")->required();

  RegimeArgs rd;
  auto* c_rd = app.add_subcommand("regime-diagram", "classify a (bx, by) grid (CSV and/or PPM)");
  c_rd->add_option("--bx-min", rd.bx_min)->capture_default_str();
  c_rd->add_option("--bx-max", rd.bx_max)->capture_default_str();
  c_rd->add_option("--by-min", rd.by_min)->capture_default_str();
  c_rd->add_option("--by-max", rd.by_max)->capture_default_str();
  c_rd->add_option("--step", rd.step)->capture_default_str();
  c_rd->add_option("--csv", rd.csv, "CSV path (stdout when neither --csv nor --ppm)");
  c_rd->add_option("--ppm", rd.ppm, "PPM (P6) path");
  c_rd->add_option("--threads", rd.threads)->capture_default_str();

  RunArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "one trajectory (CSV t,x,y)");
  add_run_options(c_sim, sim);

  EnsembleArgs ens;
  auto* c_ens = app.add_subcommand("ensemble", "ensemble mean-squared displacement (CSV) and alpha");
  add_run_options(c_ens, ens.run);
  c_ens->add_option("--m", ens.m, "ensemble size")->required();
  c_ens->add_option("--fit-from", ens.fit_from, "alpha fit window start (default t_end/10)");
  c_ens->add_option("--fit-to", ens.fit_to, "alpha fit window end (default t_end)");
  c_ens->add_option("--threads", ens.threads)->capture_default_str();

  MomentsArgs mo;
  auto* c_mo = app.add_subcommand("moments", "second-moment equations (CSV)");
  c_mo->add_option("--bx", mo.bx)->required();
  c_mo->add_option("--by", mo.by)->required();
  c_mo->add_option("--amplitude", mo.amplitude)->required();
  c_mo->add_option("--dt", mo.dt)->capture_default_str();
  c_mo->add_option("--t-end", mo.t_end)->required();
  c_mo->add_option("--noise-target", mo.target)
      ->check(CLI::IsMember({"k1", "k2", "k3", "k4", "flux-x", "flux-y"}))
      ->capture_default_str();
  c_mo->add_flag("--closed-form", mo.closed_form, "add the exact zero-flux columns");
  c_mo->add_option("--out", mo.out, "CSV output path (default: stdout)");

  BasinArgs ba;
  auto* c_ba = app.add_subcommand("basin", "convergence region of a stable point (CSV and/or PPM)");
  c_ba->add_option("--bx", ba.bx)->required();
  c_ba->add_option("--by", ba.by)->required();
  c_ba->add_option("--x-min", ba.x_min)->capture_default_str();
  c_ba->add_option("--x-max", ba.x_max)->capture_default_str();
  c_ba->add_option("--y-min", ba.y_min)->capture_default_str();
  c_ba->add_option("--y-max", ba.y_max)->capture_default_str();
  c_ba->add_option("--step", ba.step)->capture_default_str();
  c_ba->add_option("--t-max", ba.t_max, "horizon (default: from the slowest decay rate)");
  c_ba->add_option("--eps-in", ba.eps_in)->capture_default_str();
  c_ba->add_option("--r-out", ba.r_out)->capture_default_str();
  c_ba->add_option("--dt", ba.dt)->capture_default_str();
  c_ba->add_option("--csv", ba.csv, "CSV path (stdout when neither --csv nor --ppm)");
  c_ba->add_option("--ppm", ba.ppm, "PPM (P6) path");
  c_ba->add_option("--threads", ba.threads)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*c_ss) return run_steady_state(ss);
    if (*c_rd) return run_regime_diagram(rd);
    if (*c_sim) return run_simulate(sim);
    if (*c_ens) return run_ensemble(ens);
    if (*c_mo) return run_moments(mo);
    if (*c_ba) return run_basin(ba);
  } catch (const UsageError& e) {
    std::cerr << "lvflux: " << e.what() << "\n";
    return kUsage;
  } catch (const lvflux::NoStationaryPoint& e) {
    std::cerr << "lvflux: " << e.what() << "\n";
    return kNoStationary;
  } catch (const lvflux::NotStableRegime& e) {
    std::cerr << "lvflux: " << e.what() << "\n";
    return kNotStable;
  } catch (const std::invalid_argument& e) {
    std::cerr << "lvflux: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
