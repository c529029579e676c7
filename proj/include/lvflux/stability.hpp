#pragma once

#include "lvflux/grid.hpp"
#include "lvflux/model.hpp"
#include "lvflux/parallel.hpp"

#include <cmath>
#include <complex>
#include <string_view>
#include <utility>
#include <vector>

namespace lvflux {

/// Codes 0..4 are part of the CSV contract.
enum class Regime : int {
  NoStationary = 0,   // red: negative discriminant
  NonPhysical = 1,    // black: x_st <= 0 or y_st <= 0
  Unstable = 2,       // yellow
  ZeroStability = 3,  // brown: purely imaginary pair
  Stable = 4,         // green
};

constexpr std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::NoStationary: return "no-stationary";
    case Regime::NonPhysical: return "non-physical";
    case Regime::Unstable: return "unstable";
    case Regime::ZeroStability: return "zero-stability";
    case Regime::Stable: return "stable";
  }
  return "?";
}

/// Tolerance on Re(lambda) separating stable, zero-stability and unstable.
inline constexpr double kZeroRealPartTolerance = 1e-12;

template <typename Scalar>
struct StationaryAnalysis {
  bool exists = false;
  Scalar discriminant{0};
  Scalar x_st{0};
  Scalar y_st{0};
  std::complex<Scalar> lambda1{};
  std::complex<Scalar> lambda2{};
  Regime regime = Regime::NoStationary;
};

/// Stationary point on the "+" branch of the quadratic. Eigenvalues and regime are left
/// at their defaults; use analyze() for the full record.
template <typename Scalar>
StationaryAnalysis<Scalar> steady_state(const FluxParams<Scalar>& f) {
  using std::sqrt;
  StationaryAnalysis<Scalar> a;
  const Scalar s = Scalar(1) - f.bx - f.by;
  a.discriminant = s * s / Scalar(4) + f.bx;
  if (a.discriminant < Scalar(0)) return a;
  const Scalar root = sqrt(a.discriminant);
  a.exists = true;
  a.x_st = s / Scalar(2) + root;
  a.y_st = (Scalar(1) + f.bx + f.by) / Scalar(2) + root;
  return a;
}

/// Roots of lambda^2 - (x_st - y_st) lambda + (x_st + y_st - 1) = 0, "+" root first.
template <typename Scalar>
std::pair<std::complex<Scalar>, std::complex<Scalar>> eigenvalues(Scalar x_st, Scalar y_st) {
  using std::sqrt;
  using C = std::complex<Scalar>;
  const Scalar trace = x_st - y_st;
  const Scalar radicand = trace * trace + Scalar(4) * (Scalar(1) - x_st - y_st);
  const C root = radicand >= Scalar(0) ? C(sqrt(radicand), Scalar(0))
                                       : C(Scalar(0), sqrt(-radicand));
  const C half_trace(trace / Scalar(2), Scalar(0));
  return {half_trace + root / Scalar(2), half_trace - root / Scalar(2)};
}

template <typename Scalar>
Regime classify_point(Scalar x_st, Scalar y_st, std::complex<Scalar> l1, std::complex<Scalar> l2) {
  using std::abs;
  if (x_st <= Scalar(0) || y_st <= Scalar(0)) return Regime::NonPhysical;
  const Scalar eps(kZeroRealPartTolerance);
  if (l1.real() < -eps && l2.real() < -eps) return Regime::Stable;
  const bool purely_imaginary = abs(l1.real()) <= eps && abs(l2.real()) <= eps &&
                                l1.imag() != Scalar(0) && l2.imag() != Scalar(0);
  return purely_imaginary ? Regime::ZeroStability : Regime::Unstable;
}

/// Stationary point, eigenvalues and regime.
template <typename Scalar>
StationaryAnalysis<Scalar> analyze(const FluxParams<Scalar>& f) {
  auto a = steady_state(f);
  if (!a.exists) {
    a.regime = Regime::NoStationary;
    return a;
  }
  std::tie(a.lambda1, a.lambda2) = eigenvalues(a.x_st, a.y_st);
  a.regime = classify_point(a.x_st, a.y_st, a.lambda1, a.lambda2);
  return a;
}

template <typename Scalar>
Regime classify(const FluxParams<Scalar>& f) {
  return analyze(f).regime;
}

/// Row-major regime grid: row i is by = by_axis.at(i), column j is bx = bx_axis.at(j).
struct RegimeGrid {
  Axis bx_axis;
  Axis by_axis;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Regime> cells;

  Regime at(std::size_t i, std::size_t j) const { return cells[i * cols + j]; }
};

inline RegimeGrid regime_diagram(const Axis& bx_axis, const Axis& by_axis, unsigned threads = 1) {
  bx_axis.validate();
  by_axis.validate();
  RegimeGrid g{bx_axis, by_axis, by_axis.count(), bx_axis.count(), {}};
  g.cells.resize(g.rows * g.cols);
  parallel_for(g.rows, threads, [&](std::size_t i) {
    const double by = by_axis.at(i);
    for (std::size_t j = 0; j < g.cols; ++j)
      g.cells[i * g.cols + j] = classify(FluxParams<double>{bx_axis.at(j), by});
  });
  return g;
}

}  // namespace lvflux
