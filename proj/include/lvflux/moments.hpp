#pragma once

#include "lvflux/integrator.hpp"
#include "lvflux/model.hpp"

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace lvflux {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

/// Second moments of the deviations: <dX^2>, <dY^2>, <dX dY>.
template <typename Scalar>
struct MomentState {
  Scalar var_x{0};
  Scalar var_y{0};
  Scalar cov_xy{0};

  Scalar trace() const { return var_x + var_y; }
  Vector3<Scalar> as_vector() const { return Vector3<Scalar>(var_x, var_y, cov_xy); }
  static MomentState from_vector(const Vector3<Scalar>& v) { return {v(0), v(1), v(2)}; }
};

/// d(psi)/dt = l psi + phi with psi = (<dX^2>, <dY^2>, <dX dY>).
template <typename Scalar>
struct MomentMatrix {
  Matrix3<Scalar> l;
  Vector3<Scalar> phi;
};

/// Moment system of the linearized dynamics about (x_st, y_st) driven by white noise of
/// amplitude A entering through the column g = noise_column(target):
///
///   l = | 2(1-y)   0        -2x  |     phi = A^2 (g_x^2, g_y^2, g_x g_y)
///       | 0        2(x-1)    2y  |
///       | y       -x        x-y  |
///
/// At (1, 1) the last diagonal entry vanishes and phi = (A^2, 0, 0) for K1.
template <typename Scalar>
MomentMatrix<Scalar> moment_matrix(Scalar x_st, Scalar y_st, Scalar amplitude,
                                   NoiseTarget target = NoiseTarget::K1) {
  const Matrix2<Scalar> j = jacobian(x_st, y_st);
  MomentMatrix<Scalar> m;
  m.l << Scalar(2) * j(0, 0), Scalar(0), Scalar(2) * j(0, 1),
         Scalar(0), Scalar(2) * j(1, 1), Scalar(2) * j(1, 0),
         j(1, 0), j(0, 1), j(0, 0) + j(1, 1);
  const State<Scalar> g = noise_column(target, x_st, y_st);
  const Scalar a2 = amplitude * amplitude;
  m.phi << a2 * g.x() * g.x(), a2 * g.y() * g.y(), a2 * g.x() * g.y();
  return m;
}

template <typename Scalar>
struct MomentSeries {
  std::vector<Scalar> times;
  std::vector<MomentState<Scalar>> states;
};

/// Integrates the moment system from psi(0) = psi0 (zero by default) with RK4 over
/// floor(t_end/dt) steps. Throws NoStationaryPoint for red or black flux pairs.
template <typename Scalar>
MomentSeries<Scalar> solve_moments(const FluxParams<Scalar>& f, Scalar amplitude, Scalar dt,
                                   Scalar t_end, NoiseTarget target = NoiseTarget::K1,
                                   const MomentState<Scalar>& psi0 = {}) {
  if (!(dt > Scalar(0))) throw std::invalid_argument("solve_moments: dt must be positive");
  if (!(t_end >= Scalar(0))) throw std::invalid_argument("solve_moments: t_end must be >= 0");
  const auto a = analyze(f);
  if (a.regime == Regime::NoStationary || a.regime == Regime::NonPhysical)
    throw NoStationaryPoint("solve_moments: no physical stationary point");

  const MomentMatrix<Scalar> m = moment_matrix(a.x_st, a.y_st, amplitude, target);
  const auto n = static_cast<std::size_t>(std::floor(static_cast<double>(t_end / dt) + 1e-9));
  MomentSeries<Scalar> out;
  out.times.reserve(n + 1);
  out.states.reserve(n + 1);
  Vector3<Scalar> psi = psi0.as_vector();
  out.times.push_back(Scalar(0));
  out.states.push_back(psi0);
  const auto rhs = [&](const Vector3<Scalar>& v) -> Vector3<Scalar> { return m.l * v + m.phi; };
  for (std::size_t k = 1; k <= n; ++k) {
    psi = rk4_step(psi, dt, rhs);
    out.times.push_back(static_cast<Scalar>(k) * dt);
    out.states.push_back(MomentState<Scalar>::from_vector(psi));
  }
  return out;
}

/// Exact moments at zero flux for noise entering as +-xi in dX/dt (K1, K2, FluxX):
/// var_x = A^2/2 (t + sin 2t / 2), var_y = A^2/2 (t - sin 2t / 2), cov = A^2/4 (1 - cos 2t).
template <typename Scalar>
MomentState<Scalar> closed_form_zero_flux(Scalar amplitude, Scalar t) {
  using std::cos;
  using std::sin;
  if (!(t >= Scalar(0))) throw std::invalid_argument("closed_form_zero_flux: t must be >= 0");
  const Scalar a2 = amplitude * amplitude;
  const Scalar s2 = sin(Scalar(2) * t);
  return {a2 / Scalar(2) * (t + s2 / Scalar(2)), a2 / Scalar(2) * (t - s2 / Scalar(2)),
          a2 / Scalar(4) * (Scalar(1) - cos(Scalar(2) * t))};
}

}  // namespace lvflux
