#pragma once

#include <Eigen/Core>

#include <string_view>

namespace lvflux {

/// Reduced (prey, predator) populations, or deviations from a stationary point.
template <typename Scalar>
using State = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

/// Constant external fluxes. Positive values add individuals, negative values hunt them.
template <typename Scalar>
struct FluxParams {
  Scalar bx{0};
  Scalar by{0};
};

/// The single kinetic coefficient (or flux) that carries the Langevin noise.
enum class NoiseTarget { K1, K2, K3, K4, FluxX, FluxY };

enum class NoiseDistribution { Uniform, Gaussian };

struct NoiseSpec {
  NoiseTarget target = NoiseTarget::K1;
  double amplitude = 0.0;
  NoiseDistribution distribution = NoiseDistribution::Uniform;
};

inline constexpr NoiseTarget kAllNoiseTargets[] = {NoiseTarget::K1, NoiseTarget::K2,
                                                   NoiseTarget::K3, NoiseTarget::K4,
                                                   NoiseTarget::FluxX, NoiseTarget::FluxY};

constexpr std::string_view to_string(NoiseTarget t) {
  switch (t) {
    case NoiseTarget::K1: return "k1";
    case NoiseTarget::K2: return "k2";
    case NoiseTarget::K3: return "k3";
    case NoiseTarget::K4: return "k4";
    case NoiseTarget::FluxX: return "flux-x";
    case NoiseTarget::FluxY: return "flux-y";
  }
  return "?";
}

constexpr std::string_view to_string(NoiseDistribution d) {
  return d == NoiseDistribution::Uniform ? "uniform" : "gaussian";
}

/// dx/dt = x - x y + bx,  dy/dt = x y - y + by.
template <typename Scalar>
State<Scalar> deterministic_rhs(const State<Scalar>& s, const FluxParams<Scalar>& f) {
  const Scalar x = s.x();
  const Scalar y = s.y();
  const Scalar xy = x * y;
  return State<Scalar>(x - xy + f.bx, xy - y + f.by);
}

/// Same vector field with `xi` applied to exactly one term. Each branch evaluates in the
/// same order as deterministic_rhs, so xi == 0 reproduces it bitwise.
template <typename Scalar>
State<Scalar> perturbed_rhs(const State<Scalar>& s, const FluxParams<Scalar>& f,
                            NoiseTarget target, Scalar xi) {
  const Scalar x = s.x();
  const Scalar y = s.y();
  const Scalar one(1);
  switch (target) {
    case NoiseTarget::K1:
      return State<Scalar>((one + xi) * x - x * y + f.bx, x * y - y + f.by);
    case NoiseTarget::K2:
      return State<Scalar>(x - (one + xi) * x * y + f.bx, x * y - y + f.by);
    case NoiseTarget::K3:
      return State<Scalar>(x - x * y + f.bx, (one + xi) * x * y - y + f.by);
    case NoiseTarget::K4:
      return State<Scalar>(x - x * y + f.bx, x * y - (one + xi) * y + f.by);
    case NoiseTarget::FluxX:
      return State<Scalar>(x - x * y + (f.bx + xi), x * y - y + f.by);
    case NoiseTarget::FluxY:
      return State<Scalar>(x - x * y + f.bx, x * y - y + (f.by + xi));
  }
  return deterministic_rhs(s, f);
}

/// Jacobian of the vector field at (x, y).
template <typename Scalar>
Matrix2<Scalar> jacobian(Scalar x, Scalar y) {
  Matrix2<Scalar> j;
  j << Scalar(1) - y, -x,
       y, x - Scalar(1);
  return j;
}

/// d(rhs)/d(xi) at (x, y): the additive noise column of the linearized system.
template <typename Scalar>
State<Scalar> noise_column(NoiseTarget target, Scalar x, Scalar y) {
  switch (target) {
    case NoiseTarget::K1: return State<Scalar>(x, Scalar(0));
    case NoiseTarget::K2: return State<Scalar>(-x * y, Scalar(0));
    case NoiseTarget::K3: return State<Scalar>(Scalar(0), x * y);
    case NoiseTarget::K4: return State<Scalar>(Scalar(0), -y);
    case NoiseTarget::FluxX: return State<Scalar>(Scalar(1), Scalar(0));
    case NoiseTarget::FluxY: return State<Scalar>(Scalar(0), Scalar(1));
  }
  return State<Scalar>::Zero();
}

}  // namespace lvflux
