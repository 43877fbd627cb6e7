#pragma once

#include "lightjump/hamiltonian.hpp"
#include "lightjump/jump_measure.hpp"

#include <functional>
#include <vector>

namespace lightjump {

/// g_eff(p) = factor * (M0(p) - mass) for one active axis; `factor` carries the
/// total mass of every other axis when a 2D system is restricted to an invariant line.
struct EffectiveIncrement {
  JumpSpec spec;
  double factor = 1.0;

  [[nodiscard]] double operator()(double p) const { return factor * exp_increment(spec, p); }
  /// D_eff = g_eff''(0).
  [[nodiscard]] double curvature() const { return factor * moment(spec, 0.0, 2); }
};

/// Effective increment for motion along `axis` with every other momentum zero.
EffectiveIncrement on_axis_increment(const HamiltonianSystem& sys, int axis);

using ScalarField = std::function<double(double)>;

/// Nonzero root of f(x) p + g_eff(p) = 0, with sign opposite to f(x); zero where f
/// vanishes. Throws NoRootFound when the bracket grows past `momentum_cap`.
double pstar(const ScalarField& f, const EffectiveIncrement& g, double x, double momentum_cap = 50.0);

struct QuasiPotentialCurve {
  double anchor = 0.0;
  std::vector<double> grid;
  std::vector<double> pstar;
  std::vector<double> w;
};

/// W(x) = integral of pstar from the anchor to x, evaluated on every grid point
/// by adaptive quadrature between consecutive points.
QuasiPotentialCurve quasipotential(const ScalarField& f, const EffectiveIncrement& g, double anchor,
                                   const std::vector<double>& grid, double momentum_cap = 50.0);

/// Shorthand: W at a single point.
double quasipotential_at(const ScalarField& f, const EffectiveIncrement& g, double anchor, double x,
                         double momentum_cap = 50.0);

}  // namespace lightjump
