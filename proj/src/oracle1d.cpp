#include "lightjump/oracle1d.hpp"

#include "lightjump/error.hpp"
#include "lightjump/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace lightjump {

EffectiveIncrement on_axis_increment(const HamiltonianSystem& sys, int axis) {
  if (axis < 0 || axis >= sys.dim()) throw SolverError(ErrorCode::InvalidArgument, "axis out of range");
  return EffectiveIncrement{sys.specs()[axis], sys.mass_of_others(axis)};
}

double pstar(const ScalarField& f, const EffectiveIncrement& g, double x, double momentum_cap) {
  const double fx = f(x);
  if (fx == 0.0) return 0.0;
  const double sign = fx < 0.0 ? 1.0 : -1.0;
  // Along q = |p| in the direction opposite to f, H(q) = -|f| q + g(sign q) is
  // negative just above zero and positive beyond the root.
  auto h = [&](double q) { return -std::abs(fx) * q + g(sign * q); };

  const double seed = 2.0 * std::abs(fx) / g.curvature();
  double lo = 0.5 * seed;
  double hi = seed;
  auto safe_h = [&](double q) {
    try {
      return h(q);
    } catch (const SolverError& e) {
      if (e.code() == ErrorCode::QuadratureOverflow) return std::numeric_limits<double>::infinity();
      throw;
    }
  };
  double hlo = safe_h(lo);
  for (int i = 0; hlo >= 0.0 && i < 2000; ++i) {
    lo *= 0.5;
    hlo = safe_h(lo);
  }
  if (hlo >= 0.0) throw SolverError(ErrorCode::NoRootFound, "lower bracket for pstar not found at x = " + std::to_string(x));
  double hhi = safe_h(hi);
  while (hhi <= 0.0) {
    lo = hi;
    hlo = hhi;
    hi *= 2.0;
    if (hi > momentum_cap)
      throw SolverError(ErrorCode::NoRootFound, "pstar bracket exceeded the momentum cap at x = " + std::to_string(x));
    hhi = safe_h(hi);
  }

  // Illinois-modified regula falsi with a bisection fallback.
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    double q = std::isfinite(hhi) ? (lo * hhi - hi * hlo) / (hhi - hlo) : 0.5 * (lo + hi);
    if (!(q > lo && q < hi)) q = 0.5 * (lo + hi);
    const double hq = safe_h(q);
    if (hq == 0.0) return sign * q;
    if (hq < 0.0) {
      lo = q;
      hlo = hq;
      if (side == -1) hhi *= 0.5;
      side = -1;
    } else {
      hi = q;
      hhi = hq;
      if (side == 1) hlo *= 0.5;
      side = 1;
    }
    if (hi - lo <= 1e-12 * hi) break;
  }
  return sign * 0.5 * (lo + hi);
}

QuasiPotentialCurve quasipotential(const ScalarField& f, const EffectiveIncrement& g, double anchor,
                                   const std::vector<double>& grid, double momentum_cap) {
  QuasiPotentialCurve c;
  c.anchor = anchor;
  c.grid = grid;
  c.pstar.resize(grid.size());
  c.w.resize(grid.size());

  auto integrand = [&](double s) { return pstar(f, g, s, momentum_cap); };
  quad::Options opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = 1e-300;
  auto segment = [&](double a, double b) {
    if (a == b) return 0.0;
    return quad::integrate_scalar<16>(integrand, a, b, opt).value;
  };

  // Walk outward from the anchor on each side so every segment is integrated once.
  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return grid[a] < grid[b]; });
  const auto split = std::partition_point(order.begin(), order.end(), [&](auto i) { return grid[i] < anchor; });

  double prev = anchor;
  double acc = 0.0;
  for (auto it = split; it != order.end(); ++it) {
    acc += segment(prev, grid[*it]);
    prev = grid[*it];
    c.w[*it] = acc;
  }
  prev = anchor;
  acc = 0.0;
  for (auto it = std::make_reverse_iterator(split); it != order.rend(); ++it) {
    acc += segment(prev, grid[*it]);
    prev = grid[*it];
    c.w[*it] = acc;
  }
  for (std::size_t i = 0; i < grid.size(); ++i) c.pstar[i] = pstar(f, g, grid[i], momentum_cap);
  return c;
}

double quasipotential_at(const ScalarField& f, const EffectiveIncrement& g, double anchor, double x,
                         double momentum_cap) {
  return quasipotential(f, g, anchor, {x}, momentum_cap).w.front();
}

}  // namespace lightjump
