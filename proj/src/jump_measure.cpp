#include "lightjump/jump_measure.hpp"

#include "lightjump/error.hpp"
#include "lightjump/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace lightjump {

namespace {

// Exponent drop below the peak at which the integrand is truncated.
constexpr double kTailDrop = 46.0;

// Location of the maximum of y|p| - lambda y^alpha on y > 0.
double peak_location(const JumpSpec& spec, double abs_p) {
  if (abs_p == 0.0) return 0.0;
  return std::pow(abs_p / (spec.alpha() * spec.lambda()), 1.0 / (spec.alpha() - 1.0));
}

double truncation_point(const JumpSpec& spec, double abs_p, double y_peak, double e_peak) {
  const double target = e_peak - kTailDrop;
  auto exponent = [&](double y) { return y * abs_p - spec.lambda() * std::pow(y, spec.alpha()); };
  const double base = std::pow(kTailDrop / spec.lambda(), 1.0 / spec.alpha());
  double lo = y_peak;
  double hi = y_peak + base;
  while (exponent(hi) > target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (exponent(mid) > target ? lo : hi) = mid;
  }
  return std::max(hi, base);
}

}  // namespace

JumpSpec::JumpSpec(double lambda, double alpha) : lambda_(lambda), alpha_(alpha) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw SolverError(ErrorCode::InvalidArgument, "jump measure needs lambda > 0, got " + std::to_string(lambda));
  if (!(alpha > 1.0) || !std::isfinite(alpha))
    throw SolverError(ErrorCode::InvalidArgument, "jump measure needs alpha > 1, got " + std::to_string(alpha));
}

double peak_exponent(const JumpSpec& spec, double p) {
  const double y = peak_location(spec, std::abs(p));
  return y * std::abs(p) - spec.lambda() * std::pow(y, spec.alpha());
}

MomentSet moments(const JumpSpec& spec, double p) {
  if (!std::isfinite(p)) throw SolverError(ErrorCode::InvalidArgument, "moment at non-finite momentum");
  const double abs_p = std::abs(p);
  const double y_peak = peak_location(spec, abs_p);
  const double e_peak = y_peak * abs_p - spec.lambda() * std::pow(y_peak, spec.alpha());
  if (e_peak > kMaxLogPeak)
    throw SolverError(ErrorCode::QuadratureOverflow,
                      "peak exponent " + std::to_string(e_peak) + " at p = " + std::to_string(p));
  const double y_max = truncation_point(spec, abs_p, y_peak, e_peak);

  const double lambda = spec.lambda();
  const double alpha = spec.alpha();
  // Integrate over y > 0 only; the mirror point -y is folded in through
  // cosh/sinh, so odd moments vanish exactly at p = 0.
  using Vec4 = Eigen::Array<double, 4, 1>;
  auto integrand = [&](double y) -> Vec4 {
    const double z = y * abs_p;
    const double s = -lambda * std::pow(y, alpha) - e_peak;
    double c, sh, cm1;
    if (z < 1.0) {
      const double es = std::exp(s);
      const double h = std::sinh(0.5 * z);
      c = std::cosh(z) * es;
      sh = std::sinh(z) * es;
      cm1 = 2.0 * h * h * es;
    } else {
      const double ep = std::exp(z + s);
      const double em = std::exp(-z + s);
      c = 0.5 * (ep + em);
      sh = 0.5 * (ep - em);
      cm1 = c - std::exp(s);
    }
    return Vec4(c, y * sh, y * y * c, cm1);
  };

  std::array<double, 3> breaks{0.0, y_peak, y_max};
  std::array<double, 2> simple{0.0, y_max};
  std::span<const double> span(breaks);
  if (!(y_peak > 0.0 && y_peak < y_max)) span = simple;

  quad::Options opt;
  opt.rel_tol = kMomentRelTol;
  const auto res = quad::integrate<Vec4>(integrand, span, opt);
  if (!res.converged)
    throw SolverError(ErrorCode::QuadratureOverflow, "moment quadrature did not converge at p = " + std::to_string(p));

  const double scale = 2.0 * std::exp(e_peak);
  const double sign = p < 0.0 ? -1.0 : 1.0;
  return MomentSet{scale * res.value[0], sign * scale * res.value[1], scale * res.value[2], scale * res.value[3]};
}

double mass(const JumpSpec& spec) { return moments(spec, 0.0).m0; }

double moment(const JumpSpec& spec, double p, int k) {
  const MomentSet m = moments(spec, p);
  switch (k) {
    case 0: return m.m0;
    case 1: return m.m1;
    case 2: return m.m2;
    default:
      throw SolverError(ErrorCode::InvalidArgument, "moment order must be 0, 1 or 2, got " + std::to_string(k));
  }
}

double exp_increment(const JumpSpec& spec, double p) { return moments(spec, p).increment; }

namespace {

using Coefs = std::array<double, MomentTable::kNodes>;

// Size of the trailing log-moment coefficients at which a panel is accepted.
constexpr double kTableTailTol = 1e-12;

Coefs chebyshev_fit(const Coefs& values) {
  constexpr int n = MomentTable::kNodes;
  Coefs c{};
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += values[j] * std::cos(std::numbers::pi * k * (j + 0.5) / n);
    c[k] = acc * (k == 0 ? 1.0 : 2.0) / n;
  }
  return c;
}

double clenshaw(const Coefs& c, double u) {
  double b1 = 0.0;
  double b2 = 0.0;
  for (int k = MomentTable::kNodes - 1; k >= 1; --k) {
    const double b0 = 2.0 * u * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return u * b1 - b2 + c[0];
}

}  // namespace

MomentTable::MomentTable(const JumpSpec& spec) {
  const double lambda = spec.lambda();
  const double alpha = spec.alpha();
  // Momentum whose peak exponent equals the overflow cap.
  const double y_cap = std::pow(kMaxLogPeak / ((alpha - 1.0) * lambda), 1.0 / alpha);
  p_max_ = alpha * lambda * std::pow(y_cap, alpha - 1.0);
  // The y^2 weight can push M2 past the double range slightly below the cap.
  auto finite = [&spec](double p) {
    try {
      const MomentSet m = moments(spec, p);
      return std::isfinite(m.m0) && std::isfinite(m.m1) && std::isfinite(m.m2);
    } catch (const SolverError&) {
      return false;
    }
  };
  while (!finite(p_max_)) p_max_ *= 0.995;
  mass_ = lightjump::mass(spec);

  constexpr int n = kNodes;
  auto fit = [&](double a, double b, Panel& panel) {
    std::array<Coefs, 3> values{};
    for (int j = 0; j < n; ++j) {
      const double u = std::cos(std::numbers::pi * (j + 0.5) / n);
      const double p = 0.5 * (a + b) + 0.5 * (b - a) * u;
      const MomentSet m = moments(spec, p);
      values[0][j] = std::log(m.increment / (p * p));
      values[1][j] = std::log(m.m1 / p);
      values[2][j] = std::log(m.m2);
    }
    panel.a = a;
    panel.b = b;
    double tail = 0.0;
    for (int f = 0; f < 3; ++f) {
      panel.coef[f] = chebyshev_fit(values[f]);
      tail = std::max({tail, std::abs(panel.coef[f][n - 1]), std::abs(panel.coef[f][n - 2]),
                       std::abs(panel.coef[f][n - 3])});
    }
    return tail <= kTableTailTol;
  };

  // Depth-first bisection keeps the panels ordered left to right.
  std::vector<std::pair<double, double>> todo{{0.5 * p_max_, p_max_}, {0.0, 0.5 * p_max_}};
  while (!todo.empty()) {
    const auto [a, b] = todo.back();
    todo.pop_back();
    Panel panel;
    if (fit(a, b, panel) || b - a < 1e-9 * p_max_) {
      panels_.push_back(panel);
      upper_.push_back(b);
      continue;
    }
    const double mid = 0.5 * (a + b);
    todo.emplace_back(mid, b);
    todo.emplace_back(a, mid);
  }
}

MomentSet MomentTable::operator()(double p) const {
  if (!std::isfinite(p)) throw SolverError(ErrorCode::InvalidArgument, "moment at non-finite momentum");
  const double abs_p = std::abs(p);
  if (abs_p > p_max_)
    throw SolverError(ErrorCode::QuadratureOverflow, "momentum " + std::to_string(p) + " beyond the tabulated range");
  if (abs_p == 0.0) {
    const Panel& first = panels_.front();
    const double m2 = std::exp(clenshaw(first.coef[2], -1.0));
    return MomentSet{mass_, 0.0, m2, 0.0};
  }
  const auto it = std::lower_bound(upper_.begin(), upper_.end(), abs_p);
  const Panel& panel = panels_[std::min<std::size_t>(it - upper_.begin(), panels_.size() - 1)];
  const double u = std::clamp((2.0 * abs_p - panel.a - panel.b) / (panel.b - panel.a), -1.0, 1.0);
  const double increment = abs_p * abs_p * std::exp(clenshaw(panel.coef[0], u));
  const double m1 = p * std::exp(clenshaw(panel.coef[1], u));
  const double m2 = std::exp(clenshaw(panel.coef[2], u));
  return MomentSet{mass_ + increment, m1, m2, increment};
}

}  // namespace lightjump
