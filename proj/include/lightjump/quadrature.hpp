#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace lightjump::quad {

/// Gauss-Legendre rule with N nodes on [-1, 1], built once by Newton iteration
/// on the Legendre recurrence.
template <int N>
struct GaussLegendre {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendre() {
    for (int i = 0; i < (N + 1) / 2; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (N + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= N; ++k) {
          const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = pk;
        }
        dp = N * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      nodes[i] = -x;
      nodes[N - 1 - i] = x;
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      weights[i] = w;
      weights[N - 1 - i] = w;
    }
  }

  static const GaussLegendre& instance() {
    static const GaussLegendre rule;
    return rule;
  }
};

/// Quadrature accumulator type: a scalar or a fixed-size Eigen array of
/// integrand components sharing one set of nodes.
template <class Value>
struct ValueTraits {
  static Value zero() { return Value(0.0); }
  static Value abs(const Value& v) { return std::abs(v); }
  static int size(const Value&) { return 1; }
  static double get(const Value& v, int) { return v; }
};

template <int K>
struct ValueTraits<Eigen::Array<double, K, 1>> {
  using Value = Eigen::Array<double, K, 1>;
  static Value zero() { return Value::Zero(); }
  static Value abs(const Value& v) { return v.abs(); }
  static int size(const Value&) { return K; }
  static double get(const Value& v, int i) { return v[i]; }
};

struct Options {
  double rel_tol = 1e-11;
  double abs_tol = 0.0;
  int max_panels = 2000;
};

template <class Value>
struct Result {
  Value value;
  Value error;
  int panels = 0;
  bool converged = false;
};

/// Composite adaptive Gauss-Legendre integration over the consecutive intervals
/// of `breaks`. Each panel's error is estimated as the difference between the
/// rule on the panel and the rule on its two halves; the panel with the largest
/// normalized error is halved until the summed error meets the tolerance for
/// every component.
template <class Value, int N = 16, class F>
Result<Value> integrate(F&& f, std::span<const double> breaks, const Options& opt = {}) {
  using Traits = ValueTraits<Value>;
  const auto& rule = GaussLegendre<N>::instance();

  auto apply = [&](double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    Value acc = Traits::zero();
    for (int i = 0; i < N; ++i) acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return Value(acc * half);
  };

  struct Panel {
    double a, b;
    Value whole, left, right, err;
  };
  auto make_panel = [&](double a, double b, const Value& whole) {
    const double m = 0.5 * (a + b);
    Panel p{a, b, whole, apply(a, m), apply(m, b), Traits::zero()};
    p.err = Traits::abs(Value(p.whole - p.left - p.right));
    return p;
  };

  std::vector<Panel> panels;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    if (!(breaks[i + 1] > breaks[i])) continue;
    panels.push_back(make_panel(breaks[i], breaks[i + 1], apply(breaks[i], breaks[i + 1])));
  }

  Result<Value> res{Traits::zero(), Traits::zero(), 0, false};
  if (panels.empty()) {
    res.converged = true;
    return res;
  }

  while (true) {
    Value total = Traits::zero();
    Value err = Traits::zero();
    for (const auto& p : panels) {
      total += p.left + p.right;
      err += p.err;
    }
    const int ncomp = Traits::size(total);
    std::array<double, 8> scale{};
    bool done = true;
    for (int c = 0; c < ncomp; ++c) {
      scale[c] = std::max({opt.rel_tol * std::abs(Traits::get(total, c)), opt.abs_tol, 1e-300});
      if (Traits::get(err, c) > scale[c]) done = false;
    }
    res.value = total;
    res.error = err;
    res.panels = static_cast<int>(panels.size());
    if (done) {
      res.converged = true;
      return res;
    }
    if (static_cast<int>(panels.size()) >= opt.max_panels) return res;

    std::size_t worst = 0;
    double worst_score = -1.0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      double s = 0.0;
      for (int c = 0; c < ncomp; ++c) s = std::max(s, Traits::get(panels[i].err, c) / scale[c]);
      if (s > worst_score) {
        worst_score = s;
        worst = i;
      }
    }
    const Panel p = panels[worst];
    const double m = 0.5 * (p.a + p.b);
    panels[worst] = make_panel(p.a, m, p.left);
    panels.push_back(make_panel(m, p.b, p.right));
  }
}

/// Scalar convenience wrapper over a single interval.
template <int N = 16, class F>
Result<double> integrate_scalar(F&& f, double a, double b, const Options& opt = {}) {
  const std::array<double, 2> breaks{std::min(a, b), std::max(a, b)};
  auto r = integrate<double, N>(std::forward<F>(f), breaks, opt);
  if (b < a) r.value = -r.value;
  return r;
}

}  // namespace lightjump::quad
