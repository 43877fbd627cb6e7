#include "lightjump/scaling.hpp"

#include "lightjump/error.hpp"
#include "lightjump/oracle1d.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <set>

namespace lightjump {

ScalingTable sweep(const WellDepthFn& depth, const std::vector<double>& alphas, const std::vector<double>& lambdas,
                   std::string model, std::string method, int threads) {
  ScalingTable table{std::move(model), std::move(method), {}};
  std::set<std::pair<double, double>> seen;
  for (double a : alphas)
    for (double l : lambdas)
      if (seen.emplace(a, l).second) table.rows.push_back({a, l, std::numeric_limits<double>::quiet_NaN(), {}});

  parallel_for(static_cast<int>(table.rows.size()), threads, [&](int i) {
    ScalingRow& row = table.rows[i];
    try {
      const double w = depth(row.alpha, row.lambda);
      if (w > 0.0 && std::isfinite(w))
        row.w = w;
      else
        row.failure = "non-positive well depth";
    } catch (const SolverError& e) {
      row.failure = e.what();
    }
  });
  return table;
}

std::vector<SlopeFit> fit_slopes(const ScalingTable& table) {
  std::map<double, std::vector<std::pair<double, double>>> by_alpha;
  for (const auto& r : table.rows) {
    auto& pts = by_alpha[r.alpha];
    if (r.ok()) pts.emplace_back(std::log(r.lambda), std::log(r.w));
  }
  std::vector<SlopeFit> out;
  for (const auto& [alpha, pts] : by_alpha) {
    const auto n = static_cast<int>(pts.size());
    if (n < 3)
      throw SolverError(ErrorCode::InsufficientPoints,
                        "alpha = " + std::to_string(alpha) + " has " + std::to_string(n) + " usable lambda points");
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
      mx += x;
      my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (const auto& [x, y] : pts) {
      sxx += (x - mx) * (x - mx);
      sxy += (x - mx) * (y - my);
      syy += (y - my) * (y - my);
    }
    if (!(sxx > 0.0)) throw SolverError(ErrorCode::InsufficientPoints, "lambda values do not vary");
    SlopeFit f;
    f.alpha = alpha;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    f.points = n;
    out.push_back(f);
  }
  return out;
}

double fit_exponent(const std::vector<SlopeFit>& slopes) {
  if (slopes.empty()) throw SolverError(ErrorCode::InsufficientPoints, "no slopes to fit");
  double num = 0.0, den = 0.0;
  for (const auto& s : slopes) {
    num += s.slope / s.alpha;
    den += 1.0 / (s.alpha * s.alpha);
  }
  return num / den;
}

std::map<double, double> c_values(const ScalingTable& table, int d) {
  std::map<double, std::pair<double, int>> acc;
  for (const auto& r : table.rows) {
    if (!r.ok()) continue;
    auto& [sum, n] = acc[r.alpha];
    sum += std::log(r.w) - (d / r.alpha) * std::log(r.lambda);
    ++n;
  }
  std::map<double, double> out;
  for (const auto& [alpha, sn] : acc) out[alpha] = std::exp(sn.first / sn.second);
  return out;
}

double c_alpha(const CAlphaConstants& c, double alpha) { return c.k2 - c.k1 * std::exp(-c.s2 * std::pow(alpha, c.s1)); }

namespace {

using Point = std::array<double, 4>;   // ln k1, ln k2, s1, ln s2

CAlphaConstants unpack(const Point& u) { return {std::exp(u[0]), std::exp(u[1]), u[2], std::exp(u[3])}; }

struct SimplexResult {
  Point best{};
  double value = 0.0;
  bool converged = false;
};

template <class F>
SimplexResult nelder_mead(F&& f, const Point& start, const Point& step, int max_iter) {
  constexpr int n = 4;
  std::array<Point, n + 1> x{};
  std::array<double, n + 1> fx{};
  x[0] = start;
  for (int i = 0; i < n; ++i) {
    x[i + 1] = start;
    x[i + 1][i] += step[i];
  }
  for (int i = 0; i <= n; ++i) fx[i] = f(x[i]);

  auto combine = [](const Point& a, const Point& b, double t) {
    Point r{};
    for (int k = 0; k < n; ++k) r[k] = a[k] + t * (b[k] - a[k]);
    return r;
  };

  SimplexResult res;
  for (int iter = 0; iter < max_iter; ++iter) {
    std::array<int, n + 1> order{};
    for (int i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fx[a] < fx[b]; });
    std::array<Point, n + 1> xs{};
    std::array<double, n + 1> fs{};
    for (int i = 0; i <= n; ++i) {
      xs[i] = x[order[i]];
      fs[i] = fx[order[i]];
    }
    x = xs;
    fx = fs;

    double size = 0.0;
    for (int i = 1; i <= n; ++i)
      for (int k = 0; k < n; ++k) size = std::max(size, std::abs(x[i][k] - x[0][k]));
    if (size < 1e-11 && fx[n] - fx[0] <= 1e-14 * std::abs(fx[0]) + 1e-300) {
      res.converged = true;
      break;
    }

    Point centroid{};
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) centroid[k] += x[i][k] / n;

    const Point xr = combine(centroid, x[n], -1.0);
    const double fr = f(xr);
    if (fr < fx[0]) {
      const Point xe = combine(centroid, x[n], -2.0);
      const double fe = f(xe);
      if (fe < fr) {
        x[n] = xe;
        fx[n] = fe;
      } else {
        x[n] = xr;
        fx[n] = fr;
      }
    } else if (fr < fx[n - 1]) {
      x[n] = xr;
      fx[n] = fr;
    } else {
      const bool outside = fr < fx[n];
      const Point xc = outside ? combine(centroid, xr, 0.5) : combine(centroid, x[n], 0.5);
      const double fc = f(xc);
      if (fc < (outside ? fr : fx[n])) {
        x[n] = xc;
        fx[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          x[i] = combine(x[0], x[i], 0.5);
          fx[i] = f(x[i]);
        }
      }
    }
  }
  const auto best = std::min_element(fx.begin(), fx.end()) - fx.begin();
  res.best = x[best];
  res.value = fx[best];
  return res;
}

// Uniform in [-1, 1) from the raw 64-bit output, identical on every platform.
double symmetric_unit(std::mt19937_64& rng) {
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

}  // namespace

CAlphaFit fit_c_alpha(const std::map<double, double>& c_points, const CAlphaFitOptions& options) {
  if (c_points.size() < 5)
    throw SolverError(ErrorCode::InsufficientPoints, "C(alpha) fit needs at least five alpha values");
  std::vector<double> alphas, cs;
  for (const auto& [a, c] : c_points) {
    alphas.push_back(a);
    cs.push_back(c);
  }
  auto sse = [&](const Point& u) {
    const CAlphaConstants k = unpack(u);
    double s = 0.0;
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      const double r = c_alpha(k, alphas[i]) - cs[i];
      s += r * r;
    }
    return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
  };

  const double c_hi = *std::max_element(cs.begin(), cs.end());
  const double c_lo = *std::min_element(cs.begin(), cs.end());
  const double k2_seed = std::max(cs.back(), 1e-300);
  const double k1_seed = std::max(c_hi - c_lo, 1e-3 * std::abs(k2_seed));
  const Point seed{std::log(k1_seed), std::log(k2_seed), 1.0, 0.0};
  const Point step{0.2, 0.2, 0.2, 0.2};

  std::mt19937_64 rng(options.seed);
  SimplexResult best;
  best.value = std::numeric_limits<double>::infinity();
  int converged = 0;
  for (int s = 0; s < options.starts; ++s) {
    Point start = seed;
    if (s > 0) {
      start[0] += 0.5 * symmetric_unit(rng);
      start[1] += 0.5 * symmetric_unit(rng);
      start[2] *= std::exp(0.5 * symmetric_unit(rng));
      start[3] += 0.5 * symmetric_unit(rng);
    }
    SimplexResult r = nelder_mead(sse, start, step, options.max_iterations);
    // A restart from the end point clears the usual simplex stagnation.
    if (r.converged) r = nelder_mead(sse, r.best, {0.01, 0.01, 0.01, 0.01}, options.max_iterations);
    if (r.converged) ++converged;
    if (r.converged && r.value < best.value) best = r;
  }
  if (converged == 0) throw SolverError(ErrorCode::FitNotConverged, "no Nelder-Mead start converged");

  CAlphaFit fit;
  fit.constants = unpack(best.best);
  fit.residual_rms = std::sqrt(best.value / static_cast<double>(alphas.size()));
  fit.converged_starts = converged;
  return fit;
}

ScalingFit fit_scaling(const ScalingTable& table, const CAlphaFitOptions& options) {
  ScalingFit fit;
  fit.slopes = fit_slopes(table);
  fit.exponent_fit = fit_exponent(fit.slopes);
  fit.exponent_rule = static_cast<int>(std::lround(fit.exponent_fit));
  fit.c_values = c_values(table, fit.exponent_rule);
  fit.c_fit = fit_c_alpha(fit.c_values, options);
  fit.alpha_min = fit.c_values.begin()->first;
  fit.alpha_max = fit.c_values.rbegin()->first;
  return fit;
}

double predict_w(const CAlphaConstants& c, int d, double alpha, double lambda) {
  return c_alpha(c, alpha) * std::pow(lambda, d / alpha);
}

Prediction predict_w(const ScalingFit& fit, double alpha, double lambda) {
  return {predict_w(fit.c_fit.constants, fit.exponent_rule, alpha, lambda),
          alpha < fit.alpha_min || alpha > fit.alpha_max};
}

std::string_view to_string(DepthMethod m) noexcept { return m == DepthMethod::Oracle ? "oracle" : "shooting"; }

DepthMethod depth_method_from_string(const std::string& s) {
  if (s == "oracle") return DepthMethod::Oracle;
  if (s == "shooting") return DepthMethod::Shooting;
  throw SolverError(ErrorCode::ConfigInvalid, "unknown well-depth method '" + s + "'");
}

double climate_well_depth(const EnergyBalanceParams& params, double alpha, double lambda, DepthMethod method,
                          const ShootingSettings& settings) {
  const VectorFieldModel model = make_energy_balance_model(params);
  if (model.fixed_points.size() != 3)
    throw SolverError(ErrorCode::NoRootFound, "energy balance model is not bistable for these parameters");
  const double cold = model.fixed_points[0].location[0];
  const double saddle = model.fixed_points[1].location[0];
  const HamiltonianSystem sys(model, {JumpSpec(lambda, alpha)});
  if (method == DepthMethod::Oracle) {
    const ScalarField f = [params](double x) { return energy_balance_drift(params, x); };
    return quasipotential_at(f, on_axis_increment(sys, 0), cold, saddle, settings.momentum_cap);
  }
  const PathRecord rec = shoot_to_saddle_1d(sys, build_chart(sys, model.fixed_points[0].location), saddle, settings);
  if (rec.termination_label != "saddle")
    throw SolverError(ErrorCode::NoExitFound, "climate path ended by " + rec.termination_label);
  return rec.exit_state.w;
}

double maier_stein_saddle_action(const MaierSteinParams& params, double alpha1, double alpha2, double lambda,
                                 const ShootingSettings& settings, const SaddleActionOptions& options) {
  const HamiltonianSystem sys(make_maier_stein_model(params), {JumpSpec(lambda, alpha1), JumpSpec(lambda, alpha2)});
  const Shooter shooter(sys, maier_stein_left_basin_boundary(), settings, Eigen::Vector2d(-1.0, 0.0));
  const ActionPlot plot = action_plot(shooter, options.n_theta, options.threads);
  const auto minima = find_minima(shooter, plot, options.refine_tol, options.threads);
  double w = std::numeric_limits<double>::infinity();
  for (const auto& m : minima) w = std::min(w, m.action);
  return w;
}

}  // namespace lightjump
