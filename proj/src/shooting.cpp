#include "lightjump/shooting.hpp"

#include "lightjump/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

namespace lightjump {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
const std::string kExitPointLabel = "exit-point";

template <class F>
std::pair<double, double> golden_section(F&& f, double a, double b, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double best_x = 0.5 * (a + b);
  double best_f = kInf;
  auto eval = [&](double x) {
    const double v = f(x);
    if (v < best_f) {
      best_f = v;
      best_x = x;
    }
    return v;
  };
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = eval(d);
    }
  }
  return {best_x, best_f};
}

bool on_reflection_axis(double theta) {
  const double r = std::remainder(theta, std::numbers::pi);
  return std::abs(r) < 1e-14;
}

}  // namespace

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min(threads, n);
  pool.reserve(count);
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

BasinBoundary maier_stein_left_basin_boundary() {
  return BasinBoundary{"x1 = 0", [](const Eigen::VectorXd& x) { return x[0]; }, {Eigen::Vector2d(0.0, 0.0)}};
}

Shooter::Shooter(HamiltonianSystem sys, BasinBoundary boundary, ShootingSettings settings,
                 Eigen::VectorXd stable_point)
    : sys_(std::move(sys)),
      boundary_(std::move(boundary)),
      settings_(settings),
      chart_(build_chart(sys_, stable_point)) {
  if (!boundary_.function) throw SolverError(ErrorCode::InvalidArgument, "shooter needs a boundary function");
  if (!(settings_.radius > 0.0)) throw SolverError(ErrorCode::InvalidArgument, "launch radius must be positive");
}

ExtendedState Shooter::launch_state(double theta) const {
  Eigen::VectorXd offset(chart_.dim());
  if (chart_.dim() == 1) {
    offset[0] = settings_.radius * (std::cos(theta) >= 0.0 ? 1.0 : -1.0);
  } else {
    offset.setZero();
    offset[0] = settings_.radius * std::cos(theta);
    offset[1] = settings_.radius * std::sin(theta);
  }
  return project_to_zero_energy(sys_, initial_condition(chart_, offset));
}

std::vector<StopCondition> Shooter::stops() const {
  std::vector<StopCondition> s;
  s.push_back(StopCondition::boundary_crossing(boundary_.function, "boundary"));
  for (const auto& e : boundary_.exit_points)
    s.push_back(StopCondition::proximity(e, settings_.proximity_radius, kExitPointLabel));
  s.push_back(StopCondition::escape(chart_.fixed_point, settings_.escape_radius));
  s.push_back(StopCondition::max_time(settings_.max_time));
  s.push_back(StopCondition::momentum_cap(settings_.momentum_cap));
  return s;
}

IntegratorOptions Shooter::integrator_options() const {
  IntegratorOptions opt = settings_.integrator;
  const double scale = chart_.momentum_map.norm();
  if (scale > 0.0 && std::isfinite(scale)) opt.momentum_scale = scale;
  return opt;
}

PathRecord Shooter::shoot(double theta) const { return integrate(sys_, launch_state(theta), stops(), integrator_options()); }

PathRecord Shooter::shoot_toward(double theta, const Eigen::VectorXd& target, double capture) const {
  auto s = stops();
  s.push_back(StopCondition::proximity(target, capture, "target"));
  return integrate(sys_, launch_state(theta), s, integrator_options());
}

Shooter Shooter::with_radius(double r) const {
  ShootingSettings s = settings_;
  s.radius = r;
  return Shooter(sys_, boundary_, s, chart_.fixed_point);
}

bool is_exit(const PathRecord& rec) {
  return rec.termination == StopCondition::Kind::BoundaryCrossing ||
         (rec.termination == StopCondition::Kind::Proximity && rec.termination_label == kExitPointLabel) ||
         rec.termination_label == "saddle";
}

ActionPlot action_plot(const Shooter& shooter, int n_theta, int threads) {
  return action_plot(shooter, n_theta, 0.0, kTwoPi, threads);
}

ActionPlot action_plot(const Shooter& shooter, int n_theta, double theta_lo, double theta_hi, int threads) {
  if (n_theta < 8) throw SolverError(ErrorCode::InvalidArgument, "action plot needs at least 8 angles");
  if (!(theta_hi > theta_lo)) throw SolverError(ErrorCode::InvalidArgument, "empty theta range");
  ActionPlot plot;
  plot.theta_lo = theta_lo;
  plot.theta_hi = theta_hi;
  plot.periodic = std::abs((theta_hi - theta_lo) - kTwoPi) < 1e-12;
  plot.model = shooter.system().model().name;
  plot.specs = shooter.system().specs();
  plot.radius = shooter.settings().radius;
  plot.boundary = shooter.boundary().description;
  plot.entries.resize(n_theta);

  const double step = plot.periodic ? (theta_hi - theta_lo) / n_theta : (theta_hi - theta_lo) / (n_theta - 1);
  parallel_for(n_theta, threads, [&](int i) {
    ActionPlotEntry& e = plot.entries[i];
    e.theta = theta_lo + i * step;
    try {
      const PathRecord rec = shooter.shoot(e.theta);
      e.exit_state = rec.exit_state;
      e.action = rec.exit_state.w;
      e.termination = rec.termination_label;
      e.exited = is_exit(rec);
    } catch (const SolverError& err) {
      e.action = std::numeric_limits<double>::quiet_NaN();
      e.termination = "failed:" + std::string(to_string(err.code()));
      e.exited = false;
    }
  });
  return plot;
}

std::vector<ExtremalPath> find_minima(const Shooter& shooter, const ActionPlot& plot, double refine_tol, int threads) {
  const auto& en = plot.entries;
  const auto n = static_cast<int>(en.size());
  const auto exits = std::count_if(en.begin(), en.end(), [](const auto& e) { return e.exited; });
  if (exits == 0) throw SolverError(ErrorCode::NoExitFound, "no launch angle reached the boundary");

  const bool symmetric = shooter.system().model().x2_reflection_symmetric;
  auto value = [&](int i) { return en[i].exited ? en[i].action : kInf; };

  struct Candidate {
    int index;
    double lo, hi;
    bool exact;
  };
  std::vector<Candidate> cands;
  for (int i = 0; i < n; ++i) {
    if (!en[i].exited) continue;
    const double a = value(i);
    int ip = i - 1;
    int in = i + 1;
    if (plot.periodic) {
      ip = (i + n - 1) % n;
      in = (i + 1) % n;
    }
    double prev = ip >= 0 ? value(ip) : kInf;
    double next = in < n ? value(in) : kInf;
    const bool mirror_end = symmetric && on_reflection_axis(en[i].theta);
    // A range end on the reflection axis sees its mirror image as the missing neighbour.
    if (ip < 0 && mirror_end) prev = next;
    if (in >= n && mirror_end) next = prev;
    const bool is_min = (a <= prev && a < next) || (a < prev && a <= next);
    if (!is_min) continue;
    const double lo = ip >= 0 ? en[ip].theta - (plot.periodic && ip > i ? kTwoPi : 0.0) : en[i].theta;
    const double hi = in < n ? en[in].theta + (plot.periodic && in < i ? kTwoPi : 0.0) : en[i].theta;
    cands.push_back({i, lo, hi, mirror_end});
  }

  std::vector<ExtremalPath> out(cands.size());
  parallel_for(static_cast<int>(cands.size()), threads, [&](int k) {
    const Candidate& c = cands[k];
    ExtremalPath ep;
    if (c.exact || !(c.hi > c.lo)) {
      ep.theta = en[c.index].theta;
      ep.path = shooter.shoot(ep.theta);
      ep.action = ep.path.exit_state.w;
    } else {
      auto objective = [&](double th) {
        try {
          const PathRecord rec = shooter.shoot(th);
          return is_exit(rec) ? rec.exit_state.w : kInf;
        } catch (const SolverError&) {
          return kInf;
        }
      };
      auto [th, val] = golden_section(objective, c.lo, c.hi, refine_tol);
      if (!(val <= value(c.index))) th = en[c.index].theta;
      ep.theta = std::fmod(th + kTwoPi, kTwoPi);
      if (!plot.periodic) ep.theta = th;
      ep.path = shooter.shoot(th);
      ep.action = ep.path.exit_state.w;
    }
    out[k] = std::move(ep);
  });

  double amin = kInf;
  for (const auto& e : out) amin = std::min(amin, e.action);
  for (auto& e : out) e.most_probable = e.action <= amin + 1e-7 * std::abs(amin);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.theta < b.theta; });
  return out;
}

std::vector<ExtremalCluster> extremals_to_point(const Shooter& shooter, int n_theta, const Eigen::VectorXd& target,
                                                double tol, int threads) {
  if (n_theta < 8) throw SolverError(ErrorCode::InvalidArgument, "extremal scan needs at least 8 angles");
  const double capture = std::min(tol, shooter.settings().proximity_radius);
  const double exclusion = 2.0 * shooter.settings().radius;
  const Eigen::VectorXd& origin = shooter.chart().fixed_point;

  struct Approach {
    double distance = kInf;
    double action = 0.0;
  };
  auto approach = [&](double theta) {
    Approach a;
    try {
      const PathRecord rec = shooter.shoot_toward(theta, target, capture);
      for (const auto& s : rec.samples) {
        if ((s.x - origin).norm() <= exclusion) continue;
        const double dist = (s.x - target).norm();
        if (dist < a.distance) {
          a.distance = dist;
          a.action = s.w;
        }
      }
    } catch (const SolverError&) {
    }
    return a;
  };

  const double step = kTwoPi / n_theta;
  std::vector<Approach> grid(n_theta);
  parallel_for(n_theta, threads, [&](int i) { grid[i] = approach(i * step); });

  // Local minima of the closest-approach distance, refined in theta.
  std::vector<int> seeds;
  for (int i = 0; i < n_theta; ++i) {
    const double d = grid[i].distance;
    const double dp = grid[(i + n_theta - 1) % n_theta].distance;
    const double dn = grid[(i + 1) % n_theta].distance;
    if (std::isfinite(d) && ((d <= dp && d < dn) || (d < dp && d <= dn))) seeds.push_back(i);
  }
  struct Refined {
    int index;
    double theta;
    Approach best;
  };
  std::vector<Refined> refined(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), threads, [&](int k) {
    const int i = seeds[k];
    Refined r{i, i * step, grid[i]};
    if (grid[i].distance > capture) {
      Approach best = grid[i];
      double best_theta = i * step;
      auto objective = [&](double th) {
        const Approach a = approach(th);
        if (a.distance < best.distance) {
          best = a;
          best_theta = th;
        }
        return a.distance;
      };
      golden_section(objective, (i - 1) * step, (i + 1) * step, 1e-9);
      r.theta = std::fmod(best_theta + kTwoPi, kTwoPi);
      r.best = best;
    }
    refined[k] = r;
  });

  std::vector<Refined> hits;
  for (const auto& r : refined)
    if (r.best.distance < tol) hits.push_back(r);
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.index < b.index; });

  // Merge families whose seeds lie within three grid steps (periodically).
  std::vector<std::vector<Refined>> families;
  for (const auto& h : hits) {
    if (!families.empty() && h.index - families.back().back().index <= 3) families.back().push_back(h);
    else families.push_back({h});
  }
  if (families.size() > 1 && families.front().front().index + n_theta - families.back().back().index <= 3) {
    families.front().insert(families.front().end(), families.back().begin(), families.back().end());
    families.pop_back();
  }

  std::vector<ExtremalCluster> out;
  for (const auto& fam : families) {
    const auto best = std::min_element(fam.begin(), fam.end(), [](const auto& a, const auto& b) {
      return a.best.distance < b.best.distance;
    });
    ExtremalCluster c;
    c.theta = best->theta;
    c.closest_approach = best->best.distance;
    c.action_at_approach = best->best.action;
    const int lo = fam.front().index - 3;
    const int hi = fam.back().index + 3;
    for (int j = lo; j <= hi; ++j)
      if (grid[(j % n_theta + n_theta) % n_theta].distance < tol) ++c.members;
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.theta < b.theta; });
  return out;
}

PathRecord shoot_1d(const HamiltonianSystem& sys, const UnstableManifoldChart& chart, int direction,
                    const std::vector<StopCondition>& stops, const ShootingSettings& settings) {
  if (sys.dim() != 1) throw SolverError(ErrorCode::InvalidArgument, "shoot_1d needs a one-dimensional system");
  if (direction != 1 && direction != -1) throw SolverError(ErrorCode::InvalidArgument, "direction must be +1 or -1");
  const ExtendedState start =
      project_to_zero_energy(sys, initial_condition(chart, Eigen::VectorXd::Constant(1, direction * settings.radius)));
  std::vector<StopCondition> all = stops;
  all.push_back(StopCondition::escape(chart.fixed_point, settings.escape_radius));
  all.push_back(StopCondition::max_time(settings.max_time));
  all.push_back(StopCondition::momentum_cap(settings.momentum_cap));
  IntegratorOptions opt = settings.integrator;
  const double scale = chart.momentum_map.norm();
  if (scale > 0.0 && std::isfinite(scale)) opt.momentum_scale = scale;
  return integrate(sys, start, all, opt);
}

PathRecord shoot_to_saddle_1d(const HamiltonianSystem& sys, const UnstableManifoldChart& chart, double saddle,
                              const ShootingSettings& settings) {
  const double start = chart.fixed_point[0];
  if (saddle == start) throw SolverError(ErrorCode::InvalidArgument, "saddle coincides with the launch point");
  const int direction = saddle > start ? 1 : -1;
  std::vector<StopCondition> stops{
      StopCondition::proximity(Eigen::VectorXd::Constant(1, saddle), settings.proximity_radius, "saddle"),
      StopCondition::boundary_crossing([saddle](const Eigen::VectorXd& x) { return x[0] - saddle; }, "saddle")};
  return shoot_1d(sys, chart, direction, stops, settings);
}

}  // namespace lightjump
