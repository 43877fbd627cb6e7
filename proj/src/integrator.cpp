#include "lightjump/integrator.hpp"

#include "lightjump/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

namespace lightjump {

StopCondition StopCondition::boundary_crossing(BoundaryFn b, std::string label) {
  StopCondition s;
  s.kind = Kind::BoundaryCrossing;
  s.boundary = std::move(b);
  s.label = std::move(label);
  return s;
}

StopCondition StopCondition::proximity(Eigen::VectorXd target, double radius, std::string label) {
  StopCondition s;
  s.kind = Kind::Proximity;
  s.target = std::move(target);
  s.radius = radius;
  s.label = std::move(label);
  return s;
}

StopCondition StopCondition::escape(Eigen::VectorXd center, double radius) {
  StopCondition s;
  s.kind = Kind::Escape;
  s.target = std::move(center);
  s.radius = radius;
  s.label = "escape";
  return s;
}

StopCondition StopCondition::max_time(double t) {
  StopCondition s;
  s.kind = Kind::MaxTime;
  s.limit = t;
  s.label = "max-time";
  return s;
}

StopCondition StopCondition::action_cap(double w) {
  StopCondition s;
  s.kind = Kind::ActionCap;
  s.limit = w;
  s.label = "action-cap";
  return s;
}

StopCondition StopCondition::momentum_cap(double p) {
  StopCondition s;
  s.kind = Kind::MomentumCap;
  s.limit = p;
  s.label = "momentum-cap";
  return s;
}

std::string_view to_string(StopCondition::Kind kind) noexcept {
  switch (kind) {
    case StopCondition::Kind::BoundaryCrossing: return "boundary";
    case StopCondition::Kind::Proximity: return "proximity";
    case StopCondition::Kind::Escape: return "escape";
    case StopCondition::Kind::MaxTime: return "max-time";
    case StopCondition::Kind::ActionCap: return "action-cap";
    case StopCondition::Kind::MomentumCap: return "momentum-cap";
  }
  return "unknown";
}

namespace {

using Vec = Eigen::VectorXd;

// Dormand-Prince 5(4) tableau and Hairer's 4th-order dense output weights.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::array<Vec, 5> r;

  [[nodiscard]] Vec at(double theta) const {
    const double th1 = 1.0 - theta;
    return r[0] + theta * (r[1] + th1 * (r[2] + theta * (r[3] + th1 * r[4])));
  }
};

struct Stepper {
  const OdeRhs& rhs;
  Vec atol;
  double rtol;
  double dir;

  // PI controller state
  double err_old = 1e-4;
  static constexpr double kBeta = 0.04;
  static constexpr double kSafety = 0.9;

  struct Trial {
    Vec y1, k7;
    double monitor = 0.0;
    double err = 0.0;
    DenseStep dense;
  };

  // Throws whatever rhs throws.
  Trial attempt(double t, const Vec& y, const Vec& k1, double h) const {
    double m = 0.0;
    const Vec k2 = rhs(t + c2 * h, y + h * a21 * k1, m);
    const Vec k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2), m);
    const Vec k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3), m);
    const Vec k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), m);
    const Vec ys = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    const Vec k6 = rhs(t + h, ys, m);
    Trial tr;
    tr.y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    tr.k7 = rhs(t + h, tr.y1, tr.monitor);
    const Vec errv = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * tr.k7);
    const Vec sk = atol.array() + rtol * y.cwiseAbs().cwiseMax(tr.y1.cwiseAbs()).array();
    tr.err = std::sqrt((errv.array() / sk.array()).square().mean());
    if (!std::isfinite(tr.err) || !tr.y1.allFinite()) tr.err = std::numeric_limits<double>::infinity();

    const Vec ydiff = tr.y1 - y;
    const Vec bspl = h * k1 - ydiff;
    tr.dense.t0 = t;
    tr.dense.h = h;
    tr.dense.r[0] = y;
    tr.dense.r[1] = ydiff;
    tr.dense.r[2] = bspl;
    tr.dense.r[3] = ydiff - h * tr.k7 - bspl;
    tr.dense.r[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * tr.k7);
    return tr;
  }

  // Returns the next step magnitude factor given an error; updates controller memory on acceptance.
  double factor(double err, bool accepted) {
    if (!std::isfinite(err)) return 0.25;
    const double expo = 0.2 - kBeta * 0.75;
    double fac = std::pow(std::max(err, 1e-10), expo);
    if (accepted) fac /= std::pow(err_old, kBeta);
    fac = std::clamp(fac / kSafety, 0.1, 5.0);
    if (accepted) err_old = std::max(err, 1e-4);
    return 1.0 / fac;
  }
};

struct Layout {
  int d;
  [[nodiscard]] Vec pack(const ExtendedState& s) const {
    Vec y(2 * d + 1);
    y.head(d) = s.x;
    y.segment(d, d) = s.p;
    y[2 * d] = s.w;
    return y;
  }
  [[nodiscard]] ExtendedState unpack(double t, const Vec& y) const {
    return ExtendedState{t, y.head(d), y.segment(d, d), y[2 * d]};
  }
};

double event_value(const StopCondition& s, double sign, const ExtendedState& st) {
  switch (s.kind) {
    case StopCondition::Kind::BoundaryCrossing: return sign * s.boundary(st.x);
    case StopCondition::Kind::Proximity: return s.radius - (st.x - s.target).norm();
    case StopCondition::Kind::Escape: return (st.x - s.target).norm() - s.radius;
    case StopCondition::Kind::ActionCap: return st.w - s.limit;
    case StopCondition::Kind::MomentumCap: return st.p.cwiseAbs().maxCoeff() - s.limit;
    case StopCondition::Kind::MaxTime: return -1.0;
  }
  return -1.0;
}

void validate_stops(const std::vector<StopCondition>& stops, int dim) {
  if (stops.empty()) throw SolverError(ErrorCode::InvalidArgument, "integration needs at least one stop condition");
  bool terminal = false;
  for (const auto& s : stops) {
    switch (s.kind) {
      case StopCondition::Kind::BoundaryCrossing:
        if (!s.boundary) throw SolverError(ErrorCode::InvalidArgument, "boundary stop without a function");
        break;
      case StopCondition::Kind::Proximity:
      case StopCondition::Kind::Escape:
        if (s.target.size() != dim || !(s.radius > 0.0))
          throw SolverError(ErrorCode::InvalidArgument, "proximity and escape stops need a point of model dimension and radius > 0");
        break;
      default:
        if (std::isfinite(s.limit)) terminal = true;
        break;
    }
  }
  if (!terminal)
    throw SolverError(ErrorCode::InvalidArgument, "stop list needs a finite max-time, action-cap or momentum-cap");
}

struct RunSetup {
  const HamiltonianSystem& sys;
  bool deterministic;
};

PathRecord integrate_once(const RunSetup& setup, const ExtendedState& start, const std::vector<StopCondition>& stops,
                          const IntegratorOptions& opt) {
  const HamiltonianSystem& sys = setup.sys;
  const int d = sys.dim();
  const Layout layout{d};
  const double dir = opt.backward ? -1.0 : 1.0;

  OdeRhs rhs;
  if (setup.deterministic) {
    rhs = [&sys, d](double, const Vec& y, double& monitor) {
      Vec dy = Vec::Zero(2 * d + 1);
      dy.head(d) = sys.model().f(y.head(d));
      monitor = 0.0;
      return dy;
    };
  } else {
    rhs = [&sys, d](double, const Vec& y, double& monitor) {
      // A blown-up trial stage is rejected through a non-finite error estimate.
      if (!y.allFinite()) {
        monitor = std::numeric_limits<double>::quiet_NaN();
        return Vec(Vec::Constant(2 * d + 1, std::numeric_limits<double>::quiet_NaN()));
      }
      const PhaseEvaluation ev = evaluate_phase(sys, y.head(d), y.segment(d, d));
      Vec dy(2 * d + 1);
      dy.head(d) = ev.velocity.dx;
      dy.segment(d, d) = ev.velocity.dp;
      dy[2 * d] = ev.action_rate;
      monitor = ev.hamiltonian;
      return dy;
    };
  }

  Vec atol = Vec::Constant(2 * d + 1, opt.tol.atol);
  atol.segment(d, d + 1) *= opt.momentum_scale;
  Stepper stepper{rhs, atol, opt.tol.rtol, dir};

  double max_elapsed = std::numeric_limits<double>::infinity();
  for (const auto& s : stops)
    if (s.kind == StopCondition::Kind::MaxTime) max_elapsed = std::min(max_elapsed, s.limit);
  const double t_end = start.t + dir * max_elapsed;

  PathRecord rec;
  Vec y = layout.pack(start);
  double t = start.t;
  double monitor = 0.0;
  Vec k1 = rhs(t, y, monitor);
  rec.samples.push_back(start);
  rec.hamiltonian.push_back(monitor);
  rec.h_drift = std::abs(monitor);
  rec.exit_state = start;

  // Boundary functions fire on a sign change relative to the start.
  std::vector<double> signs(stops.size(), 1.0);
  std::vector<bool> armed(stops.size(), true);
  for (std::size_t i = 0; i < stops.size(); ++i) {
    if (stops[i].kind == StopCondition::Kind::BoundaryCrossing) {
      const double b0 = stops[i].boundary(start.x);
      signs[i] = b0 > 0.0 ? -1.0 : 1.0;
      armed[i] = b0 != 0.0;
    } else if (stops[i].kind != StopCondition::Kind::MaxTime && event_value(stops[i], 1.0, start) >= 0.0) {
      rec.termination = stops[i].kind;
      rec.termination_label = stops[i].label;
      return rec;
    }
  }

  double h = dir * std::min(opt.initial_step, max_elapsed);
  for (long step = 0;; ++step) {
    if (step >= opt.max_steps)
      throw SolverError(ErrorCode::StepUnderflow, "step budget exhausted before any stop condition");
    if (dir * (t + h - t_end) > 0.0) h = t_end - t;
    const bool reaches_end = dir * (t + h - t_end) >= 0.0;

    Stepper::Trial tr;
    try {
      tr = stepper.attempt(t, y, k1, h);
    } catch (const SolverError& e) {
      if (e.code() != ErrorCode::QuadratureOverflow) throw;
      tr.err = std::numeric_limits<double>::infinity();
      if (std::abs(h) < 1e-6 * std::max(1.0, std::abs(t))) {
        rec.termination = StopCondition::Kind::MomentumCap;
        rec.termination_label = "quadrature-overflow";
        return rec;
      }
    }

    if (!(tr.err <= 1.0)) {
      ++rec.rejected_steps;
      // Non-finite trial states at a vanishing step mean a finite-time blow-up.
      if (!std::isfinite(tr.err) && std::abs(h) < 1e-6 * std::max(1.0, std::abs(t))) {
        rec.termination = StopCondition::Kind::MomentumCap;
        rec.termination_label = "blow-up";
        return rec;
      }
      h *= stepper.factor(tr.err, false);
      if (std::abs(h) < opt.min_step)
        throw SolverError(ErrorCode::StepUnderflow, "step size fell below " + std::to_string(opt.min_step));
      continue;
    }
    ++rec.steps;

    // Earliest event inside this step.
    std::optional<std::pair<double, std::size_t>> hit;
    for (std::size_t i = 0; i < stops.size(); ++i) {
      const auto& s = stops[i];
      if (s.kind == StopCondition::Kind::MaxTime) continue;
      const ExtendedState end_state = layout.unpack(t + h, tr.y1);
      if (s.kind == StopCondition::Kind::BoundaryCrossing && !armed[i]) {
        const double b = s.boundary(end_state.x);
        if (b != 0.0) {
          signs[i] = b > 0.0 ? -1.0 : 1.0;
          armed[i] = true;
        }
        continue;
      }
      if (event_value(s, signs[i], end_state) < 0.0) continue;
      auto value_at = [&](double theta) {
        return event_value(s, signs[i], layout.unpack(t + theta * h, tr.dense.at(theta)));
      };
      double lo = 0.0;
      double hi = 1.0;
      double vhi = event_value(s, signs[i], end_state);
      const double tol_v = s.kind == StopCondition::Kind::BoundaryCrossing ? 1e-10 : 1e-12 * std::max(1.0, std::abs(s.limit) + s.radius);
      for (int it = 0; it < 200 && std::abs(vhi) > tol_v && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double vm = value_at(mid);
        if (vm >= 0.0) {
          hi = mid;
          vhi = vm;
        } else {
          lo = mid;
        }
      }
      if (!hit || hi < hit->first) hit = std::make_pair(hi, i);
    }

    if (hit) {
      const double theta = hit->first;
      const Vec ye = theta == 1.0 ? tr.y1 : tr.dense.at(theta);
      const double te = theta == 1.0 ? t + h : t + theta * h;
      double he = tr.monitor;
      if (theta != 1.0) rhs(te, ye, he);
      ExtendedState es = layout.unpack(te, ye);
      rec.samples.push_back(es);
      rec.hamiltonian.push_back(he);
      rec.h_drift = std::max(rec.h_drift, std::abs(he));
      rec.exit_state = es;
      rec.termination = stops[hit->second].kind;
      rec.termination_label = stops[hit->second].label;
      return rec;
    }

    t = reaches_end ? t_end : t + h;
    y = tr.y1;
    k1 = tr.k7;
    rec.samples.push_back(layout.unpack(t, y));
    rec.hamiltonian.push_back(tr.monitor);
    rec.h_drift = std::max(rec.h_drift, std::abs(tr.monitor));
    rec.exit_state = rec.samples.back();
    if (reaches_end) {
      rec.termination = StopCondition::Kind::MaxTime;
      rec.termination_label = "max-time";
      return rec;
    }
    h *= stepper.factor(tr.err, true);
  }
}

PathRecord integrate_with_retries(const RunSetup& setup, const ExtendedState& start,
                                  const std::vector<StopCondition>& stops, const IntegratorOptions& options) {
  const int d = setup.sys.dim();
  if (start.x.size() != d || start.p.size() != d || !start.x.allFinite() || !start.p.allFinite() ||
      !std::isfinite(start.w) || !std::isfinite(start.t))
    throw SolverError(ErrorCode::InvalidArgument, "start state must be finite and match the system dimension");
  validate_stops(stops, d);

  IntegratorOptions opt = options;
  for (int attempt = 0;; ++attempt) {
    PathRecord rec = integrate_once(setup, start, stops, opt);
    // Runaway paths are reported as they ended; tightening cannot bring them back.
    if (rec.h_drift <= opt.conservation_tol || rec.termination == StopCondition::Kind::MomentumCap ||
        rec.termination == StopCondition::Kind::Escape)
      return rec;
    if (attempt >= options.conservation_retries)
      throw SolverError(ErrorCode::RejectedConservation,
                        "max |H| = " + std::to_string(rec.h_drift) + " exceeds " + std::to_string(opt.conservation_tol));
    opt.tol.rtol /= 10.0;
    opt.tol.atol /= 10.0;
  }
}

}  // namespace

PathRecord integrate(const HamiltonianSystem& sys, const ExtendedState& start, const std::vector<StopCondition>& stops,
                     const IntegratorOptions& options) {
  return integrate_with_retries({sys, false}, start, stops, options);
}

PathRecord continue_deterministic(const HamiltonianSystem& sys, const ExtendedState& from,
                                  const std::vector<StopCondition>& stops, const IntegratorOptions& options) {
  if (from.p.size() != sys.dim() || from.p.cwiseAbs().maxCoeff() != 0.0)
    throw SolverError(ErrorCode::InvalidArgument, "deterministic continuation requires zero momentum");
  return integrate_with_retries({sys, true}, from, stops, options);
}

OdeSolution solve_ode(const OdeRhs& rhs, double t0, const Eigen::VectorXd& y0, double t1, const Tolerances& tol) {
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  Stepper stepper{rhs, Vec::Constant(y0.size(), tol.atol), tol.rtol, dir};
  OdeSolution sol;
  double t = t0;
  Vec y = y0;
  double m = 0.0;
  Vec k1 = rhs(t, y, m);
  sol.t.push_back(t);
  sol.y.push_back(y);
  double h = dir * std::min(1e-3, std::abs(t1 - t0));
  while (dir * (t1 - t) > 0.0) {
    if (dir * (t + h - t1) > 0.0) h = t1 - t;
    const auto tr = stepper.attempt(t, y, k1, h);
    if (!(tr.err <= 1.0)) {
      h *= stepper.factor(tr.err, false);
      if (std::abs(h) < 1e-14) throw SolverError(ErrorCode::StepUnderflow, "solve_ode step underflow");
      continue;
    }
    t = (dir * (t + h - t1) >= 0.0) ? t1 : t + h;
    y = tr.y1;
    k1 = tr.k7;
    sol.t.push_back(t);
    sol.y.push_back(y);
    h *= stepper.factor(tr.err, true);
  }
  return sol;
}

}  // namespace lightjump
