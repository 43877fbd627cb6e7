#include "lightjump/models.hpp"

#include "lightjump/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace lightjump {

std::string_view to_string(Stability s) noexcept {
  switch (s) {
    case Stability::Stable: return "stable";
    case Stability::Unstable: return "unstable";
    case Stability::Saddle: return "saddle";
  }
  return "unknown";
}

void EnergyBalanceParams::validate() const {
  if (!(Ch > 0.0 && S0 > 0.0 && theta > 0.0))
    throw SolverError(ErrorCode::InvalidArgument, "energy balance needs Ch, S0, theta > 0");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw SolverError(ErrorCode::InvalidArgument, "greenhouse factor gamma must lie in [0, 1]");
}

void MaierSteinParams::validate() const {
  if (!(gamma > 0.0)) throw SolverError(ErrorCode::InvalidArgument, "Maier-Stein gamma must be positive");
}

double energy_balance_drift(const EnergyBalanceParams& prm, double T) {
  const double absorbed = 0.25 * prm.S0 * (0.5 + 0.2 * std::tanh((T - 265.0) / 10.0));
  const double emitted = prm.gamma * prm.theta * T * T * T * T;
  return (absorbed - emitted) / prm.Ch;
}

double energy_balance_drift_derivative(const EnergyBalanceParams& prm, double T) {
  const double sech = 1.0 / std::cosh((T - 265.0) / 10.0);
  return (0.25 * prm.S0 * 0.02 * sech * sech - 4.0 * prm.gamma * prm.theta * T * T * T) / prm.Ch;
}

double energy_balance_potential(const EnergyBalanceParams& prm, double T) {
  const double albedo_term = 0.5 * T + 2.0 * std::log(std::cosh((T - 265.0) / 10.0));
  return (-0.25 * prm.S0 * albedo_term + 0.2 * prm.gamma * prm.theta * std::pow(T, 5)) / prm.Ch;
}

Eigen::Vector2d maier_stein_drift(const MaierSteinParams& prm, const Eigen::Vector2d& x) {
  const double x1 = x[0];
  const double x2 = x[1];
  return {x1 - x1 * x1 * x1 - prm.gamma * x1 * x2 * x2, -(1.0 + x1 * x1) * x2};
}

Eigen::Matrix2d maier_stein_jacobian(const MaierSteinParams& prm, const Eigen::Vector2d& x) {
  const double x1 = x[0];
  const double x2 = x[1];
  Eigen::Matrix2d j;
  j << 1.0 - 3.0 * x1 * x1 - prm.gamma * x2 * x2, -2.0 * prm.gamma * x1 * x2,
      -2.0 * x1 * x2, -(1.0 + x1 * x1);
  return j;
}

FixedPoint classify_fixed_point(const VectorFieldModel& model, const Eigen::VectorXd& x) {
  FixedPoint fp;
  fp.location = x;
  fp.residual = model.f(x).norm();
  Eigen::EigenSolver<Eigen::MatrixXd> es(model.jac(x), false);
  fp.eigenvalues = es.eigenvalues();
  int positive = 0;
  for (Eigen::Index i = 0; i < fp.eigenvalues.size(); ++i)
    if (fp.eigenvalues[i].real() >= 0.0) ++positive;
  if (positive == 0)
    fp.stability = Stability::Stable;
  else if (positive == fp.eigenvalues.size())
    fp.stability = Stability::Unstable;
  else
    fp.stability = Stability::Saddle;
  return fp;
}

namespace {

double polish_root_1d(const VectorFieldModel& model, double lo, double hi) {
  auto f = [&](double t) { return model.f(Eigen::VectorXd::Constant(1, t))[0]; };
  double flo = f(lo);
  for (int i = 0; i < 200 && hi - lo > 4e-16 * std::abs(hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  // Newton polish, kept only while it reduces the residual.
  for (int i = 0; i < 3; ++i) {
    const double d = model.jac(Eigen::VectorXd::Constant(1, x))(0, 0);
    if (d == 0.0) break;
    const double next = x - f(x) / d;
    if (std::abs(f(next)) < std::abs(f(x))) x = next;
    else break;
  }
  return x;
}

}  // namespace

std::vector<FixedPoint> find_fixed_points(const VectorFieldModel& model, const std::vector<Interval>& box,
                                          double scan_step) {
  if (static_cast<int>(box.size()) != model.dim)
    throw SolverError(ErrorCode::InvalidArgument, "search box dimension does not match model");
  std::vector<FixedPoint> out;
  if (model.dim == 1) {
    if (!(scan_step > 0.0)) throw SolverError(ErrorCode::InvalidArgument, "scan step must be positive");
    auto f = [&](double t) { return model.f(Eigen::VectorXd::Constant(1, t))[0]; };
    const auto n = static_cast<long>(std::ceil((box[0].hi - box[0].lo) / scan_step));
    double a = box[0].lo;
    double fa = f(a);
    for (long i = 1; i <= n; ++i) {
      const double b = std::min(box[0].lo + i * scan_step, box[0].hi);
      const double fb = f(b);
      if (fa == 0.0) {
        out.push_back(classify_fixed_point(model, Eigen::VectorXd::Constant(1, a)));
      } else if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
        out.push_back(classify_fixed_point(model, Eigen::VectorXd::Constant(1, polish_root_1d(model, a, b))));
      }
      a = b;
      fa = fb;
    }
    if (fa == 0.0) out.push_back(classify_fixed_point(model, Eigen::VectorXd::Constant(1, a)));
  } else {
    for (const auto& c : model.candidates) {
      bool inside = true;
      for (int d = 0; d < model.dim; ++d) inside = inside && c[d] >= box[d].lo && c[d] <= box[d].hi;
      if (!inside) continue;
      Eigen::VectorXd x = c;
      for (int i = 0; i < 20 && model.f(x).norm() > 1e-14; ++i) {
        Eigen::VectorXd step = model.jac(x).fullPivLu().solve(model.f(x));
        if (!step.allFinite()) break;
        x -= step;
      }
      out.push_back(classify_fixed_point(model, x));
    }
  }
  if (out.empty()) throw SolverError(ErrorCode::NoRootFound, "no fixed point in the search box of " + model.name);
  return out;
}

VectorFieldModel make_energy_balance_model(const EnergyBalanceParams& params) {
  params.validate();
  VectorFieldModel m;
  m.name = "energy_balance";
  m.dim = 1;
  m.drift = [params](const Eigen::VectorXd& x) {
    return Eigen::VectorXd::Constant(1, energy_balance_drift(params, x[0]));
  };
  m.jacobian = [params](const Eigen::VectorXd& x) {
    return Eigen::MatrixXd::Constant(1, 1, energy_balance_drift_derivative(params, x[0]));
  };
  try {
    m.fixed_points = find_fixed_points(m, {kClimateScanBox});
  } catch (const SolverError&) {
    m.fixed_points.clear();
  }
  return m;
}

VectorFieldModel make_maier_stein_model(const MaierSteinParams& params) {
  params.validate();
  VectorFieldModel m;
  m.name = "maier_stein";
  m.dim = 2;
  m.drift = [params](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return maier_stein_drift(params, Eigen::Vector2d(x[0], x[1]));
  };
  m.jacobian = [params](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    return maier_stein_jacobian(params, Eigen::Vector2d(x[0], x[1]));
  };
  m.candidates = {Eigen::Vector2d(-1.0, 0.0), Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 0.0)};
  m.x2_reflection_symmetric = true;
  m.fixed_points = find_fixed_points(m, {{-2.0, 2.0}, {-2.0, 2.0}});
  return m;
}

std::map<std::string, double> default_model_params(const std::string& name) {
  if (name == "energy_balance") {
    const EnergyBalanceParams p;
    return {{"Ch", p.Ch}, {"S0", p.S0}, {"theta", p.theta}, {"gamma", p.gamma}};
  }
  if (name == "maier_stein") return {{"gamma", MaierSteinParams{}.gamma}};
  throw SolverError(ErrorCode::ConfigInvalid, "unknown model '" + name + "'");
}

VectorFieldModel make_model(const std::string& name, const std::map<std::string, double>& params) {
  auto merged = default_model_params(name);
  for (const auto& [key, value] : params) {
    if (!merged.contains(key))
      throw SolverError(ErrorCode::ConfigInvalid, "unknown parameter '" + key + "' for model " + name);
    merged[key] = value;
  }
  try {
    if (name == "energy_balance")
      return make_energy_balance_model({merged["Ch"], merged["S0"], merged["theta"], merged["gamma"]});
    return make_maier_stein_model({merged["gamma"]});
  } catch (const SolverError& e) {
    if (e.code() == ErrorCode::InvalidArgument) throw SolverError(ErrorCode::ConfigInvalid, e.what());
    throw;
  }
}

}  // namespace lightjump
