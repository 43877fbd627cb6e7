#pragma once

#include <Eigen/Core>

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace lightjump {

enum class Stability { Stable, Unstable, Saddle };

std::string_view to_string(Stability s) noexcept;

struct FixedPoint {
  Eigen::VectorXd location;
  Stability stability = Stability::Stable;
  Eigen::VectorXcd eigenvalues;
  double residual = 0.0;  ///< |f| at the location
};

using DriftFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Deterministic part of the dynamics: drift, its Jacobian and the known fixed points.
struct VectorFieldModel {
  std::string name;
  int dim = 1;
  DriftFn drift;
  JacobianFn jacobian;
  std::vector<FixedPoint> fixed_points;
  /// Analytic fixed-point candidates for dim > 1 (polished and classified by find_fixed_points).
  std::vector<Eigen::VectorXd> candidates;
  /// True when the field is invariant under x2 -> -x2 (f1 even, f2 odd in x2).
  bool x2_reflection_symmetric = false;

  [[nodiscard]] Eigen::VectorXd f(const Eigen::VectorXd& x) const { return drift(x); }
  [[nodiscard]] Eigen::MatrixXd jac(const Eigen::VectorXd& x) const { return jacobian(x); }
};

// ---------------------------------------------------------------------------
// Energy balance climate model: dT = -U'(T) dt + noise.

struct EnergyBalanceParams {
  double Ch = 46.8;       ///< heat capacity
  double S0 = 1368.0;     ///< solar constant
  double theta = 5.67e-8; ///< Stefan constant
  double gamma = 0.61;    ///< greenhouse factor in [0, 1]

  void validate() const;
};

double energy_balance_drift(const EnergyBalanceParams& params, double T);
double energy_balance_drift_derivative(const EnergyBalanceParams& params, double T);
double energy_balance_potential(const EnergyBalanceParams& params, double T);

// ---------------------------------------------------------------------------
// Maier-Stein double well.

struct MaierSteinParams {
  double gamma = 1.0;

  void validate() const;
};

Eigen::Vector2d maier_stein_drift(const MaierSteinParams& params, const Eigen::Vector2d& x);
Eigen::Matrix2d maier_stein_jacobian(const MaierSteinParams& params, const Eigen::Vector2d& x);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Root scan for 1D models (uniform bracket scan + bisection/Newton polish);
/// dim > 1 models polish and classify their analytic candidates inside the box.
/// Throws NoRootFound when nothing is found.
std::vector<FixedPoint> find_fixed_points(const VectorFieldModel& model, const std::vector<Interval>& search_box,
                                          double scan_step = 0.1);

/// Classification from Jacobian eigenvalue real parts.
FixedPoint classify_fixed_point(const VectorFieldModel& model, const Eigen::VectorXd& x);

/// Temperature window bracketing every physically meaningful root of the climate model.
inline constexpr Interval kClimateScanBox{200.0, 320.0};

VectorFieldModel make_energy_balance_model(const EnergyBalanceParams& params);
VectorFieldModel make_maier_stein_model(const MaierSteinParams& params);

/// Built-in models by name ("energy_balance", "maier_stein"); parameters not listed keep their defaults.
/// Unknown names or parameters throw ConfigInvalid.
VectorFieldModel make_model(const std::string& name, const std::map<std::string, double>& params);

/// Default parameter sets, keyed by model name.
std::map<std::string, double> default_model_params(const std::string& name);

}  // namespace lightjump
