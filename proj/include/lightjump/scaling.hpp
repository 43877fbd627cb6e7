#pragma once

#include "lightjump/models.hpp"
#include "lightjump/shooting.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace lightjump {

struct ScalingRow {
  double alpha = 0.0;
  double lambda = 0.0;
  double w = 0.0;            ///< well depth; NaN when the row failed
  std::string failure;       ///< empty on success
  [[nodiscard]] bool ok() const noexcept { return failure.empty(); }
};

struct ScalingTable {
  std::string model;
  std::string method;        ///< "oracle" or "shooting"
  std::vector<ScalingRow> rows;
};

/// Well depth W for one (alpha, lambda) pair.
using WellDepthFn = std::function<double(double alpha, double lambda)>;

/// Evaluates `depth` on the alpha x lambda grid (rows ordered alpha-major, duplicates
/// dropped). Failures and non-positive values are recorded per row, never thrown.
ScalingTable sweep(const WellDepthFn& depth, const std::vector<double>& alphas, const std::vector<double>& lambdas,
                   std::string model, std::string method, int threads = 1);

struct SlopeFit {
  double alpha = 0.0;
  double slope = 0.0;        ///< phi(alpha): d ln W / d ln lambda
  double intercept = 0.0;    ///< ln C from the free regression
  double r_squared = 0.0;
  int points = 0;
};

/// OLS of ln W on ln lambda per alpha, in ascending alpha. Throws InsufficientPoints
/// when some alpha has fewer than three successful rows.
std::vector<SlopeFit> fit_slopes(const ScalingTable& table);

/// Least-squares d in phi(alpha) = d / alpha.
double fit_exponent(const std::vector<SlopeFit>& slopes);

/// C(alpha) = geometric mean over lambda of W / lambda^(d / alpha).
std::map<double, double> c_values(const ScalingTable& table, int d);

struct CAlphaConstants {
  double k1 = 0.0;
  double k2 = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
};

/// k2 - k1 exp(-s2 alpha^s1).
double c_alpha(const CAlphaConstants& c, double alpha);

struct CAlphaFit {
  CAlphaConstants constants;
  double residual_rms = 0.0;
  int converged_starts = 0;
};

struct CAlphaFitOptions {
  std::uint64_t seed = 20240607;
  int starts = 20;
  int max_iterations = 20000;
};

/// Nonlinear least squares of C(alpha) by Nelder-Mead over (ln k1, ln k2, s1, ln s2)
/// from `starts` deterministic multistarts. Needs at least five points
/// (InsufficientPoints); throws FitNotConverged when no start converges.
CAlphaFit fit_c_alpha(const std::map<double, double>& c_points, const CAlphaFitOptions& options = {});

struct ScalingFit {
  std::vector<SlopeFit> slopes;
  double exponent_fit = 0.0;   ///< fitted d
  int exponent_rule = 0;       ///< nearest integer, used for C(alpha) and predictions
  std::map<double, double> c_values;
  CAlphaFit c_fit;
  double alpha_min = 0.0;
  double alpha_max = 0.0;
};

ScalingFit fit_scaling(const ScalingTable& table, const CAlphaFitOptions& options = {});

struct Prediction {
  double value = 0.0;
  bool extrapolated = false;   ///< alpha outside the fitted range
};

Prediction predict_w(const ScalingFit& fit, double alpha, double lambda);

/// C(alpha) lambda^(d / alpha) from explicit constants.
double predict_w(const CAlphaConstants& c, int d, double alpha, double lambda);

enum class DepthMethod { Oracle, Shooting };

std::string_view to_string(DepthMethod m) noexcept;
DepthMethod depth_method_from_string(const std::string& s);

/// Cold-well depth of the energy-balance model: W at the unstable point,
/// anchored at the cold stable point, with the same jump spec on the one axis.
double climate_well_depth(const EnergyBalanceParams& params, double alpha, double lambda, DepthMethod method,
                          const ShootingSettings& settings = {});

struct SaddleActionOptions {
  int n_theta = 360;
  double refine_tol = 1e-6;
  int threads = 1;
};

/// Quasi-potential of US(0,0) seen from SN1: the smallest refined action plot
/// minimum with jump specs (lambda, alpha1) and (lambda, alpha2).
double maier_stein_saddle_action(const MaierSteinParams& params, double alpha1, double alpha2, double lambda,
                                 const ShootingSettings& settings = {}, const SaddleActionOptions& options = {});

}  // namespace lightjump
