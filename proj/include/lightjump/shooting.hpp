#pragma once

#include "lightjump/integrator.hpp"
#include "lightjump/linearization.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace lightjump {

/// Where a basin ends: a scalar function negative inside the basin plus the
/// saddle points lying on it (reaching one of those within the proximity
/// radius also counts as exiting).
struct BasinBoundary {
  std::string description;
  BoundaryFn function;
  std::vector<Eigen::VectorXd> exit_points;
};

/// The separatrix x1 = 0 of the Maier-Stein system seen from SN1, with US(0,0) on it.
BasinBoundary maier_stein_left_basin_boundary();

struct ShootingSettings {
  double radius = 1e-3;             ///< launch offset from the fixed point (delta or r)
  double proximity_radius = 1e-4;   ///< capture radius around saddle targets
  double max_time = 1e4;
  double momentum_cap = 50.0;
  double escape_radius = 1e3;       ///< distance from the stable point that ends a runaway path
  /// Tenfold tighter than the integrator defaults: with rtol 1e-9 the energy drift
  /// (~1e-10) is enough to turn saddle-bound paths back before the capture ball.
  IntegratorOptions integrator{.tol = {1e-10, 1e-12}};
};

/// Everything needed to launch a trajectory from the unstable-manifold chart at angle theta.
class Shooter {
 public:
  Shooter(HamiltonianSystem sys, BasinBoundary boundary, ShootingSettings settings, Eigen::VectorXd stable_point);

  [[nodiscard]] const HamiltonianSystem& system() const noexcept { return sys_; }
  [[nodiscard]] const UnstableManifoldChart& chart() const noexcept { return chart_; }
  [[nodiscard]] const BasinBoundary& boundary() const noexcept { return boundary_; }
  [[nodiscard]] const ShootingSettings& settings() const noexcept { return settings_; }

  [[nodiscard]] ExtendedState launch_state(double theta) const;
  [[nodiscard]] PathRecord shoot(double theta) const;
  /// Same launch, stopping at the boundary or within `capture` of `target`.
  [[nodiscard]] PathRecord shoot_toward(double theta, const Eigen::VectorXd& target, double capture) const;

  /// A copy with a different launch radius (used for radius-convergence checks).
  [[nodiscard]] Shooter with_radius(double r) const;

 private:
  [[nodiscard]] std::vector<StopCondition> stops() const;
  [[nodiscard]] IntegratorOptions integrator_options() const;

  HamiltonianSystem sys_;
  BasinBoundary boundary_;
  ShootingSettings settings_;
  UnstableManifoldChart chart_;
};

/// True when the termination counts as leaving the basin.
bool is_exit(const PathRecord& rec);

struct ActionPlotEntry {
  double theta = 0.0;
  double action = 0.0;            ///< W at the exit event (or at the last state for non-exits)
  ExtendedState exit_state;
  std::string termination;        ///< stop label, or "failed:<error>" for per-theta failures
  bool exited = false;
};

struct ActionPlot {
  std::vector<ActionPlotEntry> entries;   ///< sorted by theta
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  bool periodic = true;                   ///< grid spans the full circle
  std::string model;
  std::vector<JumpSpec> specs;
  double radius = 0.0;
  std::string boundary;
};

/// Uniform theta grid; full circle [0, 2 pi) by default, otherwise the closed range [lo, hi].
ActionPlot action_plot(const Shooter& shooter, int n_theta, int threads = 1);
ActionPlot action_plot(const Shooter& shooter, int n_theta, double theta_lo, double theta_hi, int threads = 1);

struct ExtremalPath {
  double theta = 0.0;
  double action = 0.0;
  bool most_probable = false;
  PathRecord path;
};

/// Discrete local minima of the plot, each refined by golden-section search over
/// theta (one integration per probe) down to `refine_tol` radians. Every minimum
/// whose action ties the global one (relative 1e-7) is tagged most probable.
/// Non-exiting neighbours count as +infinity, so an isolated exit is a minimum;
/// one lying on the reflection axis of a symmetric model is kept unrefined.
/// Throws NoExitFound if no entry crossed the boundary.
std::vector<ExtremalPath> find_minima(const Shooter& shooter, const ActionPlot& plot, double refine_tol = 1e-6,
                                      int threads = 1);

struct ExtremalCluster {
  double theta = 0.0;
  double closest_approach = 0.0;
  double action_at_approach = 0.0;
  int members = 0;   ///< grid angles that fell within tolerance before refinement
};

/// Launch angles whose paths pass within `tol` of `target` (ignoring the part of
/// the path inside 2r of the fixed point), one representative per family.
/// Grid angles within three steps of each other form one family; each family's
/// closest approach is refined by golden-section search over theta.
std::vector<ExtremalCluster> extremals_to_point(const Shooter& shooter, int n_theta, const Eigen::VectorXd& target,
                                                double tol, int threads = 1);

/// 1D launch from x_bar + direction * delta with p0 = M delta.
PathRecord shoot_1d(const HamiltonianSystem& sys, const UnstableManifoldChart& chart, int direction,
                    const std::vector<StopCondition>& stops, const ShootingSettings& settings = {});

/// shoot_1d toward an adjacent unstable point: stops on entering its proximity
/// ball or on crossing it, both labelled "saddle".
PathRecord shoot_to_saddle_1d(const HamiltonianSystem& sys, const UnstableManifoldChart& chart, double saddle,
                              const ShootingSettings& settings = {});

/// Runs `body(i)` for i in [0, n) on up to `threads` worker threads.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

}  // namespace lightjump
