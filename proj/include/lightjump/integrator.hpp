#pragma once

#include "lightjump/hamiltonian.hpp"

#include <Eigen/Core>

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace lightjump {

using BoundaryFn = std::function<double(const Eigen::VectorXd&)>;

/// One way for an integration to end. At least one finite terminal condition
/// (max-time, action-cap or momentum-cap) must be present in a stop list.
struct StopCondition {
  enum class Kind { BoundaryCrossing, Proximity, Escape, MaxTime, ActionCap, MomentumCap };

  Kind kind = Kind::MaxTime;
  BoundaryFn boundary;      ///< BoundaryCrossing: fires on a sign change of boundary(x)
  Eigen::VectorXd target;   ///< Proximity: fires when |x - target| <= radius; Escape: when >= radius
  double radius = 0.0;
  double limit = 0.0;       ///< MaxTime / ActionCap / MomentumCap threshold
  std::string label;

  static StopCondition boundary_crossing(BoundaryFn b, std::string label = "boundary");
  static StopCondition proximity(Eigen::VectorXd target, double radius, std::string label = "proximity");
  static StopCondition escape(Eigen::VectorXd center, double radius);
  static StopCondition max_time(double t);
  static StopCondition action_cap(double w);
  static StopCondition momentum_cap(double p);
};

std::string_view to_string(StopCondition::Kind kind) noexcept;

struct Tolerances {
  double rtol = 1e-9;
  double atol = 1e-11;
};

struct IntegratorOptions {
  Tolerances tol;
  double conservation_tol = 1e-6;
  int conservation_retries = 2;
  /// Multiplies atol on the momentum and action components; callers launching
  /// from a chart pass |M| so that small momenta keep relative accuracy.
  double momentum_scale = 1.0;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  long max_steps = 2'000'000;
  bool backward = false;
};

/// A time-sampled trajectory of the augmented system.
struct PathRecord {
  std::vector<ExtendedState> samples;
  std::vector<double> hamiltonian;  ///< H at each sample
  StopCondition::Kind termination = StopCondition::Kind::MaxTime;
  std::string termination_label;
  ExtendedState exit_state;
  double h_drift = 0.0;             ///< max |H| over the samples
  long steps = 0;
  long rejected_steps = 0;

  [[nodiscard]] bool crossed_boundary() const noexcept {
    return termination == StopCondition::Kind::BoundaryCrossing;
  }
};

/// Dormand-Prince 5(4) integration of (x, p, W) with PI step control, event
/// location on the dense interpolant, and |H| monitoring. When |H| exceeds
/// conservation_tol the run is repeated with tenfold tighter tolerances up to
/// `conservation_retries` times before RejectedConservation is thrown.
/// Throws StepUnderflow when the step falls below min_step.
PathRecord integrate(const HamiltonianSystem& sys, const ExtendedState& start, const std::vector<StopCondition>& stops,
                     const IntegratorOptions& options = {});

/// Follows xdot = f(x) with p held at zero and W frozen. `from.p` must be zero.
PathRecord continue_deterministic(const HamiltonianSystem& sys, const ExtendedState& from,
                                  const std::vector<StopCondition>& stops, const IntegratorOptions& options = {});

/// Generic right-hand side used by the stepping core: returns dy/dt and a monitored scalar.
using OdeRhs = std::function<Eigen::VectorXd(double t, const Eigen::VectorXd& y, double& monitor)>;

struct OdeSolution {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> y;
};

/// Plain adaptive Dormand-Prince solve from t0 to t1 with no events, exposed for tests.
OdeSolution solve_ode(const OdeRhs& rhs, double t0, const Eigen::VectorXd& y0, double t1, const Tolerances& tol);

}  // namespace lightjump
