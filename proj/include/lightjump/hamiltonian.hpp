#pragma once

#include "lightjump/jump_measure.hpp"
#include "lightjump/models.hpp"

#include <Eigen/Core>

#include <memory>
#include <vector>

namespace lightjump {

/// A drift model paired with one independent jump measure per axis. Moments
/// are served from a per-axis MomentTable built once at construction and
/// shared between copies.
class HamiltonianSystem {
 public:
  HamiltonianSystem(VectorFieldModel model, std::vector<JumpSpec> specs);

  [[nodiscard]] const VectorFieldModel& model() const noexcept { return model_; }
  [[nodiscard]] const std::vector<JumpSpec>& specs() const noexcept { return specs_; }
  [[nodiscard]] int dim() const noexcept { return model_.dim; }
  [[nodiscard]] double axis_mass(int axis) const { return (*tables_)[axis].mass(); }
  [[nodiscard]] MomentSet axis_moments(int axis, double p) const { return (*tables_)[axis](p); }
  /// Product of the masses of every axis except `axis`.
  [[nodiscard]] double mass_of_others(int axis) const;

 private:
  VectorFieldModel model_;
  std::vector<JumpSpec> specs_;
  std::shared_ptr<const std::vector<MomentTable>> tables_;
};

/// A point (t, x, p, W) of the augmented phase space.
struct ExtendedState {
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd p;
  double w = 0.0;
};

struct PhaseVelocity {
  Eigen::VectorXd dx;
  Eigen::VectorXd dp;
};

/// Everything the integrator needs at one phase point, sharing one set of moment quadratures.
struct PhaseEvaluation {
  PhaseVelocity velocity;
  double hamiltonian = 0.0;
  double action_rate = 0.0;
};

PhaseEvaluation evaluate_phase(const HamiltonianSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& p);

/// H(x, p) = f(x).p + prod_i M0_i(p_i) - prod_i mass_i, the product difference
/// accumulated from the per-axis increments so that H(x, 0) is exactly zero.
double hamiltonian_value(const HamiltonianSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& p);

/// (dH/dp, -dH/dx).
PhaseVelocity phase_velocity(const HamiltonianSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& p);

/// dW/dt = xdot . p.
double action_rate(const HamiltonianSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& p);

}  // namespace lightjump
