#pragma once

#include "lightjump/hamiltonian.hpp"

#include <Eigen/Core>

namespace lightjump {

/// Linearization of the Hamiltonian flow at a stable fixed point.
///
/// `phase_jacobian` is the 2d x 2d block matrix [[C, D], [0, -C^T]] with C the drift
/// Jacobian and D the second-moment matrix of the jump measures. Points
/// (x_bar + dx, M dx) lie on the unstable Lagrangian manifold to first order.
struct UnstableManifoldChart {
  Eigen::VectorXd fixed_point;
  Eigen::MatrixXd drift_jacobian;        ///< C
  Eigen::MatrixXd second_moments;        ///< D
  Eigen::MatrixXd phase_jacobian;        ///< B
  Eigen::VectorXcd phase_eigenvalues;
  Eigen::MatrixXd momentum_map;          ///< M, maps dx to p

  [[nodiscard]] int dim() const noexcept { return static_cast<int>(fixed_point.size()); }
};

/// D_ij = integral of y_i y_j over the product measure; off-diagonal entries are
/// products of vanishing first moments.
Eigen::MatrixXd second_moment_matrix(const HamiltonianSystem& sys);

/// M = P X^{-1} from the real basis [X; P] of the unstable eigenspace of B.
/// Complex pairs are split into real and imaginary parts.
Eigen::MatrixXd momentum_map_from_basis(const Eigen::MatrixXd& basis);

/// Throws NotAStablePoint if C has an eigenvalue with nonnegative real part and
/// DegenerateEigenbasis if the coordinate block of the unstable eigenvectors is singular.
UnstableManifoldChart build_chart(const HamiltonianSystem& sys, const Eigen::VectorXd& fixed_point);

/// x = x_bar + dx, p = M dx, W = dx^T M dx / 2, t = 0.
ExtendedState initial_condition(const UnstableManifoldChart& chart, const Eigen::VectorXd& offset);

}  // namespace lightjump

namespace lightjump {

/// Rescales the momentum of a launch state so that H(x, s p) = 0 at the nonzero
/// root s near 1. The chart places launches on H = O(|dx|^3); removing that residual
/// lets trajectories reach saddle points instead of missing them by O(sqrt|H|).
/// Leaves the state unchanged when p = 0 or no root is bracketed in [0.5, 1.5].
ExtendedState project_to_zero_energy(const HamiltonianSystem& sys, const ExtendedState& state);

}  // namespace lightjump
