#include "lightjump/linearization.hpp"

#include "lightjump/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <vector>

namespace lightjump {

Eigen::MatrixXd second_moment_matrix(const HamiltonianSystem& sys) {
  const int d = sys.dim();
  std::vector<MomentSet> at_zero;
  for (const auto& s : sys.specs()) at_zero.push_back(moments(s, 0.0));
  Eigen::MatrixXd dm(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double v = 1.0;
      for (int k = 0; k < d; ++k) {
        if (i == j && k == i) v *= at_zero[k].m2;
        else if (k == i || k == j) v *= at_zero[k].m1;
        else v *= at_zero[k].m0;
      }
      dm(i, j) = v;
    }
  }
  return dm;
}

Eigen::MatrixXd momentum_map_from_basis(const Eigen::MatrixXd& basis) {
  const Eigen::Index d = basis.cols();
  const Eigen::MatrixXd xs = basis.topRows(d);
  const Eigen::MatrixXd ps = basis.bottomRows(d);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(xs);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(xs);
  const auto& sv = svd.singularValues();
  if (!lu.isInvertible() || sv[sv.size() - 1] <= 1e-12 * sv[0])
    throw SolverError(ErrorCode::DegenerateEigenbasis, "coordinate block of the unstable eigenvectors is singular");
  // M X = P  <=>  X^T M^T = P^T
  return xs.transpose().fullPivLu().solve(ps.transpose()).transpose();
}

UnstableManifoldChart build_chart(const HamiltonianSystem& sys, const Eigen::VectorXd& fixed_point) {
  const int d = sys.dim();
  if (fixed_point.size() != d) throw SolverError(ErrorCode::InvalidArgument, "fixed point dimension mismatch");

  UnstableManifoldChart chart;
  chart.fixed_point = fixed_point;
  chart.drift_jacobian = sys.model().jac(fixed_point);
  Eigen::EigenSolver<Eigen::MatrixXd> cs(chart.drift_jacobian, false);
  for (Eigen::Index i = 0; i < cs.eigenvalues().size(); ++i)
    if (cs.eigenvalues()[i].real() >= 0.0)
      throw SolverError(ErrorCode::NotAStablePoint, "drift Jacobian has an eigenvalue with nonnegative real part");

  chart.second_moments = second_moment_matrix(sys);
  chart.phase_jacobian = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  chart.phase_jacobian.topLeftCorner(d, d) = chart.drift_jacobian;
  chart.phase_jacobian.topRightCorner(d, d) = chart.second_moments;
  chart.phase_jacobian.bottomRightCorner(d, d) = -chart.drift_jacobian.transpose();

  Eigen::EigenSolver<Eigen::MatrixXd> es(chart.phase_jacobian);
  chart.phase_eigenvalues = es.eigenvalues();
  const Eigen::MatrixXcd vecs = es.eigenvectors();

  Eigen::MatrixXd basis(2 * d, d);
  int filled = 0;
  for (Eigen::Index i = 0; i < chart.phase_eigenvalues.size() && filled < d; ++i) {
    const auto mu = chart.phase_eigenvalues[i];
    if (mu.real() <= 0.0) continue;
    if (mu.imag() > 0.0 && filled + 1 < d) {
      basis.col(filled++) = vecs.col(i).real();
      basis.col(filled++) = vecs.col(i).imag();
    } else if (mu.imag() == 0.0) {
      basis.col(filled++) = vecs.col(i).real();
    }
  }
  if (filled != d)
    throw SolverError(ErrorCode::DegenerateEigenbasis, "phase Jacobian lacks a full unstable subspace");
  chart.momentum_map = momentum_map_from_basis(basis);
  return chart;
}

ExtendedState initial_condition(const UnstableManifoldChart& chart, const Eigen::VectorXd& offset) {
  if (offset.size() != chart.dim()) throw SolverError(ErrorCode::InvalidArgument, "offset dimension mismatch");
  ExtendedState s;
  s.t = 0.0;
  s.x = chart.fixed_point + offset;
  s.p = chart.momentum_map * offset;
  s.w = 0.5 * offset.dot(chart.momentum_map * offset);
  return s;
}

}  // namespace lightjump

namespace lightjump {

ExtendedState project_to_zero_energy(const HamiltonianSystem& sys, const ExtendedState& state) {
  if (state.p.cwiseAbs().maxCoeff() == 0.0) return state;
  auto h = [&](double s) { return hamiltonian_value(sys, state.x, s * state.p); };
  double lo = 0.5;
  double hi = 1.5;
  double hlo = h(lo);
  double hhi = h(hi);
  if (!(hlo < 0.0 && hhi > 0.0)) return state;
  for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
    double s = (lo * hhi - hi * hlo) / (hhi - hlo);
    if (!(s > lo && s < hi) || it % 3 == 2) s = 0.5 * (lo + hi);
    const double hs = h(s);
    if (hs == 0.0) {
      lo = hi = s;
      break;
    }
    if (hs < 0.0) {
      lo = s;
      hlo = hs;
    } else {
      hi = s;
      hhi = hs;
    }
  }
  ExtendedState out = state;
  const double s = std::abs(hlo) < std::abs(hhi) ? lo : hi;
  out.p *= s;
  return out;
}

}  // namespace lightjump
