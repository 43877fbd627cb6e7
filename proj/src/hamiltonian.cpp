#include "lightjump/hamiltonian.hpp"

#include "lightjump/error.hpp"

namespace lightjump {

HamiltonianSystem::HamiltonianSystem(VectorFieldModel model, std::vector<JumpSpec> specs)
    : model_(std::move(model)), specs_(std::move(specs)) {
  if (static_cast<int>(specs_.size()) != model_.dim)
    throw SolverError(ErrorCode::InvalidArgument, "one jump spec per model axis is required");
  std::vector<MomentTable> tables;
  tables.reserve(specs_.size());
  for (const auto& s : specs_) tables.emplace_back(s);
  tables_ = std::make_shared<const std::vector<MomentTable>>(std::move(tables));
}

double HamiltonianSystem::mass_of_others(int axis) const {
  double m = 1.0;
  for (int j = 0; j < dim(); ++j)
    if (j != axis) m *= axis_mass(j);
  return m;
}

namespace {

void check_shapes(const HamiltonianSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& p) {
  if (x.size() != sys.dim() || p.size() != sys.dim())
    throw SolverError(ErrorCode::InvalidArgument, "phase point dimension does not match system");
}

}  // namespace

PhaseEvaluation evaluate_phase(const HamiltonianSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& p) {
  check_shapes(sys, x, p);
  const int d = sys.dim();
  std::vector<MomentSet> m(d);
  for (int i = 0; i < d; ++i) m[i] = p[i] == 0.0 ? MomentSet{sys.axis_mass(i), 0.0, 0.0, 0.0} : sys.axis_moments(i, p[i]);

  const Eigen::VectorXd f = sys.model().f(x);

  // prod M0 - prod mass, built up one axis at a time.
  double jump_part = 0.0;
  double mass_prod = 1.0;
  for (int i = 0; i < d; ++i) {
    jump_part = jump_part * m[i].m0 + mass_prod * m[i].increment;
    mass_prod *= sys.axis_mass(i);
  }

  PhaseEvaluation out;
  out.velocity.dx = f;
  for (int i = 0; i < d; ++i) {
    double coupling = m[i].m1;
    for (int j = 0; j < d; ++j)
      if (j != i) coupling *= m[j].m0;
    out.velocity.dx[i] += coupling;
  }
  out.velocity.dp = -(sys.model().jac(x).transpose() * p);
  out.hamiltonian = f.dot(p) + jump_part;
  out.action_rate = out.velocity.dx.dot(p);
  return out;
}

double hamiltonian_value(const HamiltonianSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& p) {
  return evaluate_phase(sys, x, p).hamiltonian;
}

PhaseVelocity phase_velocity(const HamiltonianSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& p) {
  return evaluate_phase(sys, x, p).velocity;
}

double action_rate(const HamiltonianSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& p) {
  return evaluate_phase(sys, x, p).action_rate;
}

}  // namespace lightjump
