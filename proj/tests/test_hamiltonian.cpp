#include "lightjump/hamiltonian.hpp"

#include <doctest.h>

#include <cmath>

using namespace lightjump;

namespace {

HamiltonianSystem maier_stein(double gamma, double a1, double a2) {
  return HamiltonianSystem(make_maier_stein_model({gamma}), {JumpSpec(0.1, a1), JumpSpec(0.1, a2)});
}

}  // namespace

TEST_CASE("H vanishes at zero momentum") {
  const auto sys = maier_stein(5.0, 1.5, 2.5);
  for (double x1 : {-1.0, -0.3, 0.4}) CHECK(hamiltonian_value(sys, Eigen::Vector2d(x1, 0.2), Eigen::Vector2d::Zero()) == 0.0);
}

TEST_CASE("phase velocity is the symplectic gradient of H") {
  const auto sys = maier_stein(5.0, 1.5, 3.5);
  const Eigen::Vector2d x(-0.6, 0.25);
  const Eigen::Vector2d p(0.04, -0.03);
  const PhaseVelocity v = phase_velocity(sys, x, p);
  const double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    Eigen::Vector2d e = Eigen::Vector2d::Zero();
    e[i] = h;
    const double dhdp = (hamiltonian_value(sys, x, p + e) - hamiltonian_value(sys, x, p - e)) / (2 * h);
    const double dhdx = (hamiltonian_value(sys, x + e, p) - hamiltonian_value(sys, x - e, p)) / (2 * h);
    CHECK(v.dx[i] == doctest::Approx(dhdp).epsilon(1e-6));
    CHECK(v.dp[i] == doctest::Approx(-dhdx).epsilon(1e-6));
  }
  CHECK(action_rate(sys, x, p) == doctest::Approx(v.dx.dot(p)).epsilon(1e-14));
}

TEST_CASE("evaluate_phase agrees with the separate entry points") {
  const auto sys = maier_stein(1.0, 2.0, 1.5);
  const Eigen::Vector2d x(-0.9, 0.05);
  const Eigen::Vector2d p(0.02, 0.01);
  const PhaseEvaluation e = evaluate_phase(sys, x, p);
  CHECK(e.hamiltonian == doctest::Approx(hamiltonian_value(sys, x, p)));
  CHECK((e.velocity.dx - phase_velocity(sys, x, p).dx).norm() < 1e-15);
  CHECK(e.action_rate == doctest::Approx(action_rate(sys, x, p)));
}

TEST_CASE("mass of the other axes") {
  const auto sys = maier_stein(1.0, 2.0, 1.5);
  CHECK(sys.mass_of_others(0) == doctest::Approx(mass(JumpSpec(0.1, 1.5))));
  CHECK(sys.mass_of_others(1) == doctest::Approx(mass(JumpSpec(0.1, 2.0))));
}
