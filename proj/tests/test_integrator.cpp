#include "lightjump/error.hpp"
#include "lightjump/integrator.hpp"
#include "lightjump/linearization.hpp"

#include <doctest.h>

#include <cmath>

using namespace lightjump;

TEST_CASE("plain solve of exponential decay and harmonic motion") {
  const OdeRhs decay = [](double, const Eigen::VectorXd& y, double& m) {
    m = 0.0;
    return Eigen::VectorXd(-y);
  };
  const OdeSolution s = solve_ode(decay, 0.0, Eigen::VectorXd::Constant(1, 1.0), 5.0, {1e-10, 1e-12});
  CHECK(s.t.back() == doctest::Approx(5.0));
  CHECK(std::abs(s.y.back()[0] - std::exp(-5.0)) < 1e-10);

  const OdeRhs osc = [](double, const Eigen::VectorXd& y, double& m) {
    m = 0.0;
    return Eigen::VectorXd(Eigen::Vector2d(y[1], -y[0]));
  };
  const OdeSolution o = solve_ode(osc, 0.0, Eigen::Vector2d(1.0, 0.0), 10.0, {1e-10, 1e-12});
  CHECK(std::abs(o.y.back()[0] - std::cos(10.0)) < 1e-8);
  CHECK(std::abs(o.y.back()[1] + std::sin(10.0)) < 1e-8);
}

TEST_CASE("event location on the dense interpolant") {
  // On x2 = 0 the Maier-Stein drift is x - x^3, with x(t)^2 = 1 / (1 + (1/x0^2 - 1) e^{-2t}).
  const HamiltonianSystem sys(make_maier_stein_model({1.0}), {JumpSpec(0.1, 1.5), JumpSpec(0.1, 1.5)});
  ExtendedState from;
  from.x = Eigen::Vector2d(-0.5, 0.0);
  from.p = Eigen::Vector2d::Zero();
  const double level = -0.9;
  const std::vector<StopCondition> stops{
      StopCondition::boundary_crossing([level](const Eigen::VectorXd& x) { return x[0] - level; }, "level"),
      StopCondition::max_time(100.0)};
  const PathRecord rec = continue_deterministic(sys, from, stops, {.tol = {1e-11, 1e-13}});
  REQUIRE(rec.termination_label == "level");
  const double t_exact = 0.5 * std::log((1 / 0.25 - 1) / (1 / 0.81 - 1));
  CHECK(rec.exit_state.t == doctest::Approx(t_exact).epsilon(1e-9));
  CHECK(rec.exit_state.x[0] == doctest::Approx(level).epsilon(1e-9));
  CHECK(rec.exit_state.w == 0.0);
}

TEST_CASE("proximity, max-time and cap terminations") {
  const HamiltonianSystem sys(make_maier_stein_model({1.0}), {JumpSpec(0.1, 1.5), JumpSpec(0.1, 1.5)});
  ExtendedState from;
  from.x = Eigen::Vector2d(-0.5, 0.3);
  from.p = Eigen::Vector2d::Zero();
  const PathRecord near = continue_deterministic(
      sys, from, {StopCondition::proximity(Eigen::Vector2d(-1.0, 0.0), 1e-3, "sink"), StopCondition::max_time(1e3)});
  CHECK(near.termination == StopCondition::Kind::Proximity);
  CHECK((near.exit_state.x - Eigen::Vector2d(-1.0, 0.0)).norm() == doctest::Approx(1e-3).epsilon(1e-6));

  const PathRecord timed = continue_deterministic(sys, from, {StopCondition::max_time(0.25)});
  CHECK(timed.termination == StopCondition::Kind::MaxTime);
  CHECK(timed.exit_state.t == doctest::Approx(0.25));

  // A launch from the chart grows W; an action cap stops it.
  const auto chart = build_chart(sys, Eigen::Vector2d(-1.0, 0.0));
  const ExtendedState kick = project_to_zero_energy(sys, initial_condition(chart, Eigen::Vector2d(1e-3, 0.0)));
  const PathRecord capped = integrate(sys, kick, {StopCondition::action_cap(1e-4), StopCondition::max_time(50.0)});
  CHECK(capped.termination == StopCondition::Kind::ActionCap);
  CHECK(capped.exit_state.w == doctest::Approx(1e-4).epsilon(1e-8));
}

TEST_CASE("stop lists need a finite terminal condition") {
  const HamiltonianSystem sys(make_maier_stein_model({1.0}), {JumpSpec(0.1, 1.5), JumpSpec(0.1, 1.5)});
  ExtendedState from;
  from.x = Eigen::Vector2d(-0.5, 0.0);
  from.p = Eigen::Vector2d::Zero();
  CHECK_THROWS_AS(integrate(sys, from, {StopCondition::boundary_crossing([](const Eigen::VectorXd& x) { return x[0]; })}),
                  SolverError);
}
