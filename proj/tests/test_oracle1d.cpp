#include "lightjump/error.hpp"
#include "lightjump/oracle1d.hpp"
#include "lightjump/shooting.hpp"

#include <doctest.h>

#include <cmath>

using namespace lightjump;

namespace {

const EnergyBalanceParams kParams{};

ScalarField climate_f() {
  return [](double T) { return energy_balance_drift(kParams, T); };
}

}  // namespace

TEST_CASE("pstar solves the zero-energy equation with the opposite sign of f") {
  const HamiltonianSystem sys(make_energy_balance_model(kParams), {JumpSpec(0.68, 1.83)});
  const EffectiveIncrement g = on_axis_increment(sys, 0);
  const ScalarField f = climate_f();
  for (double T : {240.0, 255.0, 270.0, 280.0}) {
    const double p = pstar(f, g, T);
    CHECK(std::abs(f(T) * p + g(p)) < 1e-10 * std::abs(f(T) * p));
    CHECK(p * f(T) < 0.0);
  }
  // Roots are only known to rounding, so p* there is of the size of f / D.
  for (const auto& fp : sys.model().fixed_points) CHECK(std::abs(pstar(f, g, fp.location[0])) < 1e-13);
  CHECK(pstar([](double) { return 0.0; }, g, 250.0) == 0.0);
}

TEST_CASE("quasi-potential: zero at the anchor, dW/dx = pstar, increasing toward the saddle") {
  const HamiltonianSystem sys(make_energy_balance_model(kParams), {JumpSpec(0.68, 1.83)});
  const EffectiveIncrement g = on_axis_increment(sys, 0);
  const double cold = sys.model().fixed_points[0].location[0];
  const double saddle = sys.model().fixed_points[1].location[0];
  std::vector<double> grid;
  for (double x = cold; x < saddle; x += 1.0) grid.push_back(x);
  grid.push_back(saddle);
  const QuasiPotentialCurve c = quasipotential(climate_f(), g, cold, grid);
  CHECK(c.w.front() == 0.0);
  for (std::size_t k = 1; k < c.w.size(); ++k) CHECK(c.w[k] > c.w[k - 1]);
  const double x = 250.0;
  const double h = 1e-3;
  const double dw = (quasipotential_at(climate_f(), g, cold, x + h) - quasipotential_at(climate_f(), g, cold, x - h)) / (2 * h);
  CHECK(dw == doctest::Approx(pstar(climate_f(), g, x)).epsilon(1e-7));
  CHECK(c.w.back() == doctest::Approx(11.70772467).epsilon(1e-8));
}

TEST_CASE("shooting reproduces the oracle at the unstable point") {
  for (const auto& [lambda, alpha] : {std::pair{0.68, 1.83}, std::pair{1.0, 2.0}, std::pair{0.3, 1.5}}) {
    const HamiltonianSystem sys(make_energy_balance_model(kParams), {JumpSpec(lambda, alpha)});
    const double cold = sys.model().fixed_points[0].location[0];
    const double saddle = sys.model().fixed_points[1].location[0];
    const double w_oracle = quasipotential_at(climate_f(), on_axis_increment(sys, 0), cold, saddle);
    const PathRecord rec = shoot_to_saddle_1d(sys, build_chart(sys, sys.model().fixed_points[0].location), saddle);
    REQUIRE(rec.termination_label == "saddle");
    CHECK(std::abs(rec.exit_state.w - w_oracle) < 1e-5 * w_oracle);
    CHECK(rec.h_drift < 1e-6);
  }
}

TEST_CASE("on-axis increment carries the other axis mass") {
  const HamiltonianSystem sys(make_maier_stein_model({1.0}), {JumpSpec(0.1, 1.5), JumpSpec(0.1, 2.0)});
  const EffectiveIncrement g = on_axis_increment(sys, 0);
  CHECK(g.factor == doctest::Approx(mass(JumpSpec(0.1, 2.0))));
  CHECK(g(0.3) == doctest::Approx(g.factor * exp_increment(JumpSpec(0.1, 1.5), 0.3)));
}
