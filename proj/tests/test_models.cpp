#include "lightjump/error.hpp"
#include "lightjump/models.hpp"

#include <doctest.h>

#include <cmath>

using namespace lightjump;

TEST_CASE("climate model has three fixed points at the default greenhouse factor") {
  const VectorFieldModel m = make_energy_balance_model({});
  REQUIRE(m.fixed_points.size() == 3);
  CHECK(m.fixed_points[0].location[0] == doctest::Approx(233.5203404347).epsilon(1e-10));
  CHECK(m.fixed_points[1].location[0] == doctest::Approx(264.8986418530).epsilon(1e-10));
  CHECK(m.fixed_points[2].location[0] == doctest::Approx(288.0296923945).epsilon(1e-10));
  CHECK(m.fixed_points[0].stability == Stability::Stable);
  CHECK(m.fixed_points[1].stability == Stability::Unstable);
  CHECK(m.fixed_points[2].stability == Stability::Stable);
  for (const auto& fp : m.fixed_points) CHECK(fp.residual < 1e-10);
}

TEST_CASE("climate model is monostable at gamma = 1") {
  EnergyBalanceParams p;
  p.gamma = 1.0;
  const VectorFieldModel m = make_energy_balance_model(p);
  CHECK(m.fixed_points.size() == 1);
}

TEST_CASE("climate drift is minus the potential gradient") {
  const EnergyBalanceParams p;
  for (double T : {220.0, 250.0, 270.0, 300.0}) {
    const double h = 1e-4;
    const double grad = (energy_balance_potential(p, T + h) - energy_balance_potential(p, T - h)) / (2 * h);
    CHECK(energy_balance_drift(p, T) == doctest::Approx(-grad).epsilon(1e-7));
    const double df = (energy_balance_drift(p, T + h) - energy_balance_drift(p, T - h)) / (2 * h);
    CHECK(energy_balance_drift_derivative(p, T) == doctest::Approx(df).epsilon(1e-7));
  }
}

TEST_CASE("maier-stein fixed points and jacobian") {
  const VectorFieldModel m = make_maier_stein_model({5.0});
  REQUIRE(m.fixed_points.size() == 3);
  int stable = 0, saddle = 0;
  for (const auto& fp : m.fixed_points) {
    stable += fp.stability == Stability::Stable;
    saddle += fp.stability == Stability::Saddle;
  }
  CHECK(stable == 2);
  CHECK(saddle == 1);
  const Eigen::Vector2d x(0.3, -0.7);
  const double h = 1e-6;
  Eigen::Matrix2d fd;
  for (int j = 0; j < 2; ++j) {
    Eigen::Vector2d e = Eigen::Vector2d::Zero();
    e[j] = h;
    fd.col(j) = (maier_stein_drift({5.0}, x + e) - maier_stein_drift({5.0}, x - e)) / (2 * h);
  }
  CHECK((fd - maier_stein_jacobian({5.0}, x)).norm() < 1e-8);
}

TEST_CASE("maier-stein field is reflection symmetric in x2") {
  const MaierSteinParams p{2.0};
  const Eigen::Vector2d x(0.4, 0.9);
  const Eigen::Vector2d xr(0.4, -0.9);
  const Eigen::Vector2d f = maier_stein_drift(p, x);
  const Eigen::Vector2d fr = maier_stein_drift(p, xr);
  CHECK(f[0] == doctest::Approx(fr[0]));
  CHECK(f[1] == doctest::Approx(-fr[1]));
}

TEST_CASE("make_model rejects unknown names and parameters") {
  CHECK_THROWS_AS(make_model("lorenz", {}), SolverError);
  CHECK_THROWS_AS(make_model("maier_stein", {{"beta", 1.0}}), SolverError);
  CHECK(make_model("maier_stein", {{"gamma", 5.0}}).dim == 2);
}
