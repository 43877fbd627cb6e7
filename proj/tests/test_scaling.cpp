#include "lightjump/error.hpp"
#include "lightjump/scaling.hpp"

#include <doctest.h>

#include <cmath>

using namespace lightjump;

namespace {

const CAlphaConstants kTruth{0.7196, 0.4405, 1.487, 0.6062};

ScalingTable synthetic(const CAlphaConstants& c, int d, const std::vector<double>& alphas) {
  const std::vector<double> lambdas{0.05, 0.1, 0.2, 0.35, 0.5};
  return sweep([&](double a, double l) { return predict_w(c, d, a, l); }, alphas, lambdas, "synthetic", "exact");
}

}  // namespace

TEST_CASE("slopes and exponent of an exact power law") {
  const ScalingTable t = synthetic(kTruth, 4, {1.5, 2.0, 3.0, 4.0});
  const auto slopes = fit_slopes(t);
  REQUIRE(slopes.size() == 4);
  for (const auto& s : slopes) {
    CHECK(s.slope == doctest::Approx(4.0 / s.alpha).epsilon(1e-12));
    CHECK(s.r_squared == doctest::Approx(1.0));
    CHECK(std::exp(s.intercept) == doctest::Approx(c_alpha(kTruth, s.alpha)).epsilon(1e-10));
  }
  CHECK(fit_exponent(slopes) == doctest::Approx(4.0).epsilon(1e-12));
  for (const auto& [a, c] : c_values(t, 4)) CHECK(c == doctest::Approx(c_alpha(kTruth, a)).epsilon(1e-12));
}

TEST_CASE("Nelder-Mead recovers synthetic C(alpha) constants") {
  std::map<double, double> pts;
  for (double a : {1.5, 2.0, 2.5, 3.0, 3.5, 4.0}) pts[a] = c_alpha(kTruth, a);
  const CAlphaFit fit = fit_c_alpha(pts);
  CHECK(fit.constants.k1 == doctest::Approx(kTruth.k1).epsilon(1e-6));
  CHECK(fit.constants.k2 == doctest::Approx(kTruth.k2).epsilon(1e-6));
  CHECK(fit.constants.s1 == doctest::Approx(kTruth.s1).epsilon(1e-6));
  CHECK(fit.constants.s2 == doctest::Approx(kTruth.s2).epsilon(1e-6));
  CHECK(fit.residual_rms < 1e-9);
  CHECK(fit.converged_starts > 0);
}

TEST_CASE("fit is deterministic for a fixed seed") {
  std::map<double, double> pts;
  for (double a : {1.5, 2.0, 2.5, 3.0, 3.5}) pts[a] = c_alpha({60.21, 38.41, 1.363, 0.6009}, a) * (1 + 1e-3 * a);
  const CAlphaFit a = fit_c_alpha(pts);
  const CAlphaFit b = fit_c_alpha(pts);
  CHECK(a.constants.k1 == b.constants.k1);
  CHECK(a.constants.s2 == b.constants.s2);
  CHECK(a.residual_rms == b.residual_rms);
}

TEST_CASE("too few points") {
  CHECK_THROWS_AS(fit_c_alpha({{1.5, 1.0}, {2.0, 2.0}, {3.0, 2.5}, {4.0, 2.7}}), SolverError);
  const ScalingTable t =
      sweep([](double, double l) { return l; }, {2.0}, {0.1, 0.2}, "synthetic", "exact");
  CHECK_THROWS_AS(fit_slopes(t), SolverError);
}

TEST_CASE("sweep records failures per row and drops duplicates") {
  const ScalingTable t = sweep(
      [](double a, double l) {
        if (a > 3.0) throw SolverError(ErrorCode::NoExitFound, "synthetic");
        return a == 2.0 ? -1.0 : l;
      },
      {1.5, 2.0, 2.0, 4.0}, {0.1, 0.2, 0.2}, "synthetic", "exact", 3);
  REQUIRE(t.rows.size() == 6);
  CHECK(t.rows[0].ok());
  CHECK(t.rows[2].failure == "non-positive well depth");
  CHECK(t.rows[4].failure.find("no-exit-found") != std::string::npos);
  CHECK(std::isnan(t.rows[5].w));
}

TEST_CASE("prediction flags extrapolation") {
  ScalingFit fit;
  fit.c_fit.constants = kTruth;
  fit.exponent_rule = 4;
  fit.alpha_min = 1.5;
  fit.alpha_max = 4.0;
  CHECK_FALSE(predict_w(fit, 2.0, 0.1).extrapolated);
  CHECK(predict_w(fit, 5.0, 0.1).extrapolated);
  CHECK(predict_w(fit, 2.0, 0.1).value == doctest::Approx(c_alpha(kTruth, 2.0) * 0.01));
}

TEST_CASE("climate well depth: oracle and shooting agree, lambda scaling is 3/alpha") {
  const double wo = climate_well_depth({}, 2.0, 0.01, DepthMethod::Oracle);
  const double ws = climate_well_depth({}, 2.0, 0.01, DepthMethod::Shooting);
  CHECK(std::abs(ws - wo) < 1e-5 * wo);
  const double w4 = climate_well_depth({}, 2.0, 0.04, DepthMethod::Oracle);
  CHECK(w4 / wo == doctest::Approx(8.0).epsilon(0.02));
  CHECK(depth_method_from_string("oracle") == DepthMethod::Oracle);
  CHECK_THROWS_AS(depth_method_from_string("guess"), SolverError);
}
