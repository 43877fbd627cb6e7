#include "lightjump/error.hpp"
#include "lightjump/jump_measure.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace lightjump;

namespace {

// Closed forms for alpha = 2, where the measure is an unnormalised Gaussian.
double gauss_m0(double lambda, double p) { return std::sqrt(std::numbers::pi / lambda) * std::exp(p * p / (4 * lambda)); }
double gauss_m1(double lambda, double p) { return p / (2 * lambda) * gauss_m0(lambda, p); }
double gauss_m2(double lambda, double p) { return (1 / (2 * lambda) + p * p / (4 * lambda * lambda)) * gauss_m0(lambda, p); }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("gaussian moments match closed forms") {
  for (double lambda : {0.1, 1.0, 10.0}) {
    for (int p = -5; p <= 5; ++p) {
      const MomentSet m = moments(JumpSpec(lambda, 2.0), p);
      CHECK(rel(m.m0, gauss_m0(lambda, p)) < 1e-10);
      CHECK(rel(m.m1, gauss_m1(lambda, p)) < 1e-10);
      CHECK(rel(m.m2, gauss_m2(lambda, p)) < 1e-10);
      CHECK(rel(m.increment, gauss_m0(lambda, p) - gauss_m0(lambda, 0)) < 1e-9);
    }
  }
}

TEST_CASE("mass has the gamma-function form") {
  for (double alpha : {1.5, 1.83, 3.0}) {
    const double lambda = 0.68;
    const double expected = 2 * std::tgamma(1 + 1 / alpha) * std::pow(lambda, -1 / alpha);
    CHECK(rel(mass(JumpSpec(lambda, alpha)), expected) < 1e-11);
  }
}

TEST_CASE("increment is second order near zero") {
  const JumpSpec spec(0.3, 1.5);
  const double d = moment(spec, 0.0, 2);
  for (double p : {1e-3, 1e-5, 1e-7}) CHECK(rel(exp_increment(spec, p), 0.5 * d * p * p) < 1e-2 * (p / 1e-3) + 1e-9);
  CHECK(exp_increment(spec, 0.0) == 0.0);
}

TEST_CASE("symmetry: even and odd moments") {
  const JumpSpec spec(0.5, 2.7);
  for (double p : {0.1, 0.9, 2.3}) {
    const MomentSet a = moments(spec, p);
    const MomentSet b = moments(spec, -p);
    CHECK(rel(a.m0, b.m0) < 1e-12);
    CHECK(rel(a.m1, -b.m1) < 1e-12);
    CHECK(rel(a.m2, b.m2) < 1e-12);
  }
}

TEST_CASE("derivative identities dM0 = M1, dM1 = M2") {
  // Richardson-extrapolated central differences, O(h^4).
  auto deriv = [](const JumpSpec& spec, double p, int k) {
    auto central = [&](double h) { return (moment(spec, p + h, k) - moment(spec, p - h, k)) / (2 * h); };
    return (4 * central(1e-3) - central(2e-3)) / 3;
  };
  for (double alpha : {1.5, 1.83, 3.5}) {
    const JumpSpec spec(0.68, alpha);
    for (double p : {-1.5, 0.2, 1.1}) {
      const double scale = moment(spec, p, 0);
      CHECK(std::abs(deriv(spec, p, 0) - moment(spec, p, 1)) < 1e-7 * scale);
      CHECK(std::abs(deriv(spec, p, 1) - moment(spec, p, 2)) < 1e-7 * moment(spec, p, 2));
    }
  }
}

TEST_CASE("invalid specs and overflow") {
  CHECK_THROWS_AS(JumpSpec(0.0, 2.0), SolverError);
  CHECK_THROWS_AS(JumpSpec(1.0, 1.0), SolverError);
  const JumpSpec spec(1.0, 2.0);
  try {
    (void)moments(spec, 100.0);  // peak exponent 2500
    FAIL("expected overflow");
  } catch (const SolverError& e) {
    CHECK(e.code() == ErrorCode::QuadratureOverflow);
  }
}

TEST_CASE("moment table reproduces direct quadrature") {
  for (const JumpSpec spec : {JumpSpec(0.68, 1.83), JumpSpec(0.1, 1.5), JumpSpec(0.05, 4.0), JumpSpec(10.0, 2.0)}) {
    const MomentTable table(spec);
    CHECK(rel(table.mass(), mass(spec)) < 1e-12);
    for (double frac : {1e-6, 1e-3, 0.01, 0.1, 0.37, 0.8, 0.99}) {
      for (double sign : {-1.0, 1.0}) {
        const double p = sign * frac * table.p_max();
        const MomentSet a = table(p);
        const MomentSet b = moments(spec, p);
        CHECK(rel(a.m0, b.m0) < 1e-10);
        CHECK(rel(a.m1, b.m1) < 1e-10);
        CHECK(rel(a.m2, b.m2) < 1e-10);
        CHECK(rel(a.increment, b.increment) < 1e-10);
      }
    }
    CHECK(table(0.0).increment == 0.0);
    CHECK_THROWS_AS((void)table(1.01 * table.p_max()), SolverError);
    CHECK_THROWS_AS((void)table(std::nan("")), SolverError);
  }
}
