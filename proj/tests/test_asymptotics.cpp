#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ptstrip/asymptotics.hpp"
#include "ptstrip/errors.hpp"

using namespace ptstrip;
using doctest::Approx;

namespace {

const BetaShape kGauss = BetaShape::gaussian_poly({-1.0}, 1.0);           // -exp(-x^2)
const BetaShape kOdd = BetaShape::gaussian_poly({0.0, 1.0}, 1.0);         // x exp(-x^2)
const BetaShape kCritical = BetaShape::gaussian_poly({5.0, -1.5, -1.0}, 10.0);

// brute-force Riemann sum of beta * (kernel conv beta) over [-R, R]^2
double beta_v_riemann(const BetaShape& beta, double kappa, double R, int n) {
  const double h = 2.0 * R / n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -R + (i + 0.5) * h;
    const double bx = beta(x);
    if (bx == 0.0) continue;
    double inner = 0.0;
    for (int j = 0; j < n; ++j) {
      const double t = -R + (j + 0.5) * h;
      inner += std::exp(-kappa * std::abs(x - t)) * beta(t);
    }
    acc += bx * inner * h * h;
  }
  return acc / (2.0 * kappa);
}

}  // namespace

TEST_CASE("moments: gaussian integral, odd symmetry, polynomial shapes") {
  CHECK(moment(kGauss) == Approx(-std::sqrt(M_PI)).epsilon(1e-14));
  CHECK(moment(kOdd) == Approx(0.0).scale(1.0).epsilon(1e-14));

  // -(x^2 + 1.5 x - 5) exp(-x^2/10) integrates to exactly zero
  CHECK(std::abs(moment(kCritical)) < 1e-12);

  // analytic value against adaptive quadrature for a generic shape
  const BetaShape b = BetaShape::gaussian_poly({0.3, -0.7, 1.1, 0.0, 0.2}, 2.5, 0.4);
  const oracles::GaussLegendre gl(200);
  const double quad = gl.integrate([&](double x) { return b(x); }, -16.0, 17.0);
  CHECK(moment(b) == Approx(quad).epsilon(1e-12));

  // piecewise: exact sums
  const BetaShape pc = BetaShape::piecewise({{-2.0, 0.0, 1.0}, {0.0, 2.0, -1.0}});
  CHECK(moment(pc) == 0.0);
}

TEST_CASE("v_function: closed values and symmetry") {
  // v_0(0) = 1/2 integral |t| e^{-t^2} dt = 1/2
  CHECK(v_function(kGauss, 0, 0.0, 0.0, 0.0) == Approx(0.5).epsilon(1e-11));

  // even beta gives even v_j
  for (double x : {0.4, 1.3, 2.2}) {
    const double vp = v_function(kGauss, 1, M_PI / 2.0, 1.0 / 3.0, x);
    const double vm = v_function(kGauss, 1, M_PI / 2.0, 1.0 / 3.0, -x);
    CHECK(vp == Approx(vm).epsilon(1e-11));
  }

  // brute-force Riemann oracle, j = 1, alpha0 = 1/3, d = 2
  {
    const double kappa = std::sqrt(M_PI * M_PI / 4.0 - 1.0 / 9.0);
    double sum = 0.0;
    const int n = 100000;
    const double h = 16.0 / n;
    for (int i = 0; i < n; ++i) {
      const double t = -8.0 + (i + 0.5) * h;
      sum += std::exp(-kappa * std::abs(t)) * kGauss(t) * h;
    }
    const double oracle = sum / (2.0 * kappa);
    CHECK(v_function(kGauss, 1, M_PI / 2.0, 1.0 / 3.0, 0.0) == Approx(oracle).epsilon(1e-8));
  }

  CHECK_THROWS_AS(v_function(kGauss, 1, 0.2, 0.5, 0.0), InvalidChannel);
}

TEST_CASE("channel moments: fourier route vs direct quadrature") {
  const oracles::GaussLegendre gl(200);
  for (double kappa : {0.3, 1.0, 4.0, 20.0}) {
    const double direct = gl.integrate(
        [&](double x) { return kGauss(x) * v_function(kGauss, 1, std::sqrt(kappa * kappa), 0.0, x); },
        -9.0, 9.0);
    CHECK(beta_v_moment(kGauss, kappa) == Approx(direct).epsilon(1e-9));
  }
  // shifted asymmetric shape
  const BetaShape b = BetaShape::gaussian_poly({1.0, 0.5}, 3.0, -0.7);
  for (double kappa : {0.5, 2.0}) {
    const double direct = gl.integrate(
        [&](double x) { return b(x) * v_function(b, 1, kappa, 0.0, x); }, -15.0, 14.0);
    CHECK(beta_v_moment(b, kappa) == Approx(direct).epsilon(1e-9));
  }
}

TEST_CASE("channel moments: piecewise closed forms vs riemann") {
  const BetaShape pc = BetaShape::piecewise({{-1.5, 0.0, 1.0}, {0.0, 1.5, -1.0}});
  for (double kappa : {0.4, 1.7, 6.0}) {
    const double oracle = beta_v_riemann(pc, kappa, 1.5, 4000);
    CHECK(beta_v_moment(pc, kappa) == Approx(oracle).epsilon(1e-6));
  }
  // v0 moment closed form vs quadrature-free riemann
  {
    double acc = 0.0;
    const int n = 4000;
    const double h = 3.0 / n;
    for (int i = 0; i < n; ++i) {
      const double x = -1.5 + (i + 0.5) * h;
      for (int j = 0; j < n; ++j) {
        const double t = -1.5 + (j + 0.5) * h;
        acc += pc(x) * std::abs(x - t) * pc(t) * h * h;
      }
    }
    CHECK(beta_v0_moment(pc) == Approx(-0.5 * acc).epsilon(1e-6));
  }
}

TEST_CASE("tau: stability in the series cap") {
  WeakCouplingInput a{1.0 / 3.0, 2.0, kGauss, 200};
  WeakCouplingInput b{1.0 / 3.0, 2.0, kGauss, 100};
  const double t200 = tau_constant(a).tau;
  const double t100 = tau_constant(b).tau;
  CHECK(std::abs(t200 - t100) / std::abs(t200) < 1e-8);

  WeakCouplingInput c{std::sqrt(2.0), 2.0, kCritical, 200};
  WeakCouplingInput e{std::sqrt(2.0), 2.0, kCritical, 100};
  const double s200 = tau_constant(c).tau;
  const double s100 = tau_constant(e).tau;
  CHECK(std::abs(s200 - s100) / std::abs(s200) < 1e-8);

  // frozen values guarding the full machinery
  CHECK(t200 == Approx(-0.785768306020).epsilon(1e-8));
  CHECK(s200 == Approx(1933.8246159544).epsilon(1e-8));
}

TEST_CASE("tau: degenerate coupling and regime guards") {
  WeakCouplingInput in{M_PI / 2.0, 2.0, kGauss, 100};  // |alpha0| = pi/d exactly
  CHECK_THROWS_AS(tau_constant(in), DegenerateCoupling);
  in.alpha0 = M_PI;  // alpha0 d / pi = 2
  CHECK_THROWS_AS(tau_constant(in), DegenerateCoupling);
}

TEST_CASE("tau panels: sign structure of the parameter scans") {
  // antisymmetric square well, alpha0 = 1/3, d = 2: negative at small L,
  // positive at large L, exactly one crossing in [0.1, 6]
  auto panel1 = [](double L) {
    const BetaShape b = BetaShape::piecewise({{-L, 0.0, 1.0}, {0.0, L, -1.0}});
    return tau_constant({1.0 / 3.0, 2.0, b, 200}).tau;
  };
  CHECK(panel1(0.6) < 0.0);
  CHECK(panel1(1.5) < 0.0);
  CHECK(panel1(3.0) > 0.0);
  CHECK(panel1(6.0) > 0.0);

  // symmetric well scanned in alpha0 across the regime boundary pi/d
  auto panel3 = [](double a0) {
    const BetaShape b = BetaShape::piecewise({{-10.0, 0.0, -1.0}, {0.0, 10.0, -1.0}});
    return tau_constant({a0, 2.0, b, 200}).tau;
  };
  CHECK(panel3(1.0) < 0.0);
  CHECK(panel3(1.4) < 0.0);
  CHECK(panel3(1.8) > 0.0);
  CHECK(panel3(2.5) > 0.0);

  // amplitude scan: tau is homogeneous of degree 2 in beta
  auto panel2 = [](double at) {
    const BetaShape b = BetaShape::piecewise({{-2.0, 0.0, at}, {0.0, 2.0, -at}});
    return tau_constant({1.0, 2.0, b, 200}).tau;
  };
  CHECK(panel2(2.0) == Approx(4.0 * panel2(1.0)).epsilon(1e-10));
  CHECK(panel2(0.5) > 0.0);
}

TEST_CASE("classification follows the sign conditions") {
  CHECK(classify({1.0 / 3.0, 2.0, kGauss, 200}).label == Case::B1);
  CHECK(classify({0.0, 2.0, kGauss, 200}).label == Case::A);
  CHECK(classify({0.0, 2.0, kOdd, 200}).label == Case::A);
  CHECK(classify({std::sqrt(2.0), 2.0, kCritical, 200}).label == Case::B3);

  // repulsive sign gives B2
  const BetaShape pos = BetaShape::gaussian_poly({1.0}, 1.0);
  CHECK(classify({1.0 / 3.0, 2.0, pos, 200}).label == Case::B2);

  // supercritical labels by the sign of tau
  const BetaShape well = BetaShape::piecewise({{-10.0, 0.0, -1.0}, {0.0, 10.0, -1.0}});
  CHECK(classify({1.8, 2.0, well, 200}).label == Case::C1);

  // odd square well in the supercritical regime: find the sign and check
  const BetaShape odd_well = BetaShape::piecewise({{-2.0, 0.0, 1.0}, {0.0, 2.0, -1.0}});
  const auto cl = classify({1.8, 2.0, odd_well, 200});
  CHECK((cl.label == Case::C1 || cl.label == Case::C2));
  CHECK((cl.tau > 0) == (cl.label == Case::C1));
}

TEST_CASE("lambda predictions") {
  WeakCouplingInput b1{1.0 / 3.0, 2.0, kGauss, 200};

  SUBCASE("eps = 0 returns the threshold") {
    CHECK(lambda_prediction(b1, 0.0, PredictionOrder::eps2) == Approx(1.0 / 9.0));
    CHECK(lambda_prediction(b1, 0.0, PredictionOrder::eps3) == Approx(1.0 / 9.0));
  }
  SUBCASE("B1 quadratic truncation") {
    // mu0^2 - eps^2 alpha0^2 <beta>^2 = 1/9 - 0.01 * pi/9
    CHECK(lambda_prediction(b1, 0.1, PredictionOrder::eps2) ==
          Approx(1.0 / 9.0 - 0.01 * M_PI / 9.0).epsilon(1e-14));
  }
  SUBCASE("B1 cubic correction uses tau") {
    const double tau = tau_constant(b1).tau;
    const double expected = 1.0 / 9.0 - 0.01 * M_PI / 9.0 +
                            2.0 * 1e-3 * (1.0 / 3.0) * tau * (-std::sqrt(M_PI));
    CHECK(lambda_prediction(b1, 0.1, PredictionOrder::eps3) == Approx(expected).epsilon(1e-12));
    CHECK_THROWS_AS(lambda_prediction(b1, 0.1, PredictionOrder::eps4), std::invalid_argument);
  }
  SUBCASE("critical quartic law") {
    WeakCouplingInput b3{std::sqrt(2.0), 2.0, kCritical, 200};
    const double tau = tau_constant(b3).tau;
    const double eps = 0.2;
    CHECK(lambda_prediction(b3, eps, PredictionOrder::eps4) ==
          Approx(2.0 - 1.6e-3 * tau * tau).epsilon(1e-12));
    CHECK_THROWS_AS(lambda_prediction(b3, eps, PredictionOrder::eps2), std::invalid_argument);
  }
  SUBCASE("cases without an eigenvalue") {
    const BetaShape pos = BetaShape::gaussian_poly({1.0}, 1.0);
    CHECK_THROWS_AS(lambda_prediction({1.0 / 3.0, 2.0, pos, 200}, 0.05, PredictionOrder::eps2),
                    NoEigenvaluePredicted);
    CHECK_THROWS_AS(lambda_prediction({0.0, 2.0, kGauss, 200}, 0.05, PredictionOrder::eps2),
                    NoEigenvaluePredicted);
  }
}
