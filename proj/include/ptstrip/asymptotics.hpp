#pragma once

#include <string>

#include "ptstrip/profiles.hpp"

namespace ptstrip {

// Weak-coupling machinery for alpha = alpha0 + eps * beta: the moment <beta>,
// the auxiliary convolutions v_j, the constant tau, the case classification,
// and the predicted eigenvalue curves lambda(eps).

struct WeakCouplingInput {
  double alpha0 = 0.0;
  double d = 1.0;
  BetaShape beta;
  int series_cap = 200;  // J_max

  bool subcritical() const { return std::abs(alpha0) < M_PI / d; }
  double mu0() const { return std::min(std::abs(alpha0), M_PI / d); }
  double mu0_sq() const { const double m = mu0(); return m * m; }
};

enum class Case { A, B1, B2, B3, B4, C1, C2 };

std::string to_string(Case c);

struct CaseLabel {
  Case label = Case::A;
  double beta_moment = 0.0;
  double tau = 0.0;       // only meaningful when the label depends on tau
  bool tau_used = false;
};

struct TauResult {
  double tau = 0.0;
  double tail_estimate = 0.0;  // bound on the truncation error after tail completion
};

// <beta> = integral of beta over R; closed form for gaussian_poly and
// piecewise shapes, adaptive quadrature otherwise unavailable (all shapes
// have closed forms; quadrature stays as the test oracle).
double moment(const BetaShape& beta);

// <beta^2> etc. building block: <beta v_j> with the kernel of channel kappa;
// exposed for tests.
double beta_v_moment(const BetaShape& beta, double kappa);
double beta_v0_moment(const BetaShape& beta);

// v_j(x1): j = 0 uses the -|x1-t1|/2 kernel, j >= 1 the exponential kernel
// with rate sqrt(mu_j^2 - mu0^2).  Throws InvalidChannel if j >= 1 and
// mu_j <= mu0.
double v_function(const BetaShape& beta, int j, double mu_j, double mu0, double x1);

// tau per the weak-coupling expansion; the truncated channel series is
// completed with an analytic inverse-power tail (the raw partial sums decay
// like 1/J, far too slowly for the stability targets).
TauResult tau_constant(const WeakCouplingInput& input);

CaseLabel classify(const WeakCouplingInput& input);

enum class PredictionOrder { eps2, eps3, eps4 };

// Truncated asymptotics: B1 admits eps2/eps3, B3 and C1 the eps4 formula.
// Throws NoEigenvaluePredicted for labels A, B2, B4, C2.
double lambda_prediction(const WeakCouplingInput& input, double epsilon,
                         PredictionOrder order);

}  // namespace ptstrip
