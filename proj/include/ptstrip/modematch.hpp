#pragma once

#include <vector>

#include <Eigen/Core>

#include "ptstrip/profiles.hpp"
#include "ptstrip/records.hpp"
#include "ptstrip/transverse.hpp"

namespace ptstrip {

// Mode-matching solver for the piecewise-constant coupling profile: expand in
// each region's transverse basis, enforce smooth matching at x1 = L_-, 0, L_+,
// and locate the zeros of the secular determinant in the spectral parameter.

struct SearchRegion {
  double re_lo = 0.0, re_hi = 0.0;
  double im_lo = 0.0, im_hi = 0.0;

  bool real_axis_only() const { return im_lo == 0.0 && im_hi == 0.0; }
  bool contains(Complex z, double slack = 0.0) const {
    return z.real() >= re_lo - slack && z.real() <= re_hi + slack &&
           z.imag() >= im_lo - slack && z.imag() <= im_hi + slack;
  }
};

// The truncated block system at one value of lambda.  Unknown ordering is
// (b, c, bB+, cB-), with the products b_j B_{+,j} and c_j B_{-,j} treated as
// independent unknowns per channel.
struct MatchSystem {
  int N = 0;
  Complex lambda;
  Eigen::MatrixXcd m11, m12, m21, m23, m33, m34, m42, m44;

  // 4(N+1) x 4(N+1) assembled matrix; the zero blocks are exactly zero.
  Eigen::MatrixXcd full() const;
};

// Determinant in scaled form: det = exp(log_mag) * phase, |phase| = 1.
struct ScaledDet {
  double log_mag = 0.0;
  Complex phase{1.0, 0.0};
};

struct MatchedEigenfunction {
  Complex lambda;
  int N = 0;
  SquareWellProfile profile;
  TransverseFamily fam0, famP, famM;
  // printed unknowns b_j, c_j and the products b_j B_{+,j}, c_j B_{-,j}
  Eigen::VectorXcd b, c, bB, cB;
  // the same expansion in the interface-normalized exponential basis (what
  // the evaluation uses; immune to evanescent-channel overflow)
  Eigen::VectorXcd u, w, r, t;
  // asymptotic coefficients scaled at the interfaces: for x1 > L_+ the field
  // is sum_i a_at_Lp(i) exp(-gamma_i (x1 - L_+)) psi_i^0(x2), and mirrored
  // on the left; a_i = a_at_Lp(i) exp(gamma_i L_+) recovers the raw value.
  Eigen::VectorXcd a_at_Lp, d_at_Lm;
  double null_residual = 0.0;

  // field value anywhere in the strip
  Complex eval(double x1, double x2) const;
  // max projected residual of the six matching conditions
  double matching_residual() const;
};

inline constexpr int kMaxNewtonIter = 50;

// tol_branch guard radius around the branch points (mu_j^0)^2
double threshold_guard(const SquareWellProfile& profile);

MatchSystem assemble_system(const SquareWellProfile& profile, Complex lambda, int N);

// det of the full system via pivoted LU, in scaled form.
ScaledDet secular_logdet(const SquareWellProfile& profile, Complex lambda, int N);

// det with the spurious sqrt(lambda - (mu_j^pm)^2) column factors divided
// out; analytic below the outer thresholds and used for root finding.
ScaledDet secular_logdet_reduced(const SquareWellProfile& profile, Complex lambda, int N);

// Argument-principle zero count of the reduced determinant over a rectangle.
int count_zeros(const SquareWellProfile& profile, int N, const SearchRegion& region);

struct FindResult {
  std::vector<EigenvalueRecord> records;
  int winding_count = -1;     // argument-principle count over the region
  int failed_seeds = 0;
};

// Locates zeros of the secular determinant inside the region (coarse scan or
// rectangle subdivision, then complex Newton polish).  Throws NoConvergence
// when seeds exist but none could be polished.
FindResult find_eigenvalues(const SquareWellProfile& profile, int N, const SearchRegion& region);

// Runs find_eigenvalues at N and N + 4 and pairs the results; records carry
// the cross-truncation distance and the converged flag.
std::vector<EigenvalueRecord> find_converged_eigenvalues(const SquareWellProfile& profile,
                                                         int N, const SearchRegion& region);

MatchedEigenfunction reconstruct_eigenfunction(const SquareWellProfile& profile,
                                               const EigenvalueRecord& record, int N);

// Even (cosine) and odd (sine) reduced determinants of a symmetric well.
std::pair<ScaledDet, ScaledDet> symmetric_reduced_determinants(const SquareWellProfile& profile,
                                                               Complex lambda, int N);

}  // namespace ptstrip
