#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "ptstrip/errors.hpp"

namespace ptstrip {

using Complex = std::complex<double>;

// One transverse channel of the constant-coupling cross-section problem
// -psi'' = mu^2 psi on (0,d) with psi' + i alpha psi = 0 at both ends.
//
// psi_j(x2) = c_cos * cos(mu x2) + c_sin * sin(mu x2),
// phi_j(x2) = conj(A * psi_j(x2)) is the adjoint eigenfunction.
struct TransverseMode {
  int j = 0;
  double mu = 0.0;
  Complex c_cos{1.0, 0.0};
  Complex c_sin{0.0, 0.0};
  Complex A{0.0, 0.0};

  Complex psi(double x2) const {
    return c_cos * std::cos(mu * x2) + c_sin * std::sin(mu * x2);
  }
  Complex dpsi(double x2) const {
    return mu * (-c_cos * std::sin(mu * x2) + c_sin * std::cos(mu * x2));
  }
  Complex phi(double x2) const { return std::conj(A * psi(x2)); }
};

struct TransverseFamily {
  double alpha = 0.0;
  double d = 0.0;
  std::vector<TransverseMode> modes;  // j = 0..J

  int J() const { return static_cast<int>(modes.size()) - 1; }
  const TransverseMode& mode(int j) const { return modes.at(static_cast<std::size_t>(j)); }
  double mu0_sq() const { return modes.front().mu * modes.front().mu; }
};

// Relative tolerance for the alpha*d/pi in Z degeneracy guard.
inline constexpr double kTolDegen = 1e-8;

// Builds channels j = 0..J.  mu_0 = min(|alpha|, pi/d), mu_1 = max(|alpha|, pi/d),
// mu_j = j pi / d for j >= 2.  Throws DegenerateCoupling when a normalization
// denominator mu_j^2 - alpha^2 (or sin(alpha d)) vanishes within tolerance,
// InvalidGeometry when d <= 0.
TransverseFamily build_family(double alpha, double d, int J);

// psi_j(x2) / phi_j(x2); throws OutOfDomain for x2 outside [0, d].
Complex eval_mode(const TransverseFamily& fam, int j, double x2);
Complex eval_adjoint_mode(const TransverseFamily& fam, int j, double x2);

// Matrix of inner products (phi_i^left, psi_j^right), i = 0..I, j = 0..Jm,
// inner product antilinear in the first factor, evaluated in closed form.
// Both families must share the same d.
Eigen::MatrixXcd overlap_matrix(const TransverseFamily& adjoint_family,
                                const TransverseFamily& family, int I, int Jm);

// max_{i,j <= J} |(phi_i, psi_j) - delta_ij| within one family.
double biorthonormality_residual(const TransverseFamily& fam);

// Closed-form integral of psi_a * psi_b over (0, d) (plain product, no
// conjugation); building block for the overlap matrix, exposed for tests.
Complex mode_product_integral(const TransverseMode& a, const TransverseMode& b, double d);

}  // namespace ptstrip
