#include "ptstrip/transverse.hpp"

#include <cmath>

namespace ptstrip {

namespace {

constexpr Complex kI{0.0, 1.0};

// sin(u d)/u and (1 - cos(u d))/u with series fallback near u = 0.
double sin_over(double u, double d) {
  const double ud = u * d;
  if (std::abs(ud) < 1e-4) {
    const double s = ud * ud;
    return d * (1.0 - s / 6.0 * (1.0 - s / 20.0));
  }
  return std::sin(ud) / u;
}

double one_minus_cos_over(double u, double d) {
  const double ud = u * d;
  if (std::abs(ud) < 1e-4) {
    const double s = ud * ud;
    return u * d * d * 0.5 * (1.0 - s / 12.0 * (1.0 - s / 30.0));
  }
  return (1.0 - std::cos(ud)) / u;
}

// Antiderivatives of trig products over (0, d).
double int_cos_cos(double a, double b, double d) {
  return 0.5 * (sin_over(a - b, d) + sin_over(a + b, d));
}
double int_sin_sin(double a, double b, double d) {
  return 0.5 * (sin_over(a - b, d) - sin_over(a + b, d));
}
// integral of sin(a x) cos(b x)
double int_sin_cos(double a, double b, double d) {
  return 0.5 * (one_minus_cos_over(a + b, d) + one_minus_cos_over(a - b, d));
}

}  // namespace

Complex mode_product_integral(const TransverseMode& a, const TransverseMode& b, double d) {
  return a.c_cos * b.c_cos * int_cos_cos(a.mu, b.mu, d) +
         a.c_sin * b.c_sin * int_sin_sin(a.mu, b.mu, d) +
         a.c_sin * b.c_cos * int_sin_cos(a.mu, b.mu, d) +
         a.c_cos * b.c_sin * int_sin_cos(b.mu, a.mu, d);
}

TransverseFamily build_family(double alpha, double d, int J) {
  if (d <= 0.0) throw InvalidGeometry("build_family: strip width d must be positive");
  if (J < 0) throw std::invalid_argument("build_family: J must be >= 0");

  const double pi_d = M_PI / d;
  if (alpha != 0.0) {
    // Degenerate when |alpha|^2 is within tol of any (k pi / d)^2, k >= 1.
    const double r = std::abs(alpha) / pi_d;
    const double k = std::max(1.0, std::round(r));
    if (std::abs(r * r - k * k) < kTolDegen)
      throw DegenerateCoupling("build_family: |alpha| d / pi = " + std::to_string(r) +
                               " is integral within tolerance");
  }

  TransverseFamily fam;
  fam.alpha = alpha;
  fam.d = d;
  fam.modes.reserve(static_cast<std::size_t>(J) + 1);

  const bool supercritical = std::abs(alpha) > pi_d;

  // A for the channel with mu = |alpha| (the plane wave e^{-i alpha x2}):
  // 2 i alpha / (1 - e^{-2 i alpha d}) = alpha e^{i alpha d} / sin(alpha d),
  // with analytic limit 1/d at alpha = 0.
  const Complex A_plane = (alpha == 0.0)
      ? Complex{1.0 / d, 0.0}
      : alpha * std::exp(kI * alpha * d) / std::sin(alpha * d);

  auto pi_channel = [&](int j, double mu) {
    TransverseMode m;
    m.j = j;
    m.mu = mu;
    m.c_cos = 1.0;
    m.c_sin = (mu == 0.0) ? Complex{0.0, 0.0} : -kI * alpha / mu;
    m.A = 2.0 * mu * mu / ((mu * mu - alpha * alpha) * d);
    return m;
  };
  auto plane_channel = [&](int j) {
    TransverseMode m;
    m.j = j;
    m.mu = std::abs(alpha);
    m.c_cos = 1.0;
    m.c_sin = (alpha == 0.0) ? Complex{0.0, 0.0}
                             : -kI * (alpha > 0.0 ? 1.0 : -1.0);
    m.A = A_plane;
    return m;
  };

  for (int j = 0; j <= J; ++j) {
    if (j == 0) {
      fam.modes.push_back(supercritical ? pi_channel(0, pi_d) : plane_channel(0));
    } else if (j == 1) {
      fam.modes.push_back(supercritical ? plane_channel(1) : pi_channel(1, pi_d));
    } else {
      fam.modes.push_back(pi_channel(j, j * pi_d));
    }
  }
  return fam;
}

Complex eval_mode(const TransverseFamily& fam, int j, double x2) {
  if (x2 < 0.0 || x2 > fam.d)
    throw OutOfDomain("eval_mode: x2 outside [0, d]");
  return fam.mode(j).psi(x2);
}

Complex eval_adjoint_mode(const TransverseFamily& fam, int j, double x2) {
  if (x2 < 0.0 || x2 > fam.d)
    throw OutOfDomain("eval_adjoint_mode: x2 outside [0, d]");
  return fam.mode(j).phi(x2);
}

Eigen::MatrixXcd overlap_matrix(const TransverseFamily& adjoint_family,
                                const TransverseFamily& family, int I, int Jm) {
  if (adjoint_family.d != family.d)
    throw MismatchedGeometry("overlap_matrix: families have different strip widths");
  if (I > adjoint_family.J() || Jm > family.J())
    throw std::invalid_argument("overlap_matrix: requested channel beyond built family");

  const double d = family.d;
  Eigen::MatrixXcd O(I + 1, Jm + 1);
  for (int i = 0; i <= I; ++i) {
    const TransverseMode& mi = adjoint_family.mode(i);
    for (int j = 0; j <= Jm; ++j) {
      // (phi_i, psi_j) = A_i * integral psi_i psi_j  (conj(phi_i) = A_i psi_i)
      O(i, j) = mi.A * mode_product_integral(mi, family.mode(j), d);
    }
  }
  return O;
}

double biorthonormality_residual(const TransverseFamily& fam) {
  const int J = fam.J();
  const Eigen::MatrixXcd O = overlap_matrix(fam, fam, J, J);
  return (O - Eigen::MatrixXcd::Identity(J + 1, J + 1)).cwiseAbs().maxCoeff();
}

}  // namespace ptstrip
