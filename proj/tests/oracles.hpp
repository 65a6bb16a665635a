#pragma once

// Test-only reference implementations, kept independent of the library code
// paths they check.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

using Complex = std::complex<double>;

// ---------------------------------------------------------------------------
// Fixed-order Gauss-Legendre rule on [a, b].

struct GaussLegendre {
  std::vector<double> nodes, weights;  // on [-1, 1]

  explicit GaussLegendre(int n) {
    // Golub-Welsch on the Jacobi matrix of the Legendre recurrence.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
      const double b = k / std::sqrt(4.0 * k * k - 1.0);
      J(k, k - 1) = b;
      J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    nodes.resize(n);
    weights.resize(n);
    for (int k = 0; k < n; ++k) {
      nodes[k] = es.eigenvalues()(k);
      const double v0 = es.eigenvectors()(0, k);
      weights[k] = 2.0 * v0 * v0;
    }
  }

  template <typename F>
  auto integrate(F&& f, double a, double b) const {
    using R = decltype(f(0.0));
    R acc{};
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t k = 0; k < nodes.size(); ++k)
      acc += weights[k] * f(mid + half * nodes[k]);
    return acc * half;
  }
};

// ---------------------------------------------------------------------------
// Characteristic polynomial of a small complex matrix by interpolation at
// scaled roots of unity, followed by Durand-Kerner root finding.  Used as the
// reference for the dense eigensolver.

inline std::vector<Complex> charpoly_roots(const Eigen::MatrixXcd& A) {
  const int n = static_cast<int>(A.rows());
  const double radius = std::max(1.0, 2.0 * A.norm());

  // p(z) = det(zI - A) is monic of degree n; interpolate the remainder
  // p(z) - z^n at n-th roots of unity scaled by `radius`.
  const int m = n;
  Eigen::MatrixXcd V(m, m);
  Eigen::VectorXcd rhs(m);
  for (int k = 0; k < m; ++k) {
    const double th = 2.0 * M_PI * k / m;
    const Complex z = radius * Complex{std::cos(th), std::sin(th)};
    Eigen::MatrixXcd B = z * Eigen::MatrixXcd::Identity(n, n) - A;
    const Complex det = Eigen::PartialPivLU<Eigen::MatrixXcd>(B).determinant();
    rhs(k) = det - std::pow(z, n);
    Complex p{1.0, 0.0};
    for (int j = 0; j < m; ++j) {
      V(k, j) = p;
      p *= z;
    }
  }
  Eigen::VectorXcd coeff = V.fullPivLu().solve(rhs);  // c0..c_{n-1}

  // Durand-Kerner on z^n + c_{n-1} z^{n-1} + ... + c0.
  auto eval = [&](Complex z) {
    Complex p{1.0, 0.0};
    for (int j = n - 1; j >= 0; --j) p = p * z + coeff(j);
    return p;
  };
  std::vector<Complex> roots(n);
  for (int k = 0; k < n; ++k) {
    const double th = 2.0 * M_PI * k / n + 0.4;
    roots[k] = 0.7 * radius * Complex{std::cos(th), std::sin(th)};
  }
  for (int iter = 0; iter < 500; ++iter) {
    double move = 0.0;
    for (int k = 0; k < n; ++k) {
      Complex denom{1.0, 0.0};
      for (int j = 0; j < n; ++j)
        if (j != k) denom *= roots[k] - roots[j];
      const Complex delta = eval(roots[k]) / denom;
      roots[k] -= delta;
      move = std::max(move, std::abs(delta));
    }
    if (move < 1e-14 * radius) break;
  }
  return roots;
}

// Greedy pairing distance between two eigenvalue multisets.
inline double spectrum_distance(std::vector<Complex> a, std::vector<Complex> b) {
  double worst = 0.0;
  for (const Complex& x : a) {
    double best = 1e300;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const double dist = std::abs(x - b[i]);
      if (dist < best) {
        best = dist;
        arg = i;
      }
    }
    worst = std::max(worst, best);
    if (!b.empty()) b.erase(b.begin() + static_cast<std::ptrdiff_t>(arg));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Winding number of f around a rectangle, by adaptive phase tracking.

inline int winding_number(const std::function<Complex(Complex)>& f, double re_lo,
                          double re_hi, double im_lo, double im_hi,
                          int samples_per_edge = 64) {
  std::vector<Complex> pts;
  auto edge = [&](Complex a, Complex b) {
    for (int k = 0; k < samples_per_edge; ++k)
      pts.push_back(a + (b - a) * (static_cast<double>(k) / samples_per_edge));
  };
  const Complex c1{re_lo, im_lo}, c2{re_hi, im_lo}, c3{re_hi, im_hi}, c4{re_lo, im_hi};
  edge(c1, c2);
  edge(c2, c3);
  edge(c3, c4);
  edge(c4, c1);
  pts.push_back(c1);

  double total = 0.0;
  Complex prev = f(pts[0]);
  for (std::size_t k = 1; k < pts.size(); ++k) {
    Complex cur = f(pts[k]);
    double dphi = std::arg(cur / prev);
    // refine if the phase step is too coarse
    if (std::abs(dphi) > M_PI / 2) {
      Complex a = pts[k - 1], b = pts[k], fa = prev;
      for (int depth = 0; depth < 24 && std::abs(std::arg(cur / fa)) > M_PI / 2; ++depth) {
        // bisect repeatedly, accumulating as we go
        Complex mid = 0.5 * (a + b);
        Complex fm = f(mid);
        total += std::arg(fm / fa);
        a = mid;
        fa = fm;
      }
      dphi = std::arg(cur / fa);
    }
    total += dphi;
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2.0 * M_PI)));
}

}  // namespace oracles
