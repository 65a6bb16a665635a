#pragma once

#include <cmath>
#include <vector>

#include "ptstrip/errors.hpp"

namespace ptstrip {

// Perturbation shapes beta(x1) entering alpha(x1) = alpha0 + eps * beta(x1).
//
// GaussianPoly:  beta(x) = (sum_m p[m] x^m) * exp(-(x - shift)^2 / w)
// PiecewiseConstant: finitely many steps, zero outside; used for the
// square-well panels where the moments have closed forms.

struct GaussianPoly {
  std::vector<double> poly;  // p[0] + p[1] x + ...
  double w = 1.0;            // envelope width parameter, > 0
  double shift = 0.0;

  double operator()(double x) const {
    double p = 0.0;
    for (std::size_t m = poly.size(); m-- > 0;) p = p * x + poly[m];
    const double u = x - shift;
    return p * std::exp(-u * u / w);
  }
  // effective support half-width: envelope below ~1e-14 outside
  double support_radius() const { return 8.0 * std::sqrt(w); }
};

struct Step {
  double lo = 0.0, hi = 0.0, value = 0.0;  // beta = value on (lo, hi)
};

struct PiecewiseConstant {
  std::vector<Step> steps;  // disjoint, sorted by lo

  double operator()(double x) const {
    for (const auto& s : steps)
      if (x > s.lo && x < s.hi) return s.value;
    return 0.0;
  }
  double support_radius() const {
    double r = 0.0;
    for (const auto& s : steps) r = std::max({r, std::abs(s.lo), std::abs(s.hi)});
    return r;
  }
};

struct BetaShape {
  enum class Kind { GaussianPoly, PiecewiseConstant } kind = Kind::GaussianPoly;
  GaussianPoly gp;
  PiecewiseConstant pc;

  static BetaShape gaussian_poly(std::vector<double> poly, double w, double shift = 0.0) {
    if (w <= 0.0) throw InvalidGeometry("gaussian_poly: envelope width must be positive");
    BetaShape b;
    b.kind = Kind::GaussianPoly;
    b.gp = GaussianPoly{std::move(poly), w, shift};
    return b;
  }
  static BetaShape piecewise(std::vector<Step> steps) {
    BetaShape b;
    b.kind = Kind::PiecewiseConstant;
    b.pc = PiecewiseConstant{std::move(steps)};
    return b;
  }
  double operator()(double x) const {
    return kind == Kind::GaussianPoly ? gp(x) : pc(x);
  }
  double support_radius() const {
    return kind == Kind::GaussianPoly ? gp.support_radius() : pc.support_radius();
  }
};

// alpha(x1) = alpha0 + epsilon * beta(x1), beta bounded with decay.
struct SmoothProfile {
  double alpha0 = 0.0;
  double epsilon = 0.0;
  BetaShape beta;
  double d = 1.0;  // strip width

  double alpha(double x1) const { return alpha0 + epsilon * beta(x1); }
  double mu0() const;
  double mu0_sq() const { const double m = mu0(); return m * m; }
};

inline double SmoothProfile::mu0() const {
  return std::min(std::abs(alpha0), M_PI / d);
}

// Piecewise-constant coupling: alpha0 outside (L_minus, L_plus),
// alpha_minus on (L_minus, 0), alpha_plus on (0, L_plus).
struct SquareWellProfile {
  double alpha0 = 0.0;
  double alpha_minus = 0.0;
  double alpha_plus = 0.0;
  double L_minus = -1.0;  // < 0
  double L_plus = 1.0;    // > 0
  double d = 1.0;

  void validate() const {
    if (d <= 0.0) throw InvalidGeometry("square well: d must be positive");
    if (!(L_minus < 0.0 && L_plus > 0.0))
      throw InvalidGeometry("square well: need L_minus < 0 < L_plus");
  }
  bool is_symmetric() const {
    return alpha_plus == alpha_minus && L_plus == -L_minus;
  }
  double alpha(double x1) const {
    if (x1 < L_minus || x1 > L_plus) return alpha0;
    return x1 < 0.0 ? alpha_minus : alpha_plus;
  }
  double mu0() const { return std::min(std::abs(alpha0), M_PI / d); }
  double mu0_sq() const { const double m = mu0(); return m * m; }
};

}  // namespace ptstrip
