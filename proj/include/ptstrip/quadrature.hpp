#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ptstrip {

// Adaptive Gauss-Kronrod on [a, b], relative tolerance ~1e-12.
template <typename F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-12) {
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      std::forward<F>(f), a, b, 12, rel_tol);
}

// Same, split at an interior kink location c (clamped to [a, b]).
template <typename F>
double integrate_split(F&& f, double a, double b, double c, double rel_tol = 1e-12) {
  if (c <= a || c >= b) return integrate(f, a, b, rel_tol);
  return integrate(f, a, c, rel_tol) + integrate(f, c, b, rel_tol);
}

}  // namespace ptstrip
