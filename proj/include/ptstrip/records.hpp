#pragma once

#include <complex>
#include <string>

namespace ptstrip {

// One computed eigenvalue with its provenance and quality data.
struct EigenvalueRecord {
  std::complex<double> lambda;
  std::string solver;        // "modematch", "colloc-fourier", "colloc-hermite"
  int n1 = 0;                // truncation N, or N1
  int n2 = 0;                // 0, or N2
  double residual = 0.0;     // null-vector residual (modematch) or filter distance
  double convergence = 0.0;  // |lambda_coarse - lambda_fine| across resolutions
  bool converged = false;
  bool conjugate_paired = false;  // partner conj(lambda) present (or real)
};

}  // namespace ptstrip
