#include "ptstrip/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ptstrip/errors.hpp"
#include "ptstrip/quadrature.hpp"

namespace ptstrip {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

void check_not_degenerate(double alpha0, double d) {
  if (alpha0 == 0.0) return;
  const double r = std::abs(alpha0) * d / M_PI;
  const double k = std::max(1.0, std::round(r));
  if (std::abs(r * r - k * k) < 1e-8)
    throw DegenerateCoupling("weak coupling: alpha0 d / pi is integral within tolerance");
}

// Shift polynomial coefficients: p(u + s) = sum p_shift[k] u^k.
std::vector<double> shift_poly(const std::vector<double>& p, double s) {
  std::vector<double> out(p.size(), 0.0);
  for (std::size_t m = 0; m < p.size(); ++m) {
    // p[m] (u + s)^m = p[m] sum_k C(m,k) s^(m-k) u^k
    double binom = 1.0;
    std::vector<double> spow(m + 1, 1.0);
    for (std::size_t k = 1; k <= m; ++k) spow[k] = spow[k - 1] * s;
    for (std::size_t k = 0; k <= m; ++k) {
      out[k] += p[m] * binom * spow[m - k];
      binom = binom * static_cast<double>(m - k) / static_cast<double>(k + 1);
    }
  }
  return out;
}

// Gaussian moments: integral of u^k exp(-u^2/w) over R.
double gauss_moment(int k, double w) {
  if (k % 2 == 1) return 0.0;
  return std::pow(w, 0.5 * (k + 1)) * std::tgamma(0.5 * (k + 1));
}

std::vector<double> shape_breaks(const BetaShape& beta) {
  std::vector<double> br;
  if (beta.kind == BetaShape::Kind::PiecewiseConstant) {
    for (const auto& s : beta.pc.steps) {
      br.push_back(s.lo);
      br.push_back(s.hi);
    }
  }
  return br;
}

void shape_bounds(const BetaShape& beta, double& lo, double& hi) {
  if (beta.kind == BetaShape::Kind::GaussianPoly) {
    const double R = beta.gp.support_radius();
    lo = beta.gp.shift - R;
    hi = beta.gp.shift + R;
  } else {
    lo = 1e300;
    hi = -1e300;
    for (const auto& s : beta.pc.steps) {
      lo = std::min(lo, s.lo);
      hi = std::max(hi, s.hi);
    }
  }
}

template <typename F>
double integrate_with_breaks(F&& f, double lo, double hi, std::vector<double> breaks) {
  breaks.push_back(lo);
  breaks.push_back(hi);
  std::sort(breaks.begin(), breaks.end());
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double a = std::clamp(breaks[k], lo, hi);
    const double b = std::clamp(breaks[k + 1], lo, hi);
    if (b > a) acc += integrate(f, a, b);
  }
  return acc;
}

// --- Fourier samples of a gaussian_poly shape -------------------------------
//
// |beta_hat(xi)|^2 on a fixed Gauss-Legendre grid over [0, Xi]; gives
// <beta v_j> = (1/pi) int_0^inf |beta_hat|^2 / (kappa_j^2 + xi^2) dxi for
// every channel from one set of samples.

struct FourierSamples {
  Eigen::ArrayXd xi, weight, abs2;
};

std::pair<Eigen::ArrayXd, Eigen::ArrayXd> gauss_legendre(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  Eigen::ArrayXd x = es.eigenvalues().array();
  Eigen::ArrayXd w(n);
  for (int k = 0; k < n; ++k) {
    const double v0 = es.eigenvectors()(0, k);
    w(k) = 2.0 * v0 * v0;
  }
  return {x, w};
}

FourierSamples fourier_samples(const GaussianPoly& gp) {
  static const auto rule = gauss_legendre(256);
  const double Xi = std::sqrt(150.0 / gp.w);

  // polynomial factors q_k of the transform: q_0 = 1,
  // q_k = i (q_{k-1}' - (w xi / 2) q_{k-1})
  const std::vector<double> ps = shift_poly(gp.poly, gp.shift);
  const std::size_t K = ps.size();
  std::vector<std::vector<std::complex<double>>> q(K);
  if (K > 0) q[0] = {1.0};
  for (std::size_t k = 1; k < K; ++k) {
    const auto& prev = q[k - 1];
    std::vector<std::complex<double>> cur(prev.size() + 1, 0.0);
    for (std::size_t m = 1; m < prev.size(); ++m)
      cur[m - 1] += kI * (static_cast<double>(m) * prev[m]);
    for (std::size_t m = 0; m < prev.size(); ++m)
      cur[m + 1] -= kI * (gp.w * 0.5) * prev[m];
    q[k] = std::move(cur);
  }

  FourierSamples fs;
  const int n = static_cast<int>(rule.first.size());
  fs.xi.resize(n);
  fs.weight.resize(n);
  fs.abs2.resize(n);
  const double pref = M_PI * gp.w;  // |sqrt(pi w)|^2
  for (int k = 0; k < n; ++k) {
    const double xi = 0.5 * Xi * (rule.first(k) + 1.0);
    fs.xi(k) = xi;
    fs.weight(k) = 0.5 * Xi * rule.second(k);
    std::complex<double> sum = 0.0;
    for (std::size_t m = 0; m < K; ++m) {
      std::complex<double> qv = 0.0;
      for (std::size_t c = q[m].size(); c-- > 0;) qv = qv * xi + q[m][c];
      sum += ps[m] * qv;
    }
    fs.abs2(k) = pref * std::exp(-gp.w * xi * xi * 0.5) * std::norm(sum);
  }
  return fs;
}

double beta_v_from_samples(const FourierSamples& fs, double kappa) {
  const double k2 = kappa * kappa;
  return (fs.weight * fs.abs2 / (k2 + fs.xi.square())).sum() / M_PI;
}

// --- piecewise closed forms -------------------------------------------------

// integral over P x Q of exp(-kappa |x - t|); steps are disjoint or equal
double exp_kernel_box(const Step& P, const Step& Q, double kappa) {
  if (P.lo == Q.lo && P.hi == Q.hi) {
    const double len = P.hi - P.lo;
    return 2.0 * (len / kappa - (1.0 - std::exp(-kappa * len)) / (kappa * kappa));
  }
  const Step& R = (P.lo >= Q.hi) ? P : Q;
  const Step& L = (P.lo >= Q.hi) ? Q : P;
  // all exponents <= 0
  return (std::exp(-kappa * (R.lo - L.hi)) - std::exp(-kappa * (R.hi - L.hi)) -
          std::exp(-kappa * (R.lo - L.lo)) + std::exp(-kappa * (R.hi - L.lo))) /
         (kappa * kappa);
}

// integral over P x Q of |x - t|
double abs_kernel_box(const Step& P, const Step& Q) {
  if (P.lo == Q.lo && P.hi == Q.hi) {
    const double len = P.hi - P.lo;
    return len * len * len / 3.0;
  }
  const double midP = 0.5 * (P.lo + P.hi), midQ = 0.5 * (Q.lo + Q.hi);
  return (P.hi - P.lo) * (Q.hi - Q.lo) * std::abs(midP - midQ);
}

// --- inverse-power tails ----------------------------------------------------

// sum_{m > M} m^{-p} by Euler-Maclaurin
double zeta_tail(double p, double M) {
  const double x = M + 1.0;
  const double f = std::pow(x, -p);
  return x * f / (p - 1.0) + 0.5 * f + (p / 12.0) * f / x -
         (p * (p + 1.0) * (p + 2.0) / 720.0) * f / (x * x * x);
}

// Fit j^2 c(j) ~ A + B u + C u^2 + D u^3 with u = Jref/j on the window.
struct TailModel {
  Eigen::Vector4d coef;
  double rms = 0.0;
};

TailModel fit_tail(const std::vector<double>& js, const std::vector<double>& cs,
                   double Jref) {
  const int n = static_cast<int>(js.size());
  Eigen::MatrixXd V(n, 4);
  Eigen::VectorXd rhs(n);
  for (int k = 0; k < n; ++k) {
    const double u = Jref / js[k];
    V(k, 0) = 1.0;
    V(k, 1) = u;
    V(k, 2) = u * u;
    V(k, 3) = u * u * u;
    rhs(k) = cs[k] * js[k] * js[k];
  }
  TailModel m;
  m.coef = V.colPivHouseholderQr().solve(rhs);
  m.rms = (V * m.coef - rhs).norm() / std::sqrt(static_cast<double>(n));
  return m;
}

// sum of the fitted c(j) over {j > J} restricted to a lattice:
// 0 = all integers, 1 = odd, 2 = even.
double tail_sum(const TailModel& m, double Jref, double J, int lattice) {
  auto S = [&](double p) {
    switch (lattice) {
      case 2: return std::pow(2.0, -p) * zeta_tail(p, J / 2.0);
      case 1: return zeta_tail(p, J) - std::pow(2.0, -p) * zeta_tail(p, J / 2.0);
      default: return zeta_tail(p, J);
    }
  };
  return m.coef(0) * S(2.0) + m.coef(1) * Jref * S(3.0) +
         m.coef(2) * Jref * Jref * S(4.0) + m.coef(3) * Jref * Jref * Jref * S(5.0);
}

}  // namespace

std::string to_string(Case c) {
  switch (c) {
    case Case::A: return "A";
    case Case::B1: return "B1";
    case Case::B2: return "B2";
    case Case::B3: return "B3";
    case Case::B4: return "B4";
    case Case::C1: return "C1";
    case Case::C2: return "C2";
  }
  return "?";
}

double moment(const BetaShape& beta) {
  if (beta.kind == BetaShape::Kind::PiecewiseConstant) {
    double acc = 0.0;
    for (const auto& s : beta.pc.steps) acc += s.value * (s.hi - s.lo);
    return acc;
  }
  const auto ps = shift_poly(beta.gp.poly, beta.gp.shift);
  double acc = 0.0;
  for (std::size_t k = 0; k < ps.size(); ++k)
    acc += ps[k] * gauss_moment(static_cast<int>(k), beta.gp.w);
  return acc;
}

double beta_v_moment(const BetaShape& beta, double kappa) {
  if (beta.kind == BetaShape::Kind::PiecewiseConstant) {
    const auto& st = beta.pc.steps;
    double acc = 0.0;
    for (const auto& P : st)
      for (const auto& Q : st) acc += P.value * Q.value * exp_kernel_box(P, Q, kappa);
    return acc / (2.0 * kappa);
  }
  return beta_v_from_samples(fourier_samples(beta.gp), kappa);
}

double beta_v0_moment(const BetaShape& beta) {
  if (beta.kind == BetaShape::Kind::PiecewiseConstant) {
    const auto& st = beta.pc.steps;
    double acc = 0.0;
    for (const auto& P : st)
      for (const auto& Q : st) acc += P.value * Q.value * abs_kernel_box(P, Q);
    return -0.5 * acc;
  }
  double lo, hi;
  shape_bounds(beta, lo, hi);
  return integrate(
      [&](double x) { return beta(x) * v_function(beta, 0, 0.0, 0.0, x); }, lo, hi, 1e-11);
}

double v_function(const BetaShape& beta, int j, double mu_j, double mu0, double x1) {
  double lo, hi;
  shape_bounds(beta, lo, hi);
  auto breaks = shape_breaks(beta);
  breaks.push_back(x1);

  if (j == 0) {
    return -0.5 * integrate_with_breaks(
                      [&](double t) { return std::abs(x1 - t) * beta(t); }, lo, hi, breaks);
  }
  if (mu_j <= mu0) throw InvalidChannel("v_function: needs mu_j > mu0 for j >= 1");
  const double kappa = std::sqrt(mu_j * mu_j - mu0 * mu0);
  const double val = integrate_with_breaks(
      [&](double t) { return std::exp(-kappa * std::abs(x1 - t)) * beta(t); }, lo, hi,
      breaks);
  return val / (2.0 * kappa);
}

namespace {

// Smallest decay scale of the kink exponentials exp(-kappa u) appearing in
// the step-shape channel moments; the inverse-power tail model is valid only
// once these are dead.
double min_kink_scale(const PiecewiseConstant& pc) {
  double u = 1e300;
  for (const auto& p : pc.steps) {
    u = std::min(u, p.hi - p.lo);
    for (const auto& q : pc.steps) {
      const double gap = std::max(p.lo, q.lo) - std::min(p.hi, q.hi);
      if (gap > 0.0) u = std::min(u, gap);
    }
  }
  return u;
}

}  // namespace

TauResult tau_constant(const WeakCouplingInput& input) {
  check_not_degenerate(input.alpha0, input.d);
  const double a0 = input.alpha0, d = input.d;
  const double pi_d = M_PI / d;
  int J = std::max(32, input.series_cap - input.series_cap % 2);

  const bool gaussian = input.beta.kind == BetaShape::Kind::GaussianPoly;
  if (!gaussian) {
    // extend the directly summed range until exp(-kappa_J u_min) < 1e-18;
    // step-shape terms are closed-form, so the extension is cheap
    // the fit window starts at J/3, so the whole window must be clean
    const double u = min_kink_scale(input.beta.pc);
    const int need = static_cast<int>(std::ceil(42.0 / (pi_d * std::max(u, 1e-6))));
    J = std::min(std::max(J, 3 * need + (3 * need) % 2), 500000);
  }
  FourierSamples fs;
  if (gaussian) fs = fourier_samples(input.beta.gp);
  auto bv = [&](double kappa) {
    return gaussian ? beta_v_from_samples(fs, kappa) : beta_v_moment(input.beta, kappa);
  };

  TauResult out;

  if (input.subcritical()) {
    const double mu0 = std::abs(a0);
    const double Te = std::tan(0.5 * a0 * d);
    if (std::abs(Te) > 1e6 || std::abs(Te) < 1e-6)
      throw SeriesNotConverged("tau: tan(alpha0 d / 2) factor out of range");
    const double To = -1.0 / Te;

    std::vector<double> js, cs;
    double partial = 0.0, cj = 0.0;
    for (int j = 1; j <= J; ++j) {
      const double mu = j * pi_d;
      const double k2 = mu * mu - mu0 * mu0;
      cj = (mu * mu / k2) * bv(std::sqrt(k2));
      partial += (j % 2 == 0 ? Te : To) * cj;
      if (j >= J / 3 && j % 3 == 0) {
        js.push_back(j);
        cs.push_back(cj);
      }
    }
    const auto model = fit_tail(js, cs, J);
    const double tail = Te * tail_sum(model, J, J, 2) + To * tail_sum(model, J, J, 1);
    const double S = partial + tail;

    const double v0term = 2.0 * a0 * a0 * beta_v0_moment(input.beta);
    out.tau = v0term + (2.0 * a0 / d) * S;
    const double Tmax = std::max(std::abs(Te), std::abs(To));
    out.tail_estimate = std::abs(2.0 * a0 / d) *
                        (model.rms * Tmax * zeta_tail(2.0, J) + 4.0 * std::abs(cj) / J);
    const double scale =
        std::max({std::abs(out.tau), std::abs(v0term), std::abs(2.0 * a0 / d * S)});
    if (out.tail_estimate > 1e-6 * std::max(scale, 1e-300))
      throw SeriesNotConverged("tau: channel series tail estimate too large");
    return out;
  }

  // supercritical: mu0 = pi/d, mu1 = |alpha0|
  const double mu0 = pi_d, mu1 = std::abs(a0);
  const double gap = mu1 * mu1 - mu0 * mu0;
  const double cot = 1.0 / std::tan(0.5 * a0 * d);
  if (std::abs(cot) > 1e6)
    throw SeriesNotConverged("tau: cot(alpha0 d / 2) factor out of range");

  const double term1 =
      (2.0 * a0 * M_PI * M_PI * cot / (gap * d * d * d)) * bv(std::sqrt(gap));

  std::vector<double> js, cs;
  double partial = 0.0, sj = 0.0;
  for (int j = 1; j <= J; ++j) {
    const double mu2j = 2.0 * j * pi_d;
    const double kap2 = mu2j * mu2j - mu0 * mu0;
    sj = mu2j * mu2j * bv(std::sqrt(kap2)) / (mu2j * mu2j - mu1 * mu1);
    partial += sj;
    if (j >= J / 3 && j % 3 == 0) {
      js.push_back(j);
      cs.push_back(sj);
    }
  }
  const auto model = fit_tail(js, cs, J);
  const double S = partial + tail_sum(model, J, J, 0);
  const double pref2 = 8.0 * M_PI * M_PI / (gap * d * d * d * d);

  out.tau = term1 + pref2 * S;
  out.tail_estimate =
      std::abs(pref2) * (model.rms * zeta_tail(2.0, J) + 4.0 * std::abs(sj) / J);
  const double scale = std::max({std::abs(out.tau), std::abs(term1), std::abs(pref2 * S)});
  if (out.tail_estimate > 1e-6 * std::max(scale, 1e-300))
    throw SeriesNotConverged("tau: channel series tail estimate too large");
  return out;
}

CaseLabel classify(const WeakCouplingInput& input) {
  CaseLabel out;
  out.beta_moment = moment(input.beta);
  if (input.alpha0 == 0.0) {
    out.label = Case::A;
    return out;
  }
  if (input.subcritical()) {
    if (std::abs(out.beta_moment) >= 1e-10) {
      out.label = input.alpha0 * out.beta_moment < 0.0 ? Case::B1 : Case::B2;
      if (out.label == Case::B1) {
        out.tau = tau_constant(input).tau;  // used by the eps^3 prediction
        out.tau_used = true;
      }
      return out;
    }
    out.tau = tau_constant(input).tau;
    out.tau_used = true;
    out.label = out.tau > 0.0 ? Case::B3 : Case::B4;
    return out;
  }
  check_not_degenerate(input.alpha0, input.d);
  out.tau = tau_constant(input).tau;
  out.tau_used = true;
  out.label = out.tau > 0.0 ? Case::C1 : Case::C2;
  return out;
}

double lambda_prediction(const WeakCouplingInput& input, double epsilon,
                         PredictionOrder order) {
  const CaseLabel cl = classify(input);
  const double mu0sq = input.mu0_sq();
  switch (cl.label) {
    case Case::B1: {
      const double m = cl.beta_moment;
      const double e2 = mu0sq - epsilon * epsilon * input.alpha0 * input.alpha0 * m * m;
      if (order == PredictionOrder::eps2) return e2;
      if (order == PredictionOrder::eps3)
        return e2 + 2.0 * epsilon * epsilon * epsilon * input.alpha0 * cl.tau * m;
      throw std::invalid_argument("lambda_prediction: B1 admits eps2 or eps3 only");
    }
    case Case::B3:
    case Case::C1: {
      if (order != PredictionOrder::eps4)
        throw std::invalid_argument("lambda_prediction: critical cases use the eps4 formula");
      const double e2 = epsilon * epsilon;
      return mu0sq - e2 * e2 * cl.tau * cl.tau;
    }
    default:
      throw NoEigenvaluePredicted("lambda_prediction: case " + to_string(cl.label) +
                                  " has no eigenvalue converging to the threshold");
  }
}

}  // namespace ptstrip
