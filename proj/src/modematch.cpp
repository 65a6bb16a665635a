#include "ptstrip/modematch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "ptstrip/errors.hpp"

namespace ptstrip {

namespace {

constexpr Complex kI{0.0, 1.0};

struct Context {
  SquareWellProfile profile;
  int N = 0;
  TransverseFamily fam0, famP, famM;
  Eigen::MatrixXcd OP, OM;  // (phi_i^0, psi_j^pm)
  double tol_branch = 0.0;
};

Context make_context(const SquareWellProfile& profile, int N) {
  profile.validate();
  if (N < 0) throw std::invalid_argument("modematch: truncation N must be >= 0");
  Context ctx;
  ctx.profile = profile;
  ctx.N = N;
  ctx.fam0 = build_family(profile.alpha0, profile.d, N);
  ctx.famP = build_family(profile.alpha_plus, profile.d, N);
  ctx.famM = build_family(profile.alpha_minus, profile.d, N);
  ctx.OP = overlap_matrix(ctx.fam0, ctx.famP, N, N);
  ctx.OM = overlap_matrix(ctx.fam0, ctx.famM, N, N);
  const double pi_d = M_PI / profile.d;
  ctx.tol_branch = 1e-6 * pi_d * pi_d;
  return ctx;
}

void check_thresholds(const Context& ctx, Complex lambda) {
  for (const auto& m : ctx.fam0.modes) {
    const double mu2 = m.mu * m.mu;
    if (std::abs(lambda - mu2) < ctx.tol_branch)
      throw ThresholdProximity("modematch: lambda within guard radius of a branch point");
  }
}

// gamma_i = sqrt((mu_i^0)^2 - lambda), principal branch (Re >= 0).
Eigen::VectorXcd decay_rates(const Context& ctx, Complex lambda) {
  Eigen::VectorXcd g(ctx.N + 1);
  for (int i = 0; i <= ctx.N; ++i) {
    const double mu = ctx.fam0.mode(i).mu;
    g(i) = std::sqrt(Complex{mu * mu} - lambda);
  }
  return g;
}

// k_j = sqrt(lambda - (mu_j^pm)^2), principal branch (the printed system).
Eigen::VectorXcd inner_rates(const TransverseFamily& fam, Complex lambda) {
  Eigen::VectorXcd k(fam.J() + 1);
  for (int j = 0; j <= fam.J(); ++j) {
    const double mu = fam.mode(j).mu;
    k(j) = std::sqrt(lambda - Complex{mu * mu});
  }
  return k;
}

// Branch-normalized rates: Im >= 0 (Re >= 0 when real).  The determinant is
// even under per-channel branch flips, so this choice is free; it keeps
// every exponential in the conditioned assembly bounded by one.
Eigen::VectorXcd canonical_rates(const TransverseFamily& fam, Complex lambda) {
  Eigen::VectorXcd k = inner_rates(fam, lambda);
  for (int j = 0; j < k.size(); ++j)
    if (k(j).imag() < 0.0) k(j) = -k(j);
  return k;
}

// the printed block system
MatchSystem fill_system(const Context& ctx, Complex lambda) {
  const int n = ctx.N + 1;
  MatchSystem s;
  s.N = ctx.N;
  s.lambda = lambda;

  const Eigen::VectorXcd gamma = decay_rates(ctx, lambda);
  const Eigen::VectorXcd kP = inner_rates(ctx.famP, lambda);
  const Eigen::VectorXcd kM = inner_rates(ctx.famM, lambda);
  const double Lp = ctx.profile.L_plus, Lm = ctx.profile.L_minus;

  s.m11 = ctx.OP;
  s.m12 = -ctx.OM;
  s.m21.resize(n, n);
  s.m23.resize(n, n);
  s.m33.resize(n, n);
  s.m34.resize(n, n);
  s.m42.resize(n, n);
  s.m44.resize(n, n);

  for (int j = 0; j < n; ++j) {
    const Complex cp = std::cos(kP(j) * Lp), sp = std::sin(kP(j) * Lp);
    const Complex cm = std::cos(kM(j) * Lm), sm = std::sin(kM(j) * Lm);
    for (int i = 0; i < n; ++i) {
      s.m21(i, j) = (gamma(i) * cp - kP(j) * sp) * ctx.OP(i, j);
      s.m23(i, j) = (gamma(i) * sp + kP(j) * cp) * ctx.OP(i, j);
      s.m42(i, j) = (gamma(i) * cm + kM(j) * sm) * ctx.OM(i, j);
      s.m44(i, j) = (gamma(i) * sm - kM(j) * cm) * ctx.OM(i, j);
    }
    s.m33.col(j) = kP(j) * ctx.OP.col(j);
    s.m34.col(j) = -kM(j) * ctx.OM.col(j);
  }
  return s;
}

// Conditioned assembly.  The central regions are expanded in the interface-
// normalized exponential pair per channel,
//   phi_j^+(x1) = u_j e^{i k_j x1} + w_j e^{-i k_j (x1 - L_+)},
//   phi_j^-(x1) = r_j e^{i k_j (x1 - L_-)} + t_j e^{-i k_j x1},
// whose values stay bounded by one throughout the region.  The {cos, sin}
// unknowns of the printed system are an exactly known 2x2 transform away,
// det_printed = det_cond / prod_j (-4 E_j G_j) with E_j = e^{i kP_j L_+} and
// G_j = e^{-i kM_j L_-}; the printed form degrades for strongly evanescent
// channels (both basis functions collapse onto the growing exponential).
struct CondSystem {
  Eigen::MatrixXcd M;     // columns ordered (u, r, w, t)
  Eigen::VectorXcd E, G;  // |E|, |G| <= 1
  Eigen::VectorXcd kP, kM, gamma;
};

CondSystem fill_conditioned(const Context& ctx, Complex lambda) {
  const int n = ctx.N + 1;
  CondSystem s;
  s.gamma = decay_rates(ctx, lambda);
  s.kP = canonical_rates(ctx.famP, lambda);
  s.kM = canonical_rates(ctx.famM, lambda);
  s.E.resize(n);
  s.G.resize(n);
  s.M = Eigen::MatrixXcd::Zero(4 * n, 4 * n);

  const double Lp = ctx.profile.L_plus, Lm = ctx.profile.L_minus;
  for (int j = 0; j < n; ++j) {
    s.E(j) = std::exp(kI * s.kP(j) * Lp);
    s.G(j) = std::exp(-kI * s.kM(j) * Lm);
    const Complex ikP = kI * s.kP(j), ikM = kI * s.kM(j);
    for (int i = 0; i < n; ++i) {
      const Complex op = ctx.OP(i, j), om = ctx.OM(i, j);
      // value at x1 = 0
      s.M(i, j) = op;                       // u
      s.M(i, n + j) = -s.G(j) * om;         // r
      s.M(i, 2 * n + j) = s.E(j) * op;      // w
      s.M(i, 3 * n + j) = -om;              // t
      // matching at L_+ (asymptotic coefficients eliminated)
      s.M(n + i, j) = (s.gamma(i) + ikP) * s.E(j) * op;
      s.M(n + i, 2 * n + j) = (s.gamma(i) - ikP) * op;
      // derivative at x1 = 0
      s.M(2 * n + i, j) = ikP * op;
      s.M(2 * n + i, n + j) = -ikM * s.G(j) * om;
      s.M(2 * n + i, 2 * n + j) = -ikP * s.E(j) * op;
      s.M(2 * n + i, 3 * n + j) = ikM * om;
      // matching at L_-
      s.M(3 * n + i, n + j) = (s.gamma(i) - ikM) * om;
      s.M(3 * n + i, 3 * n + j) = (s.gamma(i) + ikM) * s.G(j) * om;
    }
  }
  return s;
}

ScaledDet logdet_of(const Eigen::MatrixXcd& M) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
  ScaledDet out;
  out.log_mag = 0.0;
  out.phase = static_cast<double>(lu.permutationP().determinant());
  for (int i = 0; i < M.rows(); ++i) {
    const Complex u = lu.matrixLU()(i, i);
    const double a = std::abs(u);
    if (a == 0.0) {
      out.log_mag = -std::numeric_limits<double>::infinity();
      out.phase = 1.0;
      return out;
    }
    out.log_mag += std::log(a);
    out.phase *= u / a;
  }
  return out;
}

void div_scaled(ScaledDet& det, Complex z) {
  const double a = std::abs(z);
  det.log_mag -= std::log(a);
  det.phase *= a / z;
}

// Root-finding function: the printed determinant (recovered exactly from the
// conditioned one) divided by the channel rates.  Even under every branch
// flip, hence single-valued and analytic below the outer thresholds; its
// zeros are the matching eigenvalue candidates (the spurious k_j = 0 factors
// are divided out).
ScaledDet reduced_det(const Context& ctx, Complex lambda) {
  check_thresholds(ctx, lambda);
  const CondSystem s = fill_conditioned(ctx, lambda);
  ScaledDet det = logdet_of(s.M);
  for (int j = 0; j <= ctx.N; ++j) {
    div_scaled(det, -4.0 * s.E(j) * s.G(j));
    for (const Complex k : {s.kP(j), s.kM(j)}) {
      if (std::abs(k) == 0.0) continue;  // det vanishes there too; leave as is
      div_scaled(det, k);
    }
  }
  return det;
}

// Recording guard: within a hair of an inner threshold (mu_j^pm)^2 the
// reduced determinant is a 0/0 quotient and floating-point noise can fake a
// zero there.
bool near_inner_threshold(const Context& ctx, Complex z) {
  const double w = 1e-7 * std::max(1.0, std::abs(z));
  for (const auto* fam : {&ctx.famP, &ctx.famM})
    for (const auto& m : fam->modes)
      if (std::abs(z - Complex{m.mu * m.mu}) < w) return true;
  return false;
}

Complex det_ratio(const ScaledDet& num, const ScaledDet& den) {
  return std::exp(num.log_mag - den.log_mag) * num.phase / den.phase;
}

// --- winding along a rectangle ----------------------------------------------

struct WindingResult {
  bool ok = false;
  int count = 0;
};

WindingResult winding(const Context& ctx, const SearchRegion& r, int base_samples = 24) {
  std::vector<Complex> pts;
  const Complex c1{r.re_lo, r.im_lo}, c2{r.re_hi, r.im_lo}, c3{r.re_hi, r.im_hi},
      c4{r.re_lo, r.im_hi};
  auto edge = [&](Complex a, Complex b) {
    const double len = std::abs(b - a);
    const double scale = std::max({r.re_hi - r.re_lo, r.im_hi - r.im_lo, 1e-12});
    const int n = std::max(4, static_cast<int>(std::ceil(base_samples * len / scale)));
    for (int k = 0; k < n; ++k) pts.push_back(a + (b - a) * (static_cast<double>(k) / n));
  };
  edge(c1, c2);
  edge(c2, c3);
  edge(c3, c4);
  edge(c4, c1);
  pts.push_back(c1);

  double total = 0.0;
  ScaledDet prev = reduced_det(ctx, pts[0]);
  for (std::size_t k = 1; k < pts.size(); ++k) {
    const ScaledDet cur = reduced_det(ctx, pts[k]);
    double dphi = std::arg(cur.phase / prev.phase);
    if (std::abs(dphi) > 0.5 * M_PI) {
      // resolve the segment by marching bisected midpoints
      Complex a = pts[k - 1];
      ScaledDet fa = prev;
      int depth = 0;
      for (; depth < 60; ++depth) {
        if (std::abs(std::arg(cur.phase / fa.phase)) <= 0.5 * M_PI) break;
        Complex m = a + 0.5 * (pts[k] - a);
        ScaledDet fm = reduced_det(ctx, m);
        int inner = 0;
        while (std::abs(std::arg(fm.phase / fa.phase)) > 0.5 * M_PI && inner < 30) {
          m = a + 0.5 * (m - a);
          fm = reduced_det(ctx, m);
          ++inner;
        }
        if (inner >= 30) return {};
        total += std::arg(fm.phase / fa.phase);
        a = m;
        fa = fm;
      }
      if (depth >= 60) return {};
      dphi = std::arg(cur.phase / fa.phase);
    }
    total += dphi;
    prev = cur;
  }
  const double turns = total / (2.0 * M_PI);
  const int count = static_cast<int>(std::lround(turns));
  if (std::abs(turns - count) > 0.25) return {};
  return {true, count};
}

// --- Newton polish -----------------------------------------------------------

std::optional<Complex> newton_polish(const Context& ctx, Complex z, const SearchRegion& region,
                                     double region_slack) {
  for (int iter = 0; iter < kMaxNewtonIter; ++iter) {
    const double scale = std::max(1.0, std::abs(z));
    const double h = 1e-7 * scale;
    ScaledDet f0, fp, fm;
    try {
      f0 = reduced_det(ctx, z);
      fp = reduced_det(ctx, z + h);
      fm = reduced_det(ctx, z - h);
    } catch (const ThresholdProximity&) {
      return std::nullopt;
    }
    const Complex rp = det_ratio(fp, f0), rm = det_ratio(fm, f0);
    const Complex denom = rp - rm;
    if (!(std::abs(denom) > 0.0) || !std::isfinite(std::abs(denom))) return std::nullopt;
    const Complex dz = -2.0 * h / denom;
    z += dz;
    if (!region.contains(z, region_slack + 0.05 * scale)) return std::nullopt;
    if (std::abs(dz) < 1e-11 * std::max(1.0, std::abs(z))) {
      if (!region.contains(z, region_slack)) return std::nullopt;
      return z;
    }
  }
  return std::nullopt;
}

// two-root cluster solve on a local quadratic model of the determinant
std::optional<std::pair<Complex, Complex>> cluster2(const Context& ctx, Complex z0, double r) {
  ScaledDet f0, f1, f2;
  try {
    f0 = reduced_det(ctx, z0);
    f1 = reduced_det(ctx, z0 + r);
    f2 = reduced_det(ctx, z0 - r);
  } catch (const ThresholdProximity&) {
    return std::nullopt;
  }
  const Complex v1 = det_ratio(f1, f0), v2 = det_ratio(f2, f0);
  // q(u) = 1 + c1 u + c2 u^2 interpolating the ratios at u = +-r
  const Complex c1 = (v1 - v2) / (2.0 * r);
  const Complex c2 = (v1 + v2 - 2.0) / (2.0 * r * r);
  if (std::abs(c2) == 0.0) return std::nullopt;
  const Complex disc = std::sqrt(c1 * c1 - 4.0 * c2);
  return std::make_pair(z0 + (-c1 + disc) / (2.0 * c2), z0 + (-c1 - disc) / (2.0 * c2));
}

// rectangle subdivision by the argument principle
void isolate(const Context& ctx, const SearchRegion& r, int depth,
             std::vector<std::pair<SearchRegion, int>>& out) {
  WindingResult w = winding(ctx, r);
  if (!w.ok) {
    // a zero probably sits on the contour; inflate the box asymmetrically
    SearchRegion r2 = r;
    const double dx = 1e-4 * (r.re_hi - r.re_lo + r.im_hi - r.im_lo);
    r2.re_lo -= dx;
    r2.re_hi += 1.7 * dx;
    r2.im_lo -= 1.3 * dx;
    r2.im_hi += dx;
    w = winding(ctx, r2, 48);
    if (!w.ok) return;
  }
  if (w.count == 0) return;
  const double dre = r.re_hi - r.re_lo, dim = r.im_hi - r.im_lo;
  const double min_size = 1e-4 * std::max(1.0, std::abs(r.re_hi));
  if (w.count == 1 || (w.count == 2 && dre < min_size && dim < min_size) || depth > 24) {
    out.emplace_back(r, w.count);
    return;
  }
  SearchRegion a = r, b = r;
  if (dre >= dim) {
    const double mid = 0.5 * (r.re_lo + r.re_hi);
    a.re_hi = mid;
    b.re_lo = mid;
  } else {
    const double mid = 0.5 * (r.im_lo + r.im_hi);
    a.im_hi = mid;
    b.im_lo = mid;
  }
  isolate(ctx, a, depth + 1, out);
  isolate(ctx, b, depth + 1, out);
}

void dedupe(std::vector<Complex>& roots) {
  std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  std::vector<Complex> out;
  for (const Complex z : roots) {
    bool dup = false;
    for (const Complex w : out)
      if (std::abs(z - w) < 1e-8 * std::max(1.0, std::abs(z))) dup = true;
    if (!dup) out.push_back(z);
  }
  roots = std::move(out);
}

double null_residual(const Context& ctx, Complex lambda) {
  const Eigen::MatrixXcd M = fill_conditioned(ctx, lambda).M;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M);
  const auto& sv = svd.singularValues();
  return sv(M.cols() - 1) / sv(0);
}

}  // namespace

Eigen::MatrixXcd MatchSystem::full() const {
  const int n = N + 1;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(4 * n, 4 * n);
  M.block(0, 0, n, n) = m11;
  M.block(0, n, n, n) = m12;
  M.block(n, 0, n, n) = m21;
  M.block(n, 2 * n, n, n) = m23;
  M.block(2 * n, 2 * n, n, n) = m33;
  M.block(2 * n, 3 * n, n, n) = m34;
  M.block(3 * n, n, n, n) = m42;
  M.block(3 * n, 3 * n, n, n) = m44;
  return M;
}

double threshold_guard(const SquareWellProfile& profile) {
  const double pi_d = M_PI / profile.d;
  return 1e-6 * pi_d * pi_d;
}

MatchSystem assemble_system(const SquareWellProfile& profile, Complex lambda, int N) {
  const Context ctx = make_context(profile, N);
  check_thresholds(ctx, lambda);
  return fill_system(ctx, lambda);
}

ScaledDet secular_logdet(const SquareWellProfile& profile, Complex lambda, int N) {
  const Context ctx = make_context(profile, N);
  check_thresholds(ctx, lambda);
  const CondSystem s = fill_conditioned(ctx, lambda);
  ScaledDet det = logdet_of(s.M);
  for (int j = 0; j <= N; ++j) div_scaled(det, -4.0 * s.E(j) * s.G(j));
  return det;
}

ScaledDet secular_logdet_reduced(const SquareWellProfile& profile, Complex lambda, int N) {
  const Context ctx = make_context(profile, N);
  return reduced_det(ctx, lambda);
}

int count_zeros(const SquareWellProfile& profile, int N, const SearchRegion& region) {
  const Context ctx = make_context(profile, N);
  SearchRegion r = region;
  if (r.real_axis_only()) {
    const double band = 1e-3 * std::max(1.0, std::abs(r.re_hi));
    r.im_lo = -band;
    r.im_hi = band;
  }
  const WindingResult w = winding(ctx, r, 64);
  if (!w.ok) throw NoConvergence("count_zeros: phase tracking failed on the contour");
  return w.count;
}

FindResult find_eigenvalues(const SquareWellProfile& profile, int N, const SearchRegion& region) {
  const Context ctx = make_context(profile, N);
  const double mu0sq = ctx.fam0.mu0_sq();
  if (region.re_hi > mu0sq - ctx.tol_branch)
    throw ThresholdProximity("find_eigenvalues: search region reaches the branch point");
  if (region.re_lo > region.re_hi || region.im_lo > region.im_hi)
    throw std::invalid_argument("find_eigenvalues: empty search region");

  FindResult out;
  std::vector<Complex> roots;
  int seeds = 0, failed = 0;

  if (region.real_axis_only()) {
    // coarse magnitude scan, 400 samples per unit
    const int n = std::max(64, static_cast<int>(std::ceil(400.0 * (region.re_hi - region.re_lo))));
    std::vector<double> mag(n + 1);
    std::vector<Complex> ph(n + 1);
    const double h = (region.re_hi - region.re_lo) / n;
    for (int i = 0; i <= n; ++i) {
      const ScaledDet f = reduced_det(ctx, Complex{region.re_lo + i * h, 0.0});
      mag[i] = f.log_mag;
      ph[i] = f.phase;
    }
    std::vector<Complex> seeds_z;
    for (int i = 1; i < n; ++i)
      if (mag[i] <= mag[i - 1] && mag[i] <= mag[i + 1])
        seeds_z.push_back(Complex{region.re_lo + i * h, 0.0});
    // sign changes of the rotated determinant along the axis
    for (int i = 0; i < n; ++i) {
      const double s0 = (ph[i] / ph[0]).real(), s1 = (ph[i + 1] / ph[0]).real();
      if (s0 * s1 < 0.0 && std::abs(s0) > 0.2 && std::abs(s1) > 0.2)
        seeds_z.push_back(Complex{region.re_lo + (i + 0.5) * h, 0.0});
    }
    seeds = static_cast<int>(seeds_z.size());
    for (const Complex z0 : seeds_z) {
      auto z = newton_polish(ctx, z0, region, 2.0 * h);
      if (z && std::abs(z->imag()) < 1e-8 * std::max(1.0, std::abs(*z)) &&
          !near_inner_threshold(ctx, *z))
        roots.push_back(Complex{z->real(), 0.0});
      else
        ++failed;
    }
    dedupe(roots);

    // cross-check against the argument principle on a thin band; zeros the
    // scan missed are hunted by subdivision
    SearchRegion band = region;
    const double bw = 1e-3 * std::max(1.0, std::abs(region.re_hi));
    band.im_lo = -bw;
    band.im_hi = bw;
    const WindingResult w = winding(ctx, band, 64);
    if (w.ok && w.count > static_cast<int>(roots.size())) {
      std::vector<std::pair<SearchRegion, int>> boxes;
      isolate(ctx, band, 0, boxes);
      for (const auto& [box, cnt] : boxes) {
        (void)cnt;
        const Complex center{0.5 * (box.re_lo + box.re_hi), 0.5 * (box.im_lo + box.im_hi)};
        auto z = newton_polish(ctx, center, band, 0.1);
        if (z && std::abs(z->imag()) < 1e-8 * std::max(1.0, std::abs(*z)) &&
            !near_inner_threshold(ctx, *z))
          roots.push_back(Complex{z->real(), 0.0});
      }
      dedupe(roots);
    }
    if (w.ok && w.count > 0 && roots.empty())
      throw NoConvergence("find_eigenvalues: zeros detected but none could be polished");
    out.winding_count = w.ok ? w.count : -1;
  } else {
    std::vector<std::pair<SearchRegion, int>> boxes;
    isolate(ctx, region, 0, boxes);
    for (const auto& [box, w] : boxes) {
      const Complex center{0.5 * (box.re_lo + box.re_hi), 0.5 * (box.im_lo + box.im_hi)};
      seeds += w;
      if (w == 1) {
        auto z = newton_polish(ctx, center, region, 0.1);
        if (z && !near_inner_threshold(ctx, *z))
          roots.push_back(*z);
        else
          ++failed;
        continue;
      }
      // w >= 2: cluster solve, then individual polish when separated
      const double r = 0.25 * std::max(box.re_hi - box.re_lo, box.im_hi - box.im_lo);
      auto pair = cluster2(ctx, center, std::max(r, 1e-7));
      if (!pair) {
        failed += w;
        continue;
      }
      for (const Complex z0 : {pair->first, pair->second}) {
        auto z = newton_polish(ctx, z0, region, 0.1);
        if (z && !near_inner_threshold(ctx, *z))
          roots.push_back(*z);
        else if (std::abs(pair->first - pair->second) <
                 1e-6 * std::max(1.0, std::abs(pair->first)))
          roots.push_back(z0);  // near-coalescent pair: keep the cluster root
        else
          ++failed;
      }
    }
    dedupe(roots);
    if (seeds > 0 && roots.empty() && failed == seeds)
      throw NoConvergence("find_eigenvalues: no seed could be polished");
    try {
      out.winding_count = count_zeros(profile, N, region);
    } catch (const NoConvergence&) {
      out.winding_count = -1;
    }
  }

  for (const Complex z : roots) {
    EigenvalueRecord rec;
    rec.lambda = z;
    rec.solver = "modematch";
    rec.n1 = N;
    rec.residual = null_residual(ctx, z);
    out.records.push_back(rec);
  }
  for (auto& rec : out.records) {
    const double scale = std::max(1.0, std::abs(rec.lambda));
    if (std::abs(rec.lambda.imag()) < 1e-9 * scale) {
      rec.conjugate_paired = true;
      continue;
    }
    for (const auto& other : out.records)
      if (std::abs(std::conj(rec.lambda) - other.lambda) < 1e-9 * scale)
        rec.conjugate_paired = true;
  }
  std::sort(out.records.begin(), out.records.end(), [](const auto& a, const auto& b) {
    return a.lambda.real() != b.lambda.real() ? a.lambda.real() < b.lambda.real()
                                              : a.lambda.imag() < b.lambda.imag();
  });
  out.failed_seeds = failed;
  return out;
}

std::vector<EigenvalueRecord> find_converged_eigenvalues(const SquareWellProfile& profile,
                                                         int N, const SearchRegion& region) {
  const FindResult coarse = find_eigenvalues(profile, N, region);
  const FindResult fine = find_eigenvalues(profile, N + 4, region);

  std::vector<EigenvalueRecord> out;
  std::vector<bool> used(fine.records.size(), false);
  for (const auto& rc : coarse.records) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < fine.records.size(); ++i) {
      if (used[i]) continue;
      const double dist = std::abs(rc.lambda - fine.records[i].lambda);
      if (dist < best) {
        best = dist;
        arg = i;
      }
    }
    if (std::isfinite(best)) {
      used[arg] = true;
      EigenvalueRecord rec = fine.records[arg];
      rec.convergence = best;
      rec.converged = best < 1e-8 * std::max(1.0, std::abs(rec.lambda));
      out.push_back(rec);
    }
  }
  for (std::size_t i = 0; i < fine.records.size(); ++i) {
    if (used[i]) continue;
    EigenvalueRecord rec = fine.records[i];
    rec.convergence = std::numeric_limits<double>::infinity();
    rec.converged = false;
    out.push_back(rec);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.lambda.real() != b.lambda.real() ? a.lambda.real() < b.lambda.real()
                                              : a.lambda.imag() < b.lambda.imag();
  });
  return out;
}

Complex MatchedEigenfunction::eval(double x1, double x2) const {
  const int n = N + 1;
  Complex acc = 0.0;
  if (x1 > profile.L_plus) {
    for (int j = 0; j < n; ++j) {
      const double mu = fam0.mode(j).mu;
      const Complex g = std::sqrt(Complex{mu * mu} - lambda);
      acc += a_at_Lp(j) * std::exp(-g * (x1 - profile.L_plus)) * fam0.mode(j).psi(x2);
    }
  } else if (x1 >= 0.0) {
    for (int j = 0; j < n; ++j) {
      Complex k = std::sqrt(lambda - Complex{famP.mode(j).mu * famP.mode(j).mu});
      if (k.imag() < 0.0) k = -k;
      acc += (u(j) * std::exp(kI * k * x1) +
              w(j) * std::exp(-kI * k * (x1 - profile.L_plus))) *
             famP.mode(j).psi(x2);
    }
  } else if (x1 >= profile.L_minus) {
    for (int j = 0; j < n; ++j) {
      Complex k = std::sqrt(lambda - Complex{famM.mode(j).mu * famM.mode(j).mu});
      if (k.imag() < 0.0) k = -k;
      acc += (r(j) * std::exp(kI * k * (x1 - profile.L_minus)) +
              t(j) * std::exp(-kI * k * x1)) *
             famM.mode(j).psi(x2);
    }
  } else {
    for (int j = 0; j < n; ++j) {
      const double mu = fam0.mode(j).mu;
      const Complex g = std::sqrt(Complex{mu * mu} - lambda);
      acc += d_at_Lm(j) * std::exp(g * (x1 - profile.L_minus)) * fam0.mode(j).psi(x2);
    }
  }
  return acc;
}

double MatchedEigenfunction::matching_residual() const {
  const Context ctx = make_context(profile, N);
  const CondSystem sys = fill_conditioned(ctx, lambda);
  const int n = N + 1;
  Eigen::VectorXcd v(4 * n);
  v.segment(0, n) = u;
  v.segment(n, n) = r;
  v.segment(2 * n, n) = w;
  v.segment(3 * n, n) = t;
  const double vmax = v.cwiseAbs().maxCoeff();
  return (sys.M * v).cwiseAbs().maxCoeff() / std::max(vmax, 1e-300);
}

MatchedEigenfunction reconstruct_eigenfunction(const SquareWellProfile& profile,
                                               const EigenvalueRecord& record, int N) {
  const Context ctx = make_context(profile, N);
  check_thresholds(ctx, record.lambda);
  const CondSystem sys = fill_conditioned(ctx, record.lambda);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(sys.M, Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const int m = static_cast<int>(sys.M.cols());
  const double gap = sv(m - 2) - sv(m - 1);
  if (gap < 1e-6 * std::max(sv(m - 2), 1e-300))
    throw IllConditionedNullspace(
        "reconstruct_eigenfunction: two smallest singular values nearly coincide");

  Eigen::VectorXcd v = svd.matrixV().col(m - 1);
  int arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  v /= v(arg);  // deterministic normalization

  MatchedEigenfunction f;
  f.lambda = record.lambda;
  f.N = N;
  f.profile = profile;
  f.fam0 = ctx.fam0;
  f.famP = ctx.famP;
  f.famM = ctx.famM;
  f.null_residual = sv(m - 1) / sv(0);
  const int n = N + 1;
  f.u = v.segment(0, n);
  f.r = v.segment(n, n);
  f.w = v.segment(2 * n, n);
  f.t = v.segment(3 * n, n);

  // printed {cos, sin} unknowns per channel
  f.b.resize(n);
  f.bB.resize(n);
  f.c.resize(n);
  f.cB.resize(n);
  for (int j = 0; j < n; ++j) {
    f.b(j) = f.u(j) + f.w(j) * sys.E(j);
    f.bB(j) = kI * (f.u(j) - f.w(j) * sys.E(j));
    f.c(j) = f.r(j) * sys.G(j) + f.t(j);
    f.cB(j) = kI * (f.r(j) * sys.G(j) - f.t(j));
  }

  // asymptotic coefficients, normalized at the interfaces:
  // Psi = sum a_at_Lp(i) exp(-gamma_i (x1 - L_+)) psi_i^0  for x1 > L_+
  f.a_at_Lp.resize(n);
  f.d_at_Lm.resize(n);
  for (int i = 0; i < n; ++i) {
    Complex sp = 0.0, sm = 0.0;
    for (int j = 0; j < n; ++j) {
      sp += (f.u(j) * sys.E(j) + f.w(j)) * ctx.OP(i, j);
      sm += (f.r(j) + f.t(j) * sys.G(j)) * ctx.OM(i, j);
    }
    f.a_at_Lp(i) = sp;
    f.d_at_Lm(i) = sm;
  }
  return f;
}

std::pair<ScaledDet, ScaledDet> symmetric_reduced_determinants(const SquareWellProfile& profile,
                                                               Complex lambda, int N) {
  if (!profile.is_symmetric())
    throw NotSymmetric("symmetric_reduced_determinants: profile is not a symmetric well");
  const Context ctx = make_context(profile, N);
  check_thresholds(ctx, lambda);
  const MatchSystem s = fill_system(ctx, lambda);
  return {logdet_of(s.m21 + s.m42), logdet_of(s.m23 - s.m44)};
}

}  // namespace ptstrip
