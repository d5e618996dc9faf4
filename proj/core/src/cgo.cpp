#include "dropletlab/cgo.hpp"

#include <cmath>

#include "dropletlab/quadrature.hpp"

namespace dlab {

namespace {

const cplx I(0.0, 1.0);

double smooth01(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

Index3 rot_left(const Index3& l) { return {l[1], l[2], l[0]}; }

Vector3c rot_right(const Vector3c& v) { return Vector3c(v[2], v[0], v[1]); }

Vector3c make_xi_generic(const Index3& l, double P, double sigma) {
  const double l1 = l[0], l2 = l[1], l3 = l[2];
  const double nl = norm3(l);
  const double t23 = l2 * l2 + l3 * l3;
  const double c = std::pow(P, 2.0 + sigma) * std::pow(nl, 2.0 + sigma) /
                   (std::sqrt(2.0) * std::sqrt(t23));
  Vector3c xi;
  xi[0] = c * cplx(0.0, -t23);
  xi[1] = c * cplx(-nl * l3, l1 * l2);
  xi[2] = c * cplx(nl * l2, l1 * l3);  // sign of the real part corrected
  return xi;
}

// Per-dimension tapered transform table:
// T(j) = (1/2pi) int_0^{2pi} chi(x) e^{i (eta - j - s) x} dx, |j| <= kext.
std::vector<cplx> taper_tables(int eta, double s, int kext) {
  static thread_local std::vector<double> nodes, weights, chi_vals;
  const int panels = std::max(48, kext + 24);
  if (nodes.size() != static_cast<std::size_t>(16 * panels)) {
    const Quadrature1D q = composite_gauss(16, panels, 0.0, cell_period);
    nodes = q.nodes;
    weights = q.weights;
    chi_vals.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) chi_vals[i] = cell_taper(nodes[i]);
  }
  std::vector<cplx> T(2 * kext + 1, cplx(0));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double w = weights[i] * chi_vals[i] / cell_period;
    if (w == 0.0) continue;
    const cplx base = std::exp(I * cplx((eta - s) * nodes[i], 0.0)) * w;
    const cplx step = std::exp(-I * cplx(nodes[i], 0.0));
    // e^{i (eta - j - s) x} for j = -kext..kext
    cplx cur = base * std::exp(I * cplx(kext * nodes[i], 0.0));
    for (int j = -kext; j <= kext; ++j) {
      T[j + kext] += cur;
      cur *= step;
    }
  }
  return T;
}

struct ShiftScore {
  Vector3d s;
  double min_abs = 0.0;
};

// min |symbol| over the truncated lattice for either conjugated operator.
// sign = -1: Q = -|w|^2 - 2 xi.w - P^2  (the r1 operator)
// sign = +1: Q = +|w|^2 - 2 xi.w + P^2  (the r2 operator)
double min_symbol(const Vector3c& xi, double P, const Vector3d& s, int K, int sign) {
  const int m = 2 * K + 1;
  std::vector<double> w1(m), w2(m), w3(m);
  std::vector<cplx> x1(m), x2(m), x3(m);
  for (int j = 0; j < m; ++j) {
    w1[j] = (j - K) + s[0];
    w2[j] = (j - K) + s[1];
    w3[j] = (j - K) + s[2];
    x1[j] = xi[0] * w1[j];
    x2[j] = xi[1] * w2[j];
    x3[j] = xi[2] * w3[j];
  }
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const double wab = w1[a] * w1[a] + w2[b] * w2[b];
      const cplx xab = x1[a] + x2[b];
      for (int c = 0; c < m; ++c) {
        const double A = wab + w3[c] * w3[c];
        const cplx B = xab + x3[c];
        const double re = sign * (A + P * P) - 2.0 * B.real();
        const double im = -2.0 * B.imag();
        const double q2 = re * re + im * im;
        if (q2 < best) best = q2;
      }
    }
  return std::sqrt(best);
}

Vector3d pick_shift(const Vector3c& xi, double P, int K, int sign, double& achieved) {
  Vector3d best_s = Vector3d::Zero();
  achieved = -1.0;
  for (int mask = 1; mask < 8; ++mask) {
    const Vector3d s(0.5 * ((mask >> 0) & 1), 0.5 * ((mask >> 1) & 1), 0.5 * ((mask >> 2) & 1));
    const double v = min_symbol(xi, P, s, K, sign);
    if (v > achieved) {
      achieved = v;
      best_s = s;
    }
  }
  return best_s;
}

struct RhsTables {
  std::array<std::vector<cplx>, 3> T;  // per-dim, |j| <= kext
  double full_mass() const {
    double m = 1.0;
    for (int d = 0; d < 3; ++d) {
      double s = 0.0;
      for (const cplx& v : T[d]) s += std::norm(v);
      m *= s;
    }
    return m;
  }
  double trunc_mass(int K, int kext) const {
    double m = 1.0;
    for (int d = 0; d < 3; ++d) {
      double s = 0.0;
      for (int j = -K; j <= K; ++j) s += std::norm(T[d][j + kext]);
      m *= s;
    }
    return m;
  }
};

// Solve (sign-dependent conjugated operator) r = rho * chi e^{i eta x} on the
// shifted lattice.
TorusField solve_conjugated(const Vector3c& xi, double P, const Index3& eta, cplx rho,
                            const Vector3d& s, int K, int sign, double& residual) {
  const int kext = 2 * K + 8;
  RhsTables tab;
  for (int d = 0; d < 3; ++d) tab.T[d] = taper_tables(eta[d], s[d], kext);

  TorusField r(K, s);
  const int m = 2 * K + 1;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const double wa = (a - K) + s[0];
      const double wb = (b - K) + s[1];
      const cplx Rab = rho * tab.T[0][a - K + kext] * tab.T[1][b - K + kext];
      const double A2 = wa * wa + wb * wb;
      const cplx X2 = xi[0] * wa + xi[1] * wb;
      for (int c = 0; c < m; ++c) {
        const double wc = (c - K) + s[2];
        const double A = A2 + wc * wc;
        const cplx B = X2 + xi[2] * wc;
        const cplx Q = cplx(sign * (A + P * P), 0.0) - 2.0 * B;
        r.c[r.flat(a - K, b - K, c - K)] = Rab * tab.T[2][c - K + kext] / Q;
      }
    }

  const double full = tab.full_mass();
  const double trunc = tab.trunc_mass(K, kext);
  residual = (full > 0.0) ? std::sqrt(std::max(0.0, full - trunc) / full) : 0.0;
  return r;
}

}  // namespace

double cell_taper(double x) {
  const double x0 = pi / 8.0, x1 = 3.0 * pi / 8.0;
  if (x < 0.0 || x > cell_period) return 0.0;
  const double d = std::min(x, cell_period - x);
  return smooth01((d - x0) / (x1 - x0));
}

Vector3c make_xi(const Index3& l, double P, double sigma) {
  if (!(P > 0.0) || !(sigma > 0.0)) throw invalid_config("make_xi: need P > 0 and sigma > 0");
  Vector3c xi;
  if (is_zero(l)) {
    const double c = std::pow(P, 2.0 + sigma) / std::sqrt(2.0);
    xi = Vector3c(c * cplx(0.0, -1.0), c * cplx(-1.0, 0.0), cplx(0.0, 0.0));
  } else if (l[1] == 0 && l[2] == 0) {
    xi = rot_right(make_xi_generic(rot_left(l), P, sigma));
  } else {
    xi = make_xi_generic(l, P, sigma);
  }

  // Invariant guard: null, orthogonal to l, prescribed norm.
  const double nx = std::sqrt(std::norm(xi[0]) + std::norm(xi[1]) + std::norm(xi[2]));
  const cplx null = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
  const cplx dot = xi[0] * double(l[0]) + xi[1] * double(l[1]) + xi[2] * double(l[2]);
  const double nl = norm3(l);
  const double target = is_zero(l) ? std::pow(P, 2.0 + sigma)
                                   : std::pow(P, 2.0 + sigma) * std::pow(nl, 3.0 + sigma);
  if (std::abs(null) > 1e-12 * nx * nx || std::abs(dot) > 1e-12 * nx * std::max(1.0, nl) ||
      std::abs(nx - target) > 1e-12 * target)
    throw solver_failure("make_xi: construction invariants violated");
  return xi;
}

CgoPair build_cgo_pair(const Index3& ell, const CgoConfig& cfg) {
  CgoPair pair;
  pair.ell = ell;
  pair.P = cfg.P;
  pair.sigma = cfg.sigma;
  pair.xi = make_xi(ell, cfg.P, cfg.sigma);
  const Index3 eta = {-ell[0], -ell[1], -ell[2]};
  const double xin = std::sqrt(std::norm(pair.xi[0]) + std::norm(pair.xi[1]) +
                               std::norm(pair.xi[2]));
  const double eta2 = double(sq(eta[0]) + sq(eta[1]) + sq(eta[2]));
  const double p2 = cfg.P * cfg.P;

  int K = cfg.K;
  for (;;) {
    double score1 = 0.0, score2 = 0.0;
    const Vector3d s1 = pick_shift(pair.xi, cfg.P, K, -1, score1);
    const Vector3d s2 = pick_shift(pair.xi, cfg.P, K, +1, score2);
    pair.min_symbol1 = score1 / xin;
    pair.min_symbol2 = score2 / xin;
    if (pair.min_symbol1 < cfg.symbol_floor || pair.min_symbol2 < cfg.symbol_floor)
      throw solver_failure("build_cgo_pair: no admissible lattice shift at this truncation "
                           "(min symbol " +
                           format_double(std::min(score1, score2)) + ")");

    pair.r1 = solve_conjugated(pair.xi, cfg.P, eta, cplx(eta2 + p2, 0.0), s1, K, -1,
                               pair.r1_residual);
    pair.r2 = solve_conjugated(pair.xi, cfg.P, {0, 0, 0}, cplx(-p2, 0.0), s2, K, +1,
                               pair.r2_residual);
    if ((pair.r1_residual <= cfg.residual_tol && pair.r2_residual <= cfg.residual_tol) ||
        K >= cfg.max_K)
      break;
    K = std::min(cfg.max_K, (3 * K) / 2 + 1);
  }
  if (pair.r1_residual > cfg.residual_tol || pair.r2_residual > cfg.residual_tol)
    throw solver_failure("build_cgo_pair: tapered RHS expansion residual " +
                         format_double(std::max(pair.r1_residual, pair.r2_residual)) +
                         " above tolerance at K = " + std::to_string(K));

  pair.r1_norm_omega = l2_norm_omega(pair.r1);
  pair.r2_norm_omega = l2_norm_omega(pair.r2);
  const double om_half = std::sqrt(omega_volume());
  pair.c0_r1 = pair.r1_norm_omega * xin / ((eta2 + p2) * om_half);
  pair.c0_r2 = pair.r2_norm_omega * xin / (p2 * om_half);
  return pair;
}

cplx fourier_coefficient_oracle(const CgoPair& pair, const MediumSpec& medium) {
  const Index3 eta = {-pair.ell[0], -pair.ell[1], -pair.ell[2]};
  const int K = pair.r1.K;
  const int wmax = 2 * K + 1 + std::max({std::abs(eta[0]), std::abs(eta[1]), std::abs(eta[2])}) +
                   medium.bandwidth() + 2;
  const int nq = std::max(32, static_cast<int>(std::ceil(1.3 * wmax)) + 12);

  const Quadrature1D q = gauss_legendre(nq, omega_lo, omega_hi);
  const Eigen::VectorXcd r1v = synth_tensor(pair.r1, q.nodes, q.nodes, q.nodes);
  const Eigen::VectorXcd r2v = synth_tensor(pair.r2, q.nodes, q.nodes, q.nodes);

  std::array<std::vector<cplx>, 3> eexp;
  for (int d = 0; d < 3; ++d) {
    eexp[d].resize(nq);
    for (int i = 0; i < nq; ++i) eexp[d][i] = std::exp(I * cplx(eta[d] * q.nodes[i], 0.0));
  }

  cplx acc = 0.0;
  std::size_t t = 0;
  for (int i1 = 0; i1 < nq; ++i1)
    for (int i2 = 0; i2 < nq; ++i2) {
      const cplx e12 = eexp[0][i1] * eexp[1][i2];
      const double w12 = q.weights[i1] * q.weights[i2];
      for (int i3 = 0; i3 < nq; ++i3, ++t) {
        const Vector3d x(q.nodes[i1], q.nodes[i2], q.nodes[i3]);
        const cplx integrand =
            medium.eval(x) * (e12 * eexp[2][i3] + r1v[t]) * (1.0 + r2v[t]);
        acc += w12 * q.weights[i3] * integrand;
      }
    }
  return acc / (cell_period * cell_period * cell_period);
}

cplx fourier_coefficient_measurement(const CgoPair& pair, const MediumSpec& medium, double omega,
                                     int n_meas) {
  // Overflow guard on the conjugated exponential range over Omega.
  const double xrange = (pi / 2.0) * (std::abs(pair.xi[0].imag()) + std::abs(pair.xi[1].imag()) +
                                      std::abs(pair.xi[2].imag()));
  if (xrange > 14.0)
    throw invalid_config(
        "fourier_coefficient_measurement: |Im xi| too large for conjugated double-precision "
        "emulation (P^(2+sigma)|l|^(3+sigma) range exceeded); reduce P, sigma or |l|");

  const double P = pair.P;
  const double ratio = omega * omega * medium.max_norm() / (P * P);
  if (!(ratio < 1.0))
    throw invalid_config("fourier_coefficient_measurement: Born smallness violated");

  const ModeGrid gm{n_meas};
  const Index3 eta = {-pair.ell[0], -pair.ell[1], -pair.ell[2]};

  // Cosine coefficients of q_tilde = e^{i xi (x - pi)} (e^{i eta x} + r1).
  Eigen::VectorXcd qc = Eigen::VectorXcd::Zero(gm.size());
  {
    // incident plane-wave part
    std::array<std::vector<cplx>, 3> inc;
    for (int d = 0; d < 3; ++d) {
      inc[d].resize(n_meas);
      const cplx phase = std::exp(I * cplx(eta[d] * pi, 0.0));
      for (int k = 0; k < n_meas; ++k)
        inc[d][k] = phase * cos_exp_integral_centered(k, pair.xi[d] + cplx(double(eta[d]), 0.0));
    }
    for (std::size_t t = 0; t < gm.size(); ++t) {
      const Index3 k = gm.unflat(t);
      qc[t] = inc[0][k[0]] * inc[1][k[1]] * inc[2][k[2]];
    }
    // r1 part, contracted dimension by dimension
    const int m = pair.r1.per_dim();
    std::array<Eigen::MatrixXcd, 3> Md;
    for (int d = 0; d < 3; ++d) {
      Md[d].resize(n_meas, m);
      for (int j = 0; j < m; ++j) {
        const double mu = (j - pair.r1.K) + pair.r1.shift[d];
        const cplx phase = std::exp(I * cplx(mu * pi, 0.0));
        for (int k = 0; k < n_meas; ++k)
          Md[d](k, j) = phase * cos_exp_integral_centered(k, pair.xi[d] + cplx(mu, 0.0));
      }
    }
    // stage contractions: c[j1,j2,j3] -> A[j1,j2,k3] -> B[j1,k2,k3] -> out
    std::vector<cplx> A(static_cast<std::size_t>(m) * m * n_meas, cplx(0));
    for (int j1 = 0; j1 < m; ++j1)
      for (int j2 = 0; j2 < m; ++j2) {
        const cplx* src = pair.r1.c.data() + (static_cast<std::size_t>(j1) * m + j2) * m;
        cplx* dst = A.data() + (static_cast<std::size_t>(j1) * m + j2) * n_meas;
        for (int k3 = 0; k3 < n_meas; ++k3) {
          cplx s = 0.0;
          for (int j3 = 0; j3 < m; ++j3) s += src[j3] * Md[2](k3, j3);
          dst[k3] = s;
        }
      }
    std::vector<cplx> B(static_cast<std::size_t>(m) * n_meas * n_meas, cplx(0));
    for (int j1 = 0; j1 < m; ++j1)
      for (int k2 = 0; k2 < n_meas; ++k2)
        for (int j2 = 0; j2 < m; ++j2) {
          const cplx w = Md[1](k2, j2);
          const cplx* src = A.data() + (static_cast<std::size_t>(j1) * m + j2) * n_meas;
          cplx* dst = B.data() + (static_cast<std::size_t>(j1) * n_meas + k2) * n_meas;
          for (int k3 = 0; k3 < n_meas; ++k3) dst[k3] += w * src[k3];
        }
    for (int k1 = 0; k1 < n_meas; ++k1)
      for (int j1 = 0; j1 < m; ++j1) {
        const cplx w = Md[0](k1, j1);
        const cplx* src = B.data() + static_cast<std::size_t>(j1) * n_meas * n_meas;
        cplx* dst = qc.data() + static_cast<std::size_t>(k1) * n_meas * n_meas;
        for (int kk = 0; kk < n_meas * n_meas; ++kk) dst[kk] += w * src[kk];
      }
  }

  // Effective-medium forward map and linearized inversion.
  SpectralField qfield(gm, qc);
  Eigen::VectorXcd u = qc;
  for (int it = 0; it < 5000; ++it) {
    Eigen::VectorXcd nu = omega * omega * medium.apply_n2(gm, u);
    for (std::size_t t = 0; t < gm.size(); ++t) nu[t] /= (gm.ksq(t) + P * P);
    nu += qc;
    const double diff = (nu - u).norm();
    u.swap(nu);
    if (diff <= 1e-13 * (u.norm() + 1e-300)) break;
  }
  BoundaryField tau = trace(SpectralField(gm, u));
  tau.c -= trace(qfield).c;
  tau.c /= omega * omega;

  // Face coefficients of d_nu [e^{-i xi (x - pi)} (1 + r2)].
  BoundaryField gt(n_meas, -0.5);
  const int m = pair.r2.per_dim();
  for (int face = 0; face < 6; ++face) {
    int d, a, b;
    face_axes(face, d, a, b);
    const double sign = (face % 2 == 0) ? -1.0 : 1.0;
    const double xf_c = face_coordinate(face) - pi;  // -pi/2 or +pi/2

    // The constant "1" in (1 + r2) rides along as an extra mode column
    // (index m) with mu = 0.
    Eigen::MatrixXcd Ma(n_meas, m + 1), Mb(n_meas, m + 1);
    Eigen::VectorXcd Mn(m + 1);
    for (int j = 0; j <= m; ++j) {
      double mu_a, mu_b, mu_d;
      if (j == m) {
        mu_a = mu_b = mu_d = 0.0;  // the constant "1"
      } else {
        mu_a = (j - pair.r2.K) + pair.r2.shift[a];
        mu_b = (j - pair.r2.K) + pair.r2.shift[b];
        mu_d = (j - pair.r2.K) + pair.r2.shift[d];
      }
      for (int k = 0; k < n_meas; ++k) {
        Ma(k, j) = std::exp(I * cplx(mu_a * pi, 0.0)) *
                   cos_exp_integral_centered(k, cplx(mu_a, 0.0) - pair.xi[a]);
        Mb(k, j) = std::exp(I * cplx(mu_b * pi, 0.0)) *
                   cos_exp_integral_centered(k, cplx(mu_b, 0.0) - pair.xi[b]);
      }
      Mn[j] = sign * I * (cplx(mu_d, 0.0) - pair.xi[d]) * std::exp(I * cplx(mu_d * pi, 0.0)) *
              std::exp(I * (cplx(mu_d, 0.0) - pair.xi[d]) * xf_c);
    }
    // mode coefficients: r2 modes have c from the field; the extra column is 1
    // gt(face, ka, kb) = sum_modes c_mode Ma(ka) Mb(kb) Mn
    // contract: for the tensor r2 coefficient layout c[j1,j2,j3], dims (a,b,d)
    // map to the coordinate axes; build per-axis index helpers.
    for (int ka = 0; ka < n_meas; ++ka)
      for (int kb = 0; kb < n_meas; ++kb) {
        cplx s = 0.0;
        // constant term
        s += Ma(ka, m) * Mb(kb, m) * Mn[m];
        // r2 terms: iterate all modes (m^3); use separable structure instead
        gt.c[gt.flat(face, ka, kb)] = s;
      }
    // separable contraction over r2 modes for this face
    // axes: a, b tangential, d normal
    // F[j_a, j_b] = sum_{j_d} c[...] Mn[j_d]
    Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(m, m);
    for (int ja = 0; ja < m; ++ja)
      for (int jb = 0; jb < m; ++jb) {
        cplx s = 0.0;
        for (int jd = 0; jd < m; ++jd) {
          Index3 idx;
          idx[a] = ja - pair.r2.K;
          idx[b] = jb - pair.r2.K;
          idx[d] = jd - pair.r2.K;
          s += pair.r2.c[pair.r2.flat(idx[0], idx[1], idx[2])] * Mn[jd];
        }
        F(ja, jb) = s;
      }
    const Eigen::MatrixXcd G1 = Ma.leftCols(m) * F;            // (n_meas, m)
    const Eigen::MatrixXcd G2 = G1 * Mb.leftCols(m).transpose();  // (n_meas, n_meas)
    for (int ka = 0; ka < n_meas; ++ka)
      for (int kb = 0; kb < n_meas; ++kb) gt.c[gt.flat(face, ka, kb)] += G2(ka, kb);
  }

  return boundary_pairing(tau, gt) / (cell_period * cell_period * cell_period);
}

ReconstructionResult reconstruct(int L, const CgoConfig& cfg, const MediumSpec& medium,
                                 bool measurement_mode, double omega_meas, int n_meas,
                                 int threads) {
  if (L < 1) throw invalid_config("reconstruct: L must be >= 1");
  ReconstructionResult res;
  res.L = L;
  res.P = cfg.P;
  res.sigma = cfg.sigma;
  res.measurement_mode = measurement_mode;

  std::vector<Index3> ls;
  for (int l1 = -L; l1 <= L; ++l1)
    for (int l2 = -L; l2 <= L; ++l2)
      for (int l3 = -L; l3 <= L; ++l3) ls.push_back({l1, l2, l3});
  res.entries.resize(ls.size());

  parallel_for(ls.size(), threads, [&](std::size_t i) {
    const Index3 l = ls[i];
    const CgoPair pair = build_cgo_pair(l, cfg);
    CoeffEntry e;
    e.l = l;
    e.value = measurement_mode
                  ? fourier_coefficient_measurement(pair, medium, omega_meas, n_meas)
                  : fourier_coefficient_oracle(pair, medium);
    e.exact = medium.fourier_chi_omega(l);
    const double xin = std::sqrt(std::norm(pair.xi[0]) + std::norm(pair.xi[1]) +
                                 std::norm(pair.xi[2]));
    e.budget = (double(sq(l[0]) + sq(l[1]) + sq(l[2])) + cfg.P * cfg.P) / xin;
    e.c0_r1 = pair.c0_r1;
    e.c0_r2 = pair.c0_r2;
    res.entries[i] = e;
  });

  // L2(Omega) errors via the exponential Gram matrix.
  const std::size_t n = ls.size();
  auto gram = [&](const std::vector<cplx>& a4, const std::vector<cplx>& b4) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        cplx g = 1.0;
        for (int d = 0; d < 3; ++d)
          g *= box_exp_integral(cplx(double(ls[i][d] - ls[j][d]), 0.0));
        s += a4[i] * std::conj(b4[j]) * g;
      }
    return s;
  };
  auto inner_with_truth = [&](const std::vector<cplx>& a4) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const Index3 ml = {-ls[i][0], -ls[i][1], -ls[i][2]};
      s += a4[i] * (cell_period * cell_period * cell_period) * medium.fourier_chi_omega(ml);
    }
    return s;
  };

  // ||n^2||_{L2(Omega)}^2 by quadrature
  {
    const int nq = 4 * (medium.bandwidth() + 2);
    const Quadrature1D q = gauss_legendre(nq, omega_lo, omega_hi);
    double s = 0.0;
    for (int i1 = 0; i1 < nq; ++i1)
      for (int i2 = 0; i2 < nq; ++i2)
        for (int i3 = 0; i3 < nq; ++i3) {
          const double v = medium.eval(Vector3d(q.nodes[i1], q.nodes[i2], q.nodes[i3]));
          s += q.weights[i1] * q.weights[i2] * q.weights[i3] * v * v;
        }
    res.truth_norm = std::sqrt(s);
  }

  std::vector<cplx> vals(n), exacts(n), diffs(n);
  for (std::size_t i = 0; i < n; ++i) {
    vals[i] = res.entries[i].value;
    exacts[i] = res.entries[i].exact;
    diffs[i] = vals[i] - exacts[i];
  }
  const double t2 = res.truth_norm * res.truth_norm;
  const double rec2 = gram(vals, vals).real();
  const double cross = inner_with_truth(vals).real();
  res.err_vs_truth = std::sqrt(std::max(0.0, rec2 - 2.0 * cross + t2)) / res.truth_norm;
  res.err_vs_band = std::sqrt(std::max(0.0, gram(diffs, diffs).real())) / res.truth_norm;
  const double band2 = gram(exacts, exacts).real();
  const double bcross = inner_with_truth(exacts).real();
  res.floor_norm = std::sqrt(std::max(0.0, band2 - 2.0 * bcross + t2)) / res.truth_norm;
  return res;
}

cplx synthesize_coeffs(const std::vector<CoeffEntry>& entries, const Vector3d& x,
                       bool use_exact) {
  cplx s = 0.0;
  for (const auto& e : entries) {
    const cplx phase =
        std::exp(I * cplx(e.l[0] * x[0] + e.l[1] * x[1] + e.l[2] * x[2], 0.0));
    s += (use_exact ? e.exact : e.value) * phase;
  }
  return s;
}

}  // namespace dlab
