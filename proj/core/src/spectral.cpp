#include "dropletlab/spectral.hpp"

#include <cmath>

namespace dlab {

namespace {

void check_in_omega(const Vector3d& x) {
  const double eps = 1e-12;
  for (int d = 0; d < 3; ++d) {
    if (x[d] < omega_lo - eps || x[d] > omega_hi + eps)
      throw std::invalid_argument("evaluate: point outside Omega");
  }
}

}  // namespace

double phi1d(int k, double x) {
  const double nu = (k == 0) ? 1.0 : 2.0;
  return std::sqrt(nu / pi) * std::cos(k * (x - omega_lo));
}

double dphi1d(int k, double x) {
  if (k == 0) return 0.0;
  return -std::sqrt(2.0 / pi) * k * std::sin(k * (x - omega_lo));
}

double SpectralField::h1_norm() const {
  double s = 0.0;
  for (std::size_t t = 0; t < grid.size(); ++t) s += (1.0 + grid.ksq(t)) * std::norm(c[t]);
  return std::sqrt(s);
}

double SpectralField::grad_energy() const {
  double s = 0.0;
  for (std::size_t t = 0; t < grid.size(); ++t) s += grid.ksq(t) * std::norm(c[t]);
  return s;
}

Eigen::VectorXd psi_vector(const ModeGrid& g, const Vector3d& x) {
  Eigen::VectorXd v(g.size());
  std::vector<double> t1(g.n), t2(g.n), t3(g.n);
  for (int k = 0; k < g.n; ++k) {
    t1[k] = phi1d(k, x[0]);
    t2[k] = phi1d(k, x[1]);
    t3[k] = phi1d(k, x[2]);
  }
  std::size_t t = 0;
  for (int k1 = 0; k1 < g.n; ++k1)
    for (int k2 = 0; k2 < g.n; ++k2) {
      const double p12 = t1[k1] * t2[k2];
      for (int k3 = 0; k3 < g.n; ++k3) v[t++] = p12 * t3[k3];
    }
  return v;
}

cplx evaluate(const SpectralField& f, const Vector3d& x) {
  check_in_omega(x);
  const Eigen::VectorXd psi = psi_vector(f.grid, x);
  cplx s = 0.0;
  for (std::size_t t = 0; t < f.grid.size(); ++t) s += psi[t] * f.c[t];
  return s;
}

std::vector<cplx> evaluate(const SpectralField& f, const std::vector<Vector3d>& pts) {
  std::vector<cplx> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = evaluate(f, pts[i]);
  return out;
}

void face_axes(int face, int& d, int& t1, int& t2) {
  d = face / 2;
  t1 = (d == 0) ? 1 : 0;
  t2 = (d == 2) ? 1 : 2;
}

double face_coordinate(int face) { return (face % 2 == 0) ? omega_lo : omega_hi; }

Vector3d face_point(int face, double u, double v) {
  int d, a, b;
  face_axes(face, d, a, b);
  Vector3d x;
  x[d] = face_coordinate(face);
  x[a] = u;
  x[b] = v;
  return x;
}

BoundaryField trace(const SpectralField& f) {
  const int n = f.grid.n;
  BoundaryField out(n, 0.5);
  for (int face = 0; face < 6; ++face) {
    int d, a, b;
    face_axes(face, d, a, b);
    const int side = face % 2;
    for (std::size_t t = 0; t < f.grid.size(); ++t) {
      const Index3 k = f.grid.unflat(t);
      double nd = std::sqrt(((k[d] == 0) ? 1.0 : 2.0) / pi);
      if (side == 1 && (k[d] % 2 == 1)) nd = -nd;
      out.c[out.flat(face, k[a], k[b])] += nd * f.c[t];
    }
  }
  return out;
}

cplx evaluate_face(const BoundaryField& f, int face, const Vector3d& x) {
  int d, a, b;
  face_axes(face, d, a, b);
  if (std::abs(x[d] - face_coordinate(face)) > 1e-10)
    throw std::invalid_argument("evaluate_face: point not on the given face");
  cplx s = 0.0;
  for (int k1 = 0; k1 < f.n; ++k1)
    for (int k2 = 0; k2 < f.n; ++k2)
      s += f.c[f.flat(face, k1, k2)] * (phi1d(k1, x[a]) * phi1d(k2, x[b]));
  return s;
}

cplx boundary_pairing(const BoundaryField& u, const BoundaryField& g) {
  if (u.n != g.n) throw std::invalid_argument("boundary_pairing: mismatched truncations");
  cplx s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u.c[i] * g.c[i];
  return s;
}

double hs_norm(const BoundaryField& f, double s) {
  double acc = 0.0;
  for (int face = 0; face < 6; ++face)
    for (int k1 = 0; k1 < f.n; ++k1)
      for (int k2 = 0; k2 < f.n; ++k2) {
        const double w = std::pow(1.0 + double(k1 * k1 + k2 * k2), s);
        acc += w * std::norm(f.c[f.flat(face, k1, k2)]);
      }
  return std::sqrt(acc);
}

Eigen::VectorXcd boundary_load(const ModeGrid& g, const BoundaryField& f) {
  if (f.n != g.n) throw std::invalid_argument("boundary_load: truncation mismatch");
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(g.size());
  for (std::size_t t = 0; t < g.size(); ++t) {
    const Index3 k = g.unflat(t);
    cplx acc = 0.0;
    for (int d = 0; d < 3; ++d) {
      const int a = (d == 0) ? 1 : 0;
      const int bax = (d == 2) ? 1 : 2;
      const double base = std::sqrt(((k[d] == 0) ? 1.0 : 2.0) / pi);
      for (int side = 0; side < 2; ++side) {
        double nd = base;
        if (side == 1 && (k[d] % 2 == 1)) nd = -nd;
        acc += nd * f.c[f.flat(2 * d + side, k[a], k[bax])];
      }
    }
    b[t] = acc;
  }
  return b;
}

double TorusField::wavenumber(std::size_t t, int d) const {
  const int m = per_dim();
  int idx = 0;
  if (d == 0)
    idx = static_cast<int>(t / (static_cast<std::size_t>(m) * m));
  else if (d == 1)
    idx = static_cast<int>((t / m) % m);
  else
    idx = static_cast<int>(t % m);
  return (idx - K) + shift[d];
}

cplx evaluate(const TorusField& f, const Vector3d& x) {
  const int m = f.per_dim();
  std::vector<cplx> e1(m), e2(m), e3(m);
  for (int j = 0; j < m; ++j) {
    const double k = j - f.K;
    e1[j] = std::exp(cplx(0.0, (k + f.shift[0]) * x[0]));
    e2[j] = std::exp(cplx(0.0, (k + f.shift[1]) * x[1]));
    e3[j] = std::exp(cplx(0.0, (k + f.shift[2]) * x[2]));
  }
  cplx s = 0.0;
  std::size_t t = 0;
  for (int j1 = 0; j1 < m; ++j1)
    for (int j2 = 0; j2 < m; ++j2) {
      const cplx p = e1[j1] * e2[j2];
      for (int j3 = 0; j3 < m; ++j3) s += f.c[t++] * p * e3[j3];
    }
  return s;
}

Eigen::VectorXcd synth_tensor(const TorusField& f, const std::vector<double>& x1,
                              const std::vector<double>& x2, const std::vector<double>& x3) {
  const int m = f.per_dim();
  const std::size_t n1 = x1.size(), n2 = x2.size(), n3 = x3.size();
  auto basis = [&](const std::vector<double>& xs, int d) {
    std::vector<cplx> E(xs.size() * m);
    for (std::size_t p = 0; p < xs.size(); ++p)
      for (int j = 0; j < m; ++j)
        E[p * m + j] = std::exp(cplx(0.0, (j - f.K + f.shift[d]) * xs[p]));
    return E;
  };
  const std::vector<cplx> E1 = basis(x1, 0), E2 = basis(x2, 1), E3 = basis(x3, 2);

  // Stage 1: A[k1,k2,p3] = sum_{k3} c[k1,k2,k3] E3[p3,k3]
  std::vector<cplx> A(static_cast<std::size_t>(m) * m * n3, cplx(0));
  for (int k1 = 0; k1 < m; ++k1)
    for (int k2 = 0; k2 < m; ++k2) {
      const cplx* src = f.c.data() + (static_cast<std::size_t>(k1) * m + k2) * m;
      cplx* dst = A.data() + (static_cast<std::size_t>(k1) * m + k2) * n3;
      for (std::size_t p3 = 0; p3 < n3; ++p3) {
        cplx s = 0.0;
        const cplx* e = E3.data() + p3 * m;
        for (int k3 = 0; k3 < m; ++k3) s += src[k3] * e[k3];
        dst[p3] = s;
      }
    }
  // Stage 2: B[k1,p2,p3] = sum_{k2} A[k1,k2,p3] E2[p2,k2]
  std::vector<cplx> B(static_cast<std::size_t>(m) * n2 * n3, cplx(0));
  for (int k1 = 0; k1 < m; ++k1)
    for (std::size_t p2 = 0; p2 < n2; ++p2) {
      const cplx* e = E2.data() + p2 * m;
      cplx* dst = B.data() + (static_cast<std::size_t>(k1) * n2 + p2) * n3;
      for (int k2 = 0; k2 < m; ++k2) {
        const cplx w = e[k2];
        const cplx* src = A.data() + (static_cast<std::size_t>(k1) * m + k2) * n3;
        for (std::size_t p3 = 0; p3 < n3; ++p3) dst[p3] += w * src[p3];
      }
    }
  // Stage 3: out[p1,p2,p3] = sum_{k1} B[k1,p2,p3] E1[p1,k1]
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n1 * n2 * n3));
  for (std::size_t p1 = 0; p1 < n1; ++p1) {
    const cplx* e = E1.data() + p1 * m;
    for (int k1 = 0; k1 < m; ++k1) {
      const cplx w = e[k1];
      const cplx* src = B.data() + static_cast<std::size_t>(k1) * n2 * n3;
      cplx* dst = out.data() + static_cast<std::size_t>(p1) * n2 * n3;
      for (std::size_t q = 0; q < n2 * n3; ++q) dst[q] += w * src[q];
    }
  }
  return out;
}

double l2_norm_omega(const TorusField& f) {
  const int m = f.per_dim();
  Eigen::MatrixXcd Bm(m, m);
  for (int j = 0; j < m; ++j)
    for (int l = 0; l < m; ++l) Bm(j, l) = box_exp_integral(cplx(double(j - l), 0.0));

  std::vector<cplx> cur(f.c.data(), f.c.data() + f.c.size());
  std::vector<cplx> nxt(cur.size());
  // contract k3
  for (int k1 = 0; k1 < m; ++k1)
    for (int k2 = 0; k2 < m; ++k2) {
      const std::size_t base = (static_cast<std::size_t>(k1) * m + k2) * m;
      for (int j = 0; j < m; ++j) {
        cplx s = 0.0;
        for (int l = 0; l < m; ++l) s += Bm(j, l) * cur[base + l];
        nxt[base + j] = s;
      }
    }
  cur.swap(nxt);
  // contract k2
  for (int k1 = 0; k1 < m; ++k1)
    for (int k3 = 0; k3 < m; ++k3) {
      const std::size_t base = static_cast<std::size_t>(k1) * m * m + k3;
      for (int j = 0; j < m; ++j) {
        cplx s = 0.0;
        for (int l = 0; l < m; ++l) s += Bm(j, l) * cur[base + static_cast<std::size_t>(l) * m];
        nxt[base + static_cast<std::size_t>(j) * m] = s;
      }
    }
  cur.swap(nxt);
  // contract k1
  for (int k2 = 0; k2 < m; ++k2)
    for (int k3 = 0; k3 < m; ++k3) {
      const std::size_t base = static_cast<std::size_t>(k2) * m + k3;
      for (int j = 0; j < m; ++j) {
        cplx s = 0.0;
        for (int l = 0; l < m; ++l)
          s += Bm(j, l) * cur[base + static_cast<std::size_t>(l) * m * m];
        nxt[base + static_cast<std::size_t>(j) * m * m] = s;
      }
    }
  cur.swap(nxt);

  cplx total = 0.0;
  for (std::size_t t = 0; t < cur.size(); ++t) total += std::conj(f.c[t]) * cur[t];
  return std::sqrt(std::max(0.0, total.real()));
}

cplx box_exp_integral(cplx z) {
  if (std::abs(z) < 1e-14) return cplx(pi, 0.0);
  const cplx i(0.0, 1.0);
  return (std::exp(i * z * omega_hi) - std::exp(i * z * omega_lo)) / (i * z);
}

cplx cos_exp_integral_centered(int k, cplx z) {
  const cplx i(0.0, 1.0);
  auto half_wave = [&](cplx w) -> cplx {
    if (std::abs(w) < 1e-14) return cplx(pi, 0.0);
    return 2.0 * std::sin(w * (pi / 2.0)) / w;
  };
  const cplx phase_p = std::exp(i * cplx(k * pi / 2.0, 0.0));
  const cplx phase_m = std::exp(-i * cplx(k * pi / 2.0, 0.0));
  const cplx val = 0.5 * (phase_p * half_wave(z + cplx(double(k), 0.0)) +
                          phase_m * half_wave(z - cplx(double(k), 0.0)));
  const double nu = (k == 0) ? 1.0 : 2.0;
  return std::sqrt(nu / pi) * val;
}

}  // namespace dlab
