// Test-only oracles, independent of the implementation paths they check:
// second-order finite-difference Neumann solvers on uniform grids, and
// operator-norm estimators built from first principles.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "dropletlab/common.hpp"
#include "dropletlab/spectral.hpp"

namespace dlab::testing {

/// Cell-centered uniform grid on Omega with mirror (Neumann) ghosts.
struct FdGrid {
  int n = 48;
  double h = pi / 48;
  std::vector<double> coords;  // cell centers, shared by all dimensions

  explicit FdGrid(int n_) : n(n_), h(pi / n_) {
    coords.resize(n);
    for (int i = 0; i < n; ++i) coords[i] = omega_lo + (i + 0.5) * h;
  }
  std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }
  std::size_t flat(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n + j) * n + k;
  }
};

/// Applies (P^2 - Delta_h) with mirror ghosts (homogeneous Neumann).
inline void apply_helmholtz_fd(const FdGrid& g, double P, const std::vector<double>& u,
                               std::vector<double>& out) {
  const double ih2 = 1.0 / (g.h * g.h);
  const int n = g.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double c = u[g.flat(i, j, k)];
        double lap = -6.0 * c;
        lap += (i > 0) ? u[g.flat(i - 1, j, k)] : c;
        lap += (i < n - 1) ? u[g.flat(i + 1, j, k)] : c;
        lap += (j > 0) ? u[g.flat(i, j - 1, k)] : c;
        lap += (j < n - 1) ? u[g.flat(i, j + 1, k)] : c;
        lap += (k > 0) ? u[g.flat(i, j, k - 1)] : c;
        lap += (k < n - 1) ? u[g.flat(i, j, k + 1)] : c;
        out[g.flat(i, j, k)] = P * P * c - lap * ih2;
      }
}

/// Conjugate gradients for (P^2 - Delta_h) u = rhs; SPD for P > 0.
inline std::vector<double> solve_helmholtz_fd(const FdGrid& g, double P,
                                              const std::vector<double>& rhs, double tol = 1e-10,
                                              int maxit = 4000) {
  const std::size_t N = g.size();
  std::vector<double> x(N, 0.0), r = rhs, p = rhs, Ap(N);
  double rr = 0.0;
  for (double v : r) rr += v * v;
  const double rr0 = rr;
  for (int it = 0; it < maxit && rr > tol * tol * rr0; ++it) {
    apply_helmholtz_fd(g, P, p, Ap);
    double pAp = 0.0;
    for (std::size_t t = 0; t < N; ++t) pAp += p[t] * Ap[t];
    const double alpha = rr / pAp;
    double rr_new = 0.0;
    for (std::size_t t = 0; t < N; ++t) {
      x[t] += alpha * p[t];
      r[t] -= alpha * Ap[t];
      rr_new += r[t] * r[t];
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t t = 0; t < N; ++t) p[t] = r[t] + beta * p[t];
  }
  return x;
}

/// Grid solve of (Delta - P^2) u = -(mollified point source at y0), Neumann.
/// Approximates G_p(., y0) away from the mollifier support.
inline std::vector<double> gp_grid_oracle(const FdGrid& g, double P, const Vector3d& y0,
                                          double sigma) {
  std::vector<double> rhs(g.size());
  double total = 0.0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k) {
        const Vector3d x(g.coords[i], g.coords[j], g.coords[k]);
        const double r2 = (x - y0).squaredNorm();
        const double v = std::exp(-r2 / (2.0 * sigma * sigma));
        rhs[g.flat(i, j, k)] = v;
        total += v * g.h * g.h * g.h;
      }
  for (double& v : rhs) v /= total;  // unit mass
  return solve_helmholtz_fd(g, P, rhs);
}

/// Grid solve of (Delta - P^2) q = 0 with Neumann data from a BoundaryField:
/// ghost condition (u_ghost - u_in)/h = +f on the outward side.
inline std::vector<double> qf_grid_oracle(const FdGrid& g, double P, const BoundaryField& f) {
  // Move the boundary data to the right-hand side: rhs += f / h on boundary
  // cells (flux enters through the mirror ghost).
  std::vector<double> rhs(g.size(), 0.0);
  const int n = g.n;
  for (int face = 0; face < 6; ++face) {
    int d, a, b;
    face_axes(face, d, a, b);
    for (int ia = 0; ia < n; ++ia)
      for (int ib = 0; ib < n; ++ib) {
        Vector3d x;
        x[d] = face_coordinate(face);
        x[a] = g.coords[ia];
        x[b] = g.coords[ib];
        const double fv = evaluate_face(f, face, x).real();
        int idx[3];
        idx[d] = (face % 2 == 0) ? 0 : n - 1;
        idx[a] = ia;
        idx[b] = ib;
        rhs[g.flat(idx[0], idx[1], idx[2])] += fv / g.h;
      }
  }
  return solve_helmholtz_fd(g, P, rhs);
}

/// Largest singular value of the weighted trace of N^p on a tall diagonal
/// grid: the discrete  ||gamma N^p||_{L2 -> H^{1/2}}  proxy.
inline double gamma_np_norm(int n_op, double P, int iters = 60) {
  const ModeGrid g{n_op};
  // map: c |-> W_{1/2} Tr diag(1/(|k|^2+P^2)) c ; power-iterate M^T M.
  std::mt19937 rng(1234);
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(g.size());
  for (std::size_t t = 0; t < g.size(); ++t) v[t] = nd(rng);
  v.normalize();
  const int nb = n_op;
  auto forward = [&](const Eigen::VectorXd& c) {
    // returns weighted face coefficients (6 * nb * nb)
    Eigen::VectorXd out = Eigen::VectorXd::Zero(6ull * nb * nb);
    for (std::size_t t = 0; t < g.size(); ++t) {
      const Index3 k = g.unflat(t);
      const double nw = c[t] / (g.ksq(t) + P * P);
      for (int d = 0; d < 3; ++d) {
        const int a = (d == 0) ? 1 : 0;
        const int b = (d == 2) ? 1 : 2;
        const double base = std::sqrt(((k[d] == 0) ? 1.0 : 2.0) / pi);
        const double w12 = std::pow(1.0 + double(k[a] * k[a] + k[b] * k[b]), 0.25);
        for (int side = 0; side < 2; ++side) {
          double tr = base;
          if (side == 1 && (k[d] % 2 == 1)) tr = -tr;
          out[(static_cast<std::size_t>(2 * d + side) * nb + k[a]) * nb + k[b]] += w12 * tr * nw;
        }
      }
    }
    return out;
  };
  auto adjoint = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(g.size());
    for (std::size_t t = 0; t < g.size(); ++t) {
      const Index3 k = g.unflat(t);
      double acc = 0.0;
      for (int d = 0; d < 3; ++d) {
        const int a = (d == 0) ? 1 : 0;
        const int b = (d == 2) ? 1 : 2;
        const double base = std::sqrt(((k[d] == 0) ? 1.0 : 2.0) / pi);
        const double w12 = std::pow(1.0 + double(k[a] * k[a] + k[b] * k[b]), 0.25);
        for (int side = 0; side < 2; ++side) {
          double tr = base;
          if (side == 1 && (k[d] % 2 == 1)) tr = -tr;
          acc += w12 * tr * y[(static_cast<std::size_t>(2 * d + side) * nb + k[a]) * nb + k[b]];
        }
      }
      out[t] = acc / (g.ksq(t) + P * P);
    }
    return out;
  };
  double sigma = 0.0;
  for (int it = 0; it < iters; ++it) {
    const Eigen::VectorXd y = forward(v);
    Eigen::VectorXd w = adjoint(y);
    sigma = std::sqrt(w.norm());
    w.normalize();
    v = w;
  }
  // sigma^2 approx largest eig of M^T M after normalization: recompute cleanly
  const Eigen::VectorXd y = forward(v);
  return y.norm();
}

/// Deterministic pseudo-random boundary field with band-limited content.
inline BoundaryField random_boundary_field(int n, unsigned seed, int band = 4) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  BoundaryField f(n, -0.5);
  for (int face = 0; face < 6; ++face)
    for (int k1 = 0; k1 <= band; ++k1)
      for (int k2 = 0; k2 <= band; ++k2) f.c[f.flat(face, k1, k2)] = nd(rng);
  return f;
}

inline SpectralField random_field(const ModeGrid& g, unsigned seed, int band = 6) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  SpectralField f(g);
  for (std::size_t t = 0; t < g.size(); ++t) {
    const Index3 k = g.unflat(t);
    if (k[0] <= band && k[1] <= band && k[2] <= band) f.c[t] = cplx(nd(rng), nd(rng));
  }
  return f;
}

}  // namespace dlab::testing
