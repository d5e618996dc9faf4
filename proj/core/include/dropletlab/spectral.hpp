#pragma once

#include <Eigen/Dense>

#include "dropletlab/common.hpp"
#include "dropletlab/quadrature.hpp"

namespace dlab {

/// Tensor cosine mode set on Omega = [pi/2, 3pi/2]^3. Per-dimension modes are
/// phi_k(x) = sqrt(nu_k/pi) * cos(k (x - pi/2)), k = 0..n-1, nu_0 = 1,
/// nu_k = 2, orthonormal on an interval of length pi. Every mode has zero
/// normal derivative on the box faces, so the set is a Neumann eigenbasis of
/// -Laplace with eigenvalues |k|^2.
struct ModeGrid {
  int n = 12;  // modes per dimension

  std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }
  std::size_t flat(int k1, int k2, int k3) const {
    return (static_cast<std::size_t>(k1) * n + k2) * n + k3;
  }
  Index3 unflat(std::size_t t) const {
    const int k3 = static_cast<int>(t % n);
    const int k2 = static_cast<int>((t / n) % n);
    const int k1 = static_cast<int>(t / (static_cast<std::size_t>(n) * n));
    return {k1, k2, k3};
  }
  double ksq(std::size_t t) const {
    const Index3 k = unflat(t);
    return double(sq(k[0]) + sq(k[1]) + sq(k[2]));
  }
  bool operator==(const ModeGrid& o) const { return n == o.n; }
};

/// 1D orthonormal cosine mode, phi_k(x) on [pi/2, 3pi/2].
double phi1d(int k, double x);
/// d/dx phi_k(x).
double dphi1d(int k, double x);

/// Interior field as coefficients over the orthonormal cosine modes.
/// Parseval: the L2(Omega) norm is the Euclidean norm of `c`.
struct SpectralField {
  ModeGrid grid;
  Eigen::VectorXcd c;

  SpectralField() = default;
  explicit SpectralField(ModeGrid g) : grid(g), c(Eigen::VectorXcd::Zero(g.size())) {}
  SpectralField(ModeGrid g, Eigen::VectorXcd coeffs) : grid(g), c(std::move(coeffs)) {}

  double l2_norm() const { return c.norm(); }
  /// H^1(Omega) norm: (sum (1 + |k|^2) |c_k|^2)^(1/2).
  double h1_norm() const;
  /// Gradient energy sum |k|^2 |c_k|^2, squared seminorm.
  double grad_energy() const;
};

/// All mode values psi_k(x) at one point, flattened like ModeGrid.
Eigen::VectorXd psi_vector(const ModeGrid& g, const Vector3d& x);

/// Pointwise synthesis of the truncated series. Throws if a point is
/// outside the closed box Omega.
cplx evaluate(const SpectralField& f, const Vector3d& x);
std::vector<cplx> evaluate(const SpectralField& f, const std::vector<Vector3d>& pts);

/// Per-face coefficients over 2D cosine modes on the 6 faces of the boundary.
/// Face f = 2*d + side where d is the normal axis and side 0/1 is the
/// x_d = pi/2 / x_d = 3pi/2 face; in-face axes are the remaining dimensions
/// in increasing order. Discrete H^s norms are weighted Euclidean norms with
/// weights (1+|kappa|^2)^(s/2) per face mode kappa.
struct BoundaryField {
  int n = 12;                     // face modes per dimension
  double sobolev_exponent = 0.0;  // bookkeeping only; norms take s explicitly too
  Eigen::VectorXcd c;             // 6 * n * n, face-major

  BoundaryField() = default;
  explicit BoundaryField(int n_, double s = 0.0)
      : n(n_), sobolev_exponent(s), c(Eigen::VectorXcd::Zero(6ull * n_ * n_)) {}

  std::size_t flat(int face, int k1, int k2) const {
    return (static_cast<std::size_t>(face) * n + k1) * n + k2;
  }
  std::size_t size() const { return 6ull * n * n; }
};

/// Restriction of the cosine series to each face, re-expanded in face modes.
/// Exact: cosine restrictions are face cosines.
BoundaryField trace(const SpectralField& f);

/// Evaluate a boundary field at a point on face `face` (x must lie on it).
cplx evaluate_face(const BoundaryField& f, int face, const Vector3d& x);

/// Bilinear duality pairing  integral_{dOmega} u g dsigma  as a coefficient
/// dot product (no conjugation). Throws on mismatched truncations.
cplx boundary_pairing(const BoundaryField& u, const BoundaryField& g);

/// Discrete H^s norm with per-mode weights (1+|kappa|^2)^(s/2).
double hs_norm(const BoundaryField& f, double s);

/// Coordinates of a face point: face normal dim gets the face value,
/// tangential dims taken from t = (t1, t2).
Vector3d face_point(int face, double t1, double t2);
void face_axes(int face, int& d, int& t1, int& t2);
double face_coordinate(int face);

/// Adjoint of `trace` against the duality pairing: coefficients
/// b_k = <g, trace(psi_k)>_{dOmega}, the Galerkin load vector of Neumann data.
Eigen::VectorXcd boundary_load(const ModeGrid& g, const BoundaryField& f);

/// Complex coefficients over exponentials e^{i (k+s) . x} on the 2pi period
/// cell, k in [-K, K]^3, shift s in {0, 1/2}^3. Coefficients are for the
/// unnormalized modes; Parseval on the cell carries a (2pi)^3 factor.
struct TorusField {
  int K = 0;
  Vector3d shift = Vector3d::Zero();
  Eigen::VectorXcd c;

  TorusField() = default;
  TorusField(int K_, const Vector3d& s)
      : K(K_), shift(s), c(Eigen::VectorXcd::Zero(static_cast<std::size_t>(2 * K_ + 1) * (2 * K_ + 1) * (2 * K_ + 1))) {}

  int per_dim() const { return 2 * K + 1; }
  std::size_t flat(int k1, int k2, int k3) const {
    const int m = per_dim();
    return (static_cast<std::size_t>(k1 + K) * m + (k2 + K)) * m + (k3 + K);
  }
  /// Wavenumber of flat index t in dimension d, including the shift.
  double wavenumber(std::size_t t, int d) const;

  double l2_norm_cell() const { return std::sqrt(cell_period * cell_period * cell_period) * c.norm(); }
};

cplx evaluate(const TorusField& f, const Vector3d& x);

/// Synthesis on a tensor grid (separable contraction); result is indexed
/// p1-major like the mode layout.
Eigen::VectorXcd synth_tensor(const TorusField& f, const std::vector<double>& x1,
                              const std::vector<double>& x2, const std::vector<double>& x3);

/// L2 norm restricted to Omega, via the exact per-dimension Gram matrices.
double l2_norm_omega(const TorusField& f);

/// integral_{pi/2}^{3pi/2} e^{i z x} dx for complex z.
cplx box_exp_integral(cplx z);

/// integral over [pi/2,3pi/2] of phi_k(x) e^{i z (x - pi)} dx, recentered so
/// the magnitude stays at most e^{|Im z| pi/2}. Used when projecting
/// exponentially weighted fields without overflow.
cplx cos_exp_integral_centered(int k, cplx z);

}  // namespace dlab
