#pragma once

#include <Eigen/Dense>

#include "dropletlab/common.hpp"
#include "dropletlab/spectral.hpp"

namespace dlab {

/// One separable cosine term amp * prod_d cos(m_d (x_d - pi/2)).
struct CosTerm {
  double amp = 0.0;
  Index3 m = {0, 0, 0};
};

/// Refraction coefficient n^2 as a constant offset plus a band-limited cosine
/// expansion. Positivity is enforced on a dense check grid at construction.
struct MediumSpec {
  double offset = 1.0;
  std::vector<CosTerm> terms;

  MediumSpec() = default;
  MediumSpec(double c0, std::vector<CosTerm> ts);

  double eval(const Vector3d& x) const;
  /// Largest per-dimension mode index appearing in the expansion.
  int bandwidth() const;
  double min_value() const { return min_val_; }
  double max_norm() const { return max_abs_; }
  bool is_zero() const { return offset == 0.0 && terms.empty(); }

  /// Mode-space multiplication by n^2: (Mn u)_k = <n^2 psi_k', psi_k>-weighted
  /// band product, applied via per-dimension triple-cosine integrals.
  Eigen::VectorXcd apply_n2(const ModeGrid& g, const Eigen::VectorXcd& u) const;
  /// Dense Galerkin matrix of multiplication by n^2 (symmetric).
  Eigen::MatrixXd n2_matrix(const ModeGrid& g) const;

  /// Fourier coefficient F(n^2 chi_Omega)(l) = (2pi)^-3 int_Omega n^2 e^{-i l x} dx,
  /// in closed form.
  cplx fourier_chi_omega(const Index3& l) const;

  std::uint64_t hash() const;
  std::string describe() const;

 private:
  double min_val_ = 1.0;
  double max_abs_ = 1.0;
  void scan_range();
};

/// 1D Galerkin matrix of multiplication by cos(m (x - pi/2)) in the phi basis.
Eigen::MatrixXd cosine_multiplier_1d(int n, int m);

}  // namespace dlab
