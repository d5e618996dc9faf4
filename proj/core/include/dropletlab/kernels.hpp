#pragma once

#include <memory>
#include <optional>

#include <Eigen/Dense>

#include "dropletlab/common.hpp"
#include "dropletlab/medium.hpp"
#include "dropletlab/spectral.hpp"

namespace dlab {

enum class KernelKind { phi, gp, helmholtz };

/// Interior Neumann Green's kernels on Omega in cosine-mode space.
///
///   phi        : Laplace,   Delta phi = -delta + 1/|Omega|, zero mean
///                (mode 0 excluded; the pure Neumann problem has a
///                compatibility constant).
///   gp(P)      : modified Helmholtz, (Delta - P^2) G_p = -delta.
///   helmholtz  : (Delta + omega^2 n^2) G = -delta, dense Galerkin
///                A = diag(|k|^2) - omega^2 <n^2 psi, psi>, inverted once.
///
/// Point evaluation comes in two flavours. `point_eval` sums the truncated
/// bilinear eigen-expansion and converges slowly near the diagonal: below
/// `diag_cutoff()` it must not be trusted. `singular_split` / `stable_eval`
/// instead subtract the free-space singularity analytically: the smooth
/// periodized image sum of e^{-P r}/(4 pi r) reference kernels captures the
/// singular part exactly, a fourth-order-matched partial fraction
/// (Kummer) correction accounts for the symbol mismatch mode by mode, and a
/// dense correction handles the non-constant part of n^2.
class Kernel {
 public:
  static Kernel make_phi(ModeGrid g);
  static Kernel make_gp(ModeGrid g, double P);
  static Kernel make_helmholtz(ModeGrid g, double omega, const MediumSpec& medium);
  /// Cache path: adopt a previously assembled Galerkin matrix.
  static Kernel make_helmholtz_precomputed(ModeGrid g, double omega, const MediumSpec& medium,
                                           Eigen::MatrixXd A);

  KernelKind kind() const { return kind_; }
  const ModeGrid& grid() const { return grid_; }
  double P() const { return P_; }
  double omega() const { return omega_; }
  const MediumSpec& medium() const { return medium_; }

  /// N(f) = int G(.,y) f(y) dy in mode space (diagonal or dense solve).
  SpectralField apply_newtonian(const SpectralField& f) const;
  Eigen::VectorXcd apply_newtonian(const Eigen::VectorXcd& f) const;

  /// Solve A u = rhs for the helmholtz Galerkin matrix (shifted by `shift`
  /// times identity when requested: (A - shift I) u = rhs).
  Eigen::VectorXcd solve_shifted(const Eigen::VectorXcd& rhs, double shift) const;

  /// Mode weight of the diagonal kernels (phi/gp).
  double diag_weight(std::size_t t) const;

  /// Truncated bilinear series value. Converges slowly near the diagonal;
  /// callers below diag_cutoff must use singular_split instead.
  double point_eval(const Vector3d& x, const Vector3d& y) const;

  /// Free-space part 1/(4 pi |x-y|) and the bounded remainder, evaluated
  /// stably at any separation (including x == y for the remainder).
  std::pair<double, double> singular_split(const Vector3d& x, const Vector3d& y) const;

  /// free + remainder; accurate at all separations.
  double stable_eval(const Vector3d& x, const Vector3d& y) const;

  double diag_cutoff() const { return 2.0 * pi / grid_.n; }

  /// max|U_ii| / min|U_ii| of the LU factors; > 1e12 signals omega^2 hitting
  /// a Neumann eigenvalue of -n^-2 Delta.
  double condition_estimate() const;

  /// Precomputed data for evaluating many kernel pairs on a fixed point set.
  struct PointBatch {
    std::vector<Vector3d> pts;
    Eigen::MatrixXd psi;    // mode values, size modes x M
    Eigen::MatrixXd wcol;   // correction columns, size modes x M (may be 0x0)
  };
  PointBatch prepare_points(const std::vector<Vector3d>& pts, int threads = 1) const;
  /// stable_eval(pts[m], pts[j]) using the batch; m != j.
  double pair_eval(const PointBatch& b, int m, int j) const;
  /// Remainder part only (defined for m == j as the diagonal limit).
  double pair_remainder(const PointBatch& b, int m, int j) const;

  const Eigen::MatrixXd& galerkin_matrix() const;

 private:
  Kernel() = default;
  void setup_split();
  double image_sum(const Vector3d& x, const Vector3d& y, bool subtract_free) const;

  KernelKind kind_ = KernelKind::phi;
  ModeGrid grid_;
  double P_ = 0.0;
  double omega_ = 0.0;
  MediumSpec medium_;

  // helmholtz Galerkin data
  std::shared_ptr<Eigen::MatrixXd> A_;
  std::shared_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
  double cond_est_ = 1.0;

  // stable-split data
  double kappa_split_ = 0.0;            // split constant, T(t) = 1/(t - kappa_split)
  std::array<double, 3> pref_ = {2.5, 4.0, 5.5};
  std::array<double, 3> cref_ = {0, 0, 0};
  std::array<int, 3> mimg_ = {2, 1, 1};
  Eigen::VectorXd mode_w_;              // per-mode correction weights
  bool has_band_ = false;
};

}  // namespace dlab
