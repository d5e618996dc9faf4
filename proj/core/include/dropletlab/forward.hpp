#pragma once

#include "dropletlab/ball_spectrum.hpp"
#include "dropletlab/foldy_lax.hpp"
#include "dropletlab/geometry.hpp"
#include "dropletlab/kernels.hpp"
#include "dropletlab/medium.hpp"
#include "dropletlab/spectral.hpp"

namespace dlab {

/// Galerkin solution of (Delta + omega^2 n^2) p = 0, d_nu p = f, through the
/// assembled helmholtz kernel: A p = b_f.
SpectralField solve_pf(const Kernel& helm, const BoundaryField& f);

/// omega = 0 limit (Laplace-Neumann); requires mean-compatible data and pins
/// the free constant to zero mean.
SpectralField solve_pf_laplace(const ModeGrid& g, const BoundaryField& f);

/// (Delta - P^2) q = 0, d_nu q = f; the operator is coercive and diagonal.
SpectralField solve_qf(const ModeGrid& g, double P, const BoundaryField& f);

/// Effective-medium solve (Delta + omega^2 n^2 - P^2) u = 0, d_nu u = g via
/// the preconditioned Lippmann-Schwinger iteration
/// u = q^g + (D + P^2)^{-1} omega^2 Mn u. Requires the Born smallness
/// omega^2 ||n^2|| / P^2 < 1.
SpectralField solve_ug(const ModeGrid& g, const MediumSpec& medium, double omega, double P,
                       const BoundaryField& data);

/// Droplet-resolved volume Lippmann-Schwinger solve on union D_j by voxel
/// collocation; the small-M oracle validating the Foldy-Lax surrogate.
struct FineSolve {
  std::vector<Vector3d> points;
  std::vector<double> weights;
  std::vector<int> droplet;  // owning droplet per voxel
  Eigen::VectorXd v;
  std::vector<double> moments;  // int_{D_j} v per droplet
  double coupling = 0.0;        // omega^2 rho0 / k1
  double self_check_rel = -1.0;
};

FineSolve solve_vg_fine(const DropletCluster& cl, const Kernel& helm, const ResonanceParams& rp,
                        const SpectralField& S, int nvox, bool self_check = false,
                        int threads = 1);

/// Trace of v_hat = S + coupling * sum_p w_p v_p G(., x_p), the boundary
/// datum of the droplet-resolved field.
BoundaryField trace_of_fine(const Kernel& helm, const FineSolve& fine, const SpectralField& S,
                            int threads = 1);

/// All three NtD pairings for one (f, g) pair plus the J decomposition.
struct PairingEntry {
  std::string pair_id;
  cplx lambda0 = 0.0;   // <Lambda_0 f, g>
  cplx lambdaP = 0.0;   // <Lambda_P f, g>
  cplx lambdaD = 0.0;   // <Lambda_D f, g>
  cplx j_value = 0.0;   // omega^2 rho1/k1 <v,p>_D + P^2 <u,p>_Omega
  cplx j_surrogate = 0.0;  // dominant-term estimator through Foldy-Lax moments
  double identity_residual = 0.0;  // |(lambdaD - lambdaP) - J| (fine path only)
};

/// Configuration for pairing_report; the fine oracle runs only when the
/// cluster is small enough to resolve.
struct PairingConfig {
  int nvox = 8;
  int fine_oracle_max_m = 8;
  int threads = 1;
};

std::vector<PairingEntry> pairing_report(const std::vector<BoundaryField>& fs,
                                         const std::vector<BoundaryField>& gs,
                                         const std::vector<std::string>& ids,
                                         const DropletCluster& cl, const Kernel& helm,
                                         const ResonanceParams& rp,
                                         const NewtonianSpectrum& spec,
                                         const MediumSpec& medium, const PairingConfig& cfg);

/// Mean-compatible band-limited test sources: the first `count` per-face
/// cosine modes, one face mode per source, normalized in H^{-1/2}.
std::vector<BoundaryField> default_test_sources(int n, int count);

}  // namespace dlab
