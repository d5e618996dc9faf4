#pragma once

#include <Eigen/Dense>

#include "dropletlab/ball_spectrum.hpp"
#include "dropletlab/geometry.hpp"
#include "dropletlab/kernels.hpp"
#include "dropletlab/spectral.hpp"

namespace dlab {

/// Point-interaction system: unit diagonal, off-diagonal
/// -alpha_bar a^{1-h} G(z_m, z_j), right-hand side S(z_m).
struct FoldyLaxSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd rhs;
  std::vector<Vector3d> centers;
  double alpha_bar = 0.0;  // alpha / a^{1-h}
  double a = 0.0;
  double h = 0.0;
};

/// alpha_bar from the resonance configuration and spectrum (full spectral
/// sum, scaled by a^{h-1}).
double alpha_bar(const ResonanceParams& rp, const NewtonianSpectrum& spec);

/// Assembles the interaction matrix with the stable kernel evaluator (at the
/// acceptance scales the droplet separation drops below the bilinear-series
/// cutoff, where only the singular-split path is trustworthy).
FoldyLaxSystem assemble_foldy_lax(const DropletCluster& cl, const Kernel& helm,
                                  const ResonanceParams& rp, const NewtonianSpectrum& spec,
                                  const SpectralField& S, int threads = 1);

struct FoldyLaxSolution {
  Eigen::VectorXd Y;
  double condition_estimate = 0.0;
  double residual = 0.0;  // ||A Y - rhs||_2
};

FoldyLaxSolution solve_foldy_lax(const FoldyLaxSystem& sys);

/// Continuous Lippmann-Schwinger comparison field:
/// (I - alpha_bar N_G) Y = S in mode space.
SpectralField continuous_lse(const Kernel& helm, double alpha_bar, const SpectralField& S);

/// max_m |Y_m - Y(z_m)| between the algebraic solution and the continuous
/// field sampled at the centers.
double discrete_continuum_deviation(const FoldyLaxSystem& sys, const FoldyLaxSolution& sol,
                                    const SpectralField& Y_field);

struct CoercivityReport {
  double min_eig = 0.0;          // smallest eigenvalue of the symmetrized form
  double bound_ratio = 0.0;      // ||u|| P^2 / ||g_tilde|| on the test datum
  double alpha_min = 0.0;        // min over Omega of P^2 - omega^2 n^2
};

/// Discrete Lax-Milgram check of the form <alpha u, u> + <alpha N^phi(alpha u), u>
/// with alpha(x) = P^2 - omega^2 n^2(x), on the zero-mean subspace fixed by
/// the mean-corrected phi convention.
CoercivityReport coercivity_check(const ModeGrid& g, const MediumSpec& medium, double omega,
                                  double P, const Eigen::VectorXd& test_data);

}  // namespace dlab
