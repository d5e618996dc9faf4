#pragma once

#include <vector>

#include "dropletlab/common.hpp"

namespace dlab {

/// One eigenpair of the free-space Newtonian operator
///   N(f)(x) = int_B f(y) / (4 pi |x-y|) dy
/// on the ball of radius `radius`, block-diagonalized by spherical-harmonic
/// degree l. `overlap` is <1, e>_{L2(B)}; it vanishes for l >= 1.
struct BallMode {
  int l = 0;
  int radial = 0;  // radial index within the degree-l block, 0-based
  double lambda = 0.0;
  double overlap = 0.0;
  std::vector<double> phi;  // sqrt(4 pi (2l+1)) r g(r) at the quadrature nodes
};

struct NewtonianSpectrum {
  double radius = 1.0;
  int resolution = 0;  // radial quadrature points
  int lmax = 0;
  int nradial = 0;
  std::vector<double> nodes;    // radial quadrature nodes
  std::vector<double> weights;  // radial quadrature weights
  std::vector<BallMode> modes;  // sorted by decreasing lambda

  /// Radial (l = 0) modes only, in decreasing-lambda order.
  std::vector<const BallMode*> radial_modes() const;
};

/// Nystrom eigensolve of the Newtonian operator, one symmetric block per
/// spherical-harmonic degree. Eigenvalues converge under refinement; a
/// residual check guards against a failed eigensolve.
NewtonianSpectrum solve_ball_spectrum(int resolution, int lmax = 4, int nradial = 6,
                                      double radius = 1.0);

/// Resonance configuration for a droplet family. All derived values follow
/// from (k0, rho0, c_n0, a, h) and the selected radial mode:
///   omega0^2 = k0 / (rho0 lambda_B),  omega^2 = omega0^2 (1 - c_n0 a^h / k0),
///   k1 = k0 a^2,  P^2 = -k0 <1,e>^2 / (lambda_B c_n0).
/// The dispersion identity k1 - omega^2 rho0 lambda_n0 = c_n0 a^(2+h) then
/// holds exactly by construction.
struct ResonanceParams {
  int n0 = 0;  // radial-mode index (0 = fundamental)
  double c_n0 = -0.25;
  double k0 = 1.0;
  double rho0 = 1.0;
  double a = 0.0;
  double h = 0.0;
  // derived
  double lambda_b = 0.0;
  double overlap = 0.0;
  double omega0_sq = 0.0;
  double omega_sq = 0.0;
  double k1 = 0.0;
  double p_sq = 0.0;

  double omega() const { return std::sqrt(omega_sq); }
  double p() const { return std::sqrt(p_sq); }
  double dispersion_residual() const {
    return k1 - omega_sq * rho0 * (a * a * lambda_b) - c_n0 * std::pow(a, 2.0 + h);
  }
};

/// Validates the admissibility window for c_n0 (negative, above
/// -<1,e>^2 inf k / rho with the background bulk modulus bound passed in as
/// `n2_max` via inf k = rho_bg / n2_max), derives all resonance quantities,
/// and checks the spectral separation |k1 - omega^2 rho0 lambda_n| >~ a^2 for
/// every other computed mode.
ResonanceParams make_resonance(const NewtonianSpectrum& spec, int n0, double c_n0, double k0,
                               double rho0, double a, double h, double n2_max = 1.0,
                               double rho_bg = 1.0);

struct AlphaSplit {
  double total = 0.0;     // full spectral sum
  double dominant = 0.0;  // -P^2 a^{1-h}
  double tail = 0.0;      // total - dominant
};

/// Scattering coefficient alpha = sum_n <1,e_n>^2 omega^2 rho1 /
/// (k1 - omega^2 rho1 lambda_n) over the droplet-scale spectrum
/// (lambda_n = a^2 lambda_n^B, <1,e_n> = a^{3/2} <1,e_n^B>).
AlphaSplit scattering_alpha(const ResonanceParams& rp, const NewtonianSpectrum& spec,
                            int n_terms = 0);

/// Roots of the radial matching condition for the unit ball: interior
/// j_l(k r) against exterior r^{-l-1}, i.e. k j_l'(k) + (l+1) j_l(k) = 0;
/// eigenvalues are 1/k^2. For l = 0 this reduces to cos k = 0. Serves as the
/// independent oracle for the Nystrom solve.
std::vector<double> ball_eigenvalues_oracle(int l, int count);

/// Closed-form overlap <1, e_n>_{L2(B)} for the radial mode with
/// k = (2n+1) pi / 2 (unit ball).
double ball_overlap_oracle(int n);

}  // namespace dlab
