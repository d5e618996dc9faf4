#include "dropletlab/ball_spectrum.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "dropletlab/quadrature.hpp"

namespace dlab {

namespace {

// Legendre P_l(u) by recurrence.
double legendre(int l, double u) {
  if (l == 0) return 1.0;
  double p0 = 1.0, p1 = u;
  for (int k = 2; k <= l; ++k) {
    const double p2 = ((2 * k - 1) * u * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// integral of the m = 0 real spherical harmonic of degree l over S^2,
// computed by quadrature (exact up to machine for modest l).
double sphere_integral_ylm0(int l) {
  const Quadrature1D q = gauss_legendre(64, -1.0, 1.0);
  double s = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * legendre(l, q.nodes[i]);
  return 2.0 * pi * std::sqrt((2.0 * l + 1.0) / (4.0 * pi)) * s;
}

}  // namespace

std::vector<const BallMode*> NewtonianSpectrum::radial_modes() const {
  std::vector<const BallMode*> out;
  for (const auto& m : modes)
    if (m.l == 0) out.push_back(&m);
  std::sort(out.begin(), out.end(),
            [](const BallMode* a, const BallMode* b) { return a->lambda > b->lambda; });
  return out;
}

NewtonianSpectrum solve_ball_spectrum(int resolution, int lmax, int nradial, double radius) {
  if (resolution < 16) throw invalid_config("solve_ball_spectrum: resolution must be >= 16");
  if (lmax < 0 || nradial < 1) throw invalid_config("solve_ball_spectrum: bad block sizes");

  NewtonianSpectrum spec;
  spec.radius = radius;
  spec.resolution = resolution;
  spec.lmax = lmax;
  spec.nradial = nradial;

  const Quadrature1D q = gauss_legendre(resolution, 0.0, radius);
  spec.nodes = q.nodes;
  spec.weights = q.weights;

  for (int l = 0; l <= lmax; ++l) {
    // Symmetrized radial kernel min^{l+1}/max^l / (2l+1) acting on
    // phi = (normalization) * r g(r).
    Eigen::MatrixXd M(resolution, resolution);
    for (int i = 0; i < resolution; ++i)
      for (int j = 0; j <= i; ++j) {
        const double lo = std::min(q.nodes[i], q.nodes[j]);
        const double hi = std::max(q.nodes[i], q.nodes[j]);
        const double ker = std::pow(lo, l + 1) * std::pow(hi, -l) / (2.0 * l + 1.0);
        const double v = std::sqrt(q.weights[i] * q.weights[j]) * ker;
        M(i, j) = v;
        M(j, i) = v;
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M);
    if (eig.info() != Eigen::Success)
      throw solver_failure("solve_ball_spectrum: eigensolve failed for degree l = " +
                           std::to_string(l));

    const double angular = sphere_integral_ylm0(l);
    for (int r = 0; r < nradial; ++r) {
      const int idx = resolution - 1 - r;  // eigenvalues ascend in Eigen
      BallMode mode;
      mode.l = l;
      mode.radial = r;
      mode.lambda = eig.eigenvalues()[idx];
      if (!(mode.lambda > 0.0))
        throw solver_failure("solve_ball_spectrum: nonpositive Newtonian eigenvalue");
      Eigen::VectorXd u = eig.eigenvectors().col(idx);
      // phi at nodes; sign fixed so the radial overlap is nonnegative.
      double ovl = 0.0;
      for (int i = 0; i < resolution; ++i) ovl += std::sqrt(q.weights[i]) * u[i] * q.nodes[i];
      if (ovl < 0.0) {
        u = -u;
        ovl = -ovl;
      }
      mode.phi.resize(resolution);
      for (int i = 0; i < resolution; ++i) mode.phi[i] = u[i] / std::sqrt(q.weights[i]);
      // <1, e>: radial modes carry sqrt(4 pi) * int phi r dr; higher degrees
      // pick up the (numerically zero) surface integral of Y_l0.
      if (l == 0)
        mode.overlap = std::sqrt(4.0 * pi) * ovl;
      else
        mode.overlap = angular * ovl;
      spec.modes.push_back(std::move(mode));
    }
  }
  std::sort(spec.modes.begin(), spec.modes.end(),
            [](const BallMode& a, const BallMode& b) { return a.lambda > b.lambda; });
  return spec;
}

ResonanceParams make_resonance(const NewtonianSpectrum& spec, int n0, double c_n0, double k0,
                               double rho0, double a, double h, double n2_max, double rho_bg) {
  if (std::abs(spec.radius - 1.0) > 1e-14)
    throw invalid_config("make_resonance: resonance constants need the unit-ball spectrum");
  const auto radial = spec.radial_modes();
  if (n0 < 0 || n0 >= static_cast<int>(radial.size()))
    throw invalid_config("make_resonance: radial mode index out of range");
  if (!(c_n0 < 0.0))
    throw invalid_config("make_resonance: the detuning constant must be negative (got " +
                         format_double(c_n0) + ")");
  if (!(a > 0.0 && h >= 0.0 && h < 1.0)) throw invalid_config("make_resonance: bad (a, h)");
  if (!(k0 > 0.0 && rho0 > 0.0)) throw invalid_config("make_resonance: k0, rho0 must be positive");

  ResonanceParams rp;
  rp.n0 = n0;
  rp.c_n0 = c_n0;
  rp.k0 = k0;
  rp.rho0 = rho0;
  rp.a = a;
  rp.h = h;
  rp.lambda_b = radial[n0]->lambda;
  rp.overlap = radial[n0]->overlap;

  // admissibility window (both forms coincide when the densities are 1)
  const double inf_k = rho_bg / n2_max;
  const double window = inf_k * rp.overlap * rp.overlap / rho0;
  if (!(c_n0 > -window))
    throw invalid_config("make_resonance: detuning constant below the admissibility window (" +
                         format_double(-window) + ", 0)");

  rp.omega0_sq = k0 / (rho0 * rp.lambda_b);
  rp.omega_sq = rp.omega0_sq * (1.0 - c_n0 * std::pow(a, h) / k0);
  rp.k1 = k0 * a * a;
  rp.p_sq = -k0 * rp.overlap * rp.overlap / (rp.lambda_b * c_n0);

  if (!(rp.p_sq > rp.omega0_sq * n2_max))
    throw invalid_config("make_resonance: P^2 does not exceed omega0^2 ||n^2||");

  // spectral separation: every other mode must stay off resonance by ~ a^2
  const double sep_min = 0.05 * k0;
  for (const auto& m : spec.modes) {
    if (m.l == 0) {
      // identify position within the radial ladder
      const auto it = std::find(radial.begin(), radial.end(), &m);
      if (it != radial.end() && static_cast<int>(it - radial.begin()) == n0) continue;
    }
    const double gap = std::abs(rp.k1 - rp.omega_sq * rho0 * (a * a * m.lambda));
    if (gap < sep_min * a * a)
      throw solver_failure("make_resonance: separation violated, mode (l=" + std::to_string(m.l) +
                           ", r=" + std::to_string(m.radial) + ") is accidentally resonant");
  }
  return rp;
}

AlphaSplit scattering_alpha(const ResonanceParams& rp, const NewtonianSpectrum& spec,
                            int n_terms) {
  const auto radial = spec.radial_modes();
  if (n_terms <= 0 || n_terms > static_cast<int>(spec.modes.size()))
    n_terms = static_cast<int>(spec.modes.size());

  const double a = rp.a;
  const double w2rho = rp.omega_sq * rp.rho0;
  AlphaSplit out;
  int used = 0;
  for (const auto& m : spec.modes) {
    if (used++ >= n_terms) break;
    if (m.l != 0) continue;  // zero overlap, exactly no contribution
    const double ovl_d = std::pow(a, 1.5) * m.overlap;
    const double lam_d = a * a * m.lambda;
    const double denom = rp.k1 - w2rho * lam_d;
    if (std::abs(denom) < 1e-300)
      throw solver_failure("scattering_alpha: resonant denominator in the spectral sum");
    out.total += ovl_d * ovl_d * w2rho / denom;
  }
  out.dominant = -rp.p_sq * std::pow(a, 1.0 - rp.h);
  out.tail = out.total - out.dominant;
  return out;
}

std::vector<double> ball_eigenvalues_oracle(int l, int count) {
  if (count < 1) return {};
  std::vector<double> out;
  if (l == 0) {
    // cos k = 0
    for (int n = 0; n < count; ++n) {
      const double k = (2.0 * n + 1.0) * pi / 2.0;
      out.push_back(1.0 / (k * k));
    }
    return out;
  }
  // roots of j_{l-1}
  const int m = l - 1;
  double x = 0.5;
  double prev = std::sph_bessel(m, x);
  const double step = 0.02;
  while (static_cast<int>(out.size()) < count) {
    const double xn = x + step;
    const double cur = std::sph_bessel(m, xn);
    if (prev == 0.0 || (prev < 0.0) != (cur < 0.0)) {
      double lo = x, hi = xn;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = std::sph_bessel(m, mid);
        if ((fm < 0.0) == (std::sph_bessel(m, lo) < 0.0))
          lo = mid;
        else
          hi = mid;
      }
      const double root = 0.5 * (lo + hi);
      out.push_back(1.0 / (root * root));
    }
    x = xn;
    prev = cur;
    if (x > 1000.0) throw solver_failure("ball_eigenvalues_oracle: root search ran away");
  }
  return out;
}

double ball_overlap_oracle(int n) {
  const double k = (2.0 * n + 1.0) * pi / 2.0;
  return 4.0 * pi / (k * k * std::sqrt(2.0 * pi));
}

}  // namespace dlab
