#include "dropletlab/foldy_lax.hpp"

#include <cmath>
#include <limits>

namespace dlab {

double alpha_bar(const ResonanceParams& rp, const NewtonianSpectrum& spec) {
  const AlphaSplit split = scattering_alpha(rp, spec);
  return split.total * std::pow(rp.a, rp.h - 1.0);
}

FoldyLaxSystem assemble_foldy_lax(const DropletCluster& cl, const Kernel& helm,
                                  const ResonanceParams& rp, const NewtonianSpectrum& spec,
                                  const SpectralField& S, int threads) {
  if (cl.count() < 1) throw invalid_config("assemble_foldy_lax: empty cluster");
  if (cl.a != rp.a || cl.h != rp.h)
    throw invalid_config("assemble_foldy_lax: cluster and resonance scales disagree");

  FoldyLaxSystem sys;
  sys.centers = cl.centers;
  sys.a = cl.a;
  sys.h = cl.h;
  sys.alpha_bar = alpha_bar(rp, spec);

  const int M = cl.count();
  const double coupling = sys.alpha_bar * std::pow(cl.a, 1.0 - cl.h);
  const Kernel::PointBatch batch = helm.prepare_points(cl.centers, threads);

  sys.A = Eigen::MatrixXd::Zero(M, M);
  parallel_for(M, threads, [&](std::size_t m) {
    sys.A(m, m) = 1.0;
    for (int j = 0; j < M; ++j) {
      if (static_cast<int>(m) == j) continue;
      sys.A(m, j) = -coupling * helm.pair_eval(batch, static_cast<int>(m), j);
    }
  });

  sys.rhs.resize(M);
  for (int m = 0; m < M; ++m) {
    const cplx s = evaluate(S, cl.centers[m]);
    sys.rhs[m] = s.real();
  }
  return sys;
}

FoldyLaxSolution solve_foldy_lax(const FoldyLaxSystem& sys) {
  FoldyLaxSolution sol;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.A);
  const auto& U = lu.matrixLU();
  double umax = 0.0, umin = std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t < U.rows(); ++t) {
    const double u = std::abs(U(t, t));
    umax = std::max(umax, u);
    umin = std::min(umin, u);
  }
  sol.condition_estimate = (umin > 0.0) ? umax / umin : std::numeric_limits<double>::infinity();
  if (!(sol.condition_estimate < 1e12))
    throw solver_failure(
        "solve_foldy_lax: interaction matrix is numerically singular (condition estimate " +
        format_double(sol.condition_estimate) + "), parameters outside the resonant regime");
  sol.Y = lu.solve(sys.rhs);
  sol.residual = (sys.A * sol.Y - sys.rhs).norm();
  return sol;
}

SpectralField continuous_lse(const Kernel& helm, double abar, const SpectralField& S) {
  if (!(S.grid == helm.grid())) throw std::invalid_argument("continuous_lse: grid mismatch");
  // Y = S + abar * Z with (A_G - abar I) Z = S, Z = N_G(Y).
  const Eigen::VectorXcd Z = helm.solve_shifted(S.c, abar);
  return SpectralField(S.grid, S.c + abar * Z);
}

double discrete_continuum_deviation(const FoldyLaxSystem& sys, const FoldyLaxSolution& sol,
                                    const SpectralField& Y_field) {
  double dev = 0.0;
  for (std::size_t m = 0; m < sys.centers.size(); ++m) {
    const cplx y = evaluate(Y_field, sys.centers[m]);
    dev = std::max(dev, std::abs(sol.Y[static_cast<Eigen::Index>(m)] - y.real()));
  }
  return dev;
}

CoercivityReport coercivity_check(const ModeGrid& g, const MediumSpec& medium, double omega,
                                  double P, const Eigen::VectorXd& test_data) {
  if (!(P * P > omega * omega * medium.max_norm()))
    throw invalid_config("coercivity_check: P^2 must exceed omega^2 ||n^2||");
  const std::size_t sz = g.size();
  if (static_cast<std::size_t>(test_data.size()) != sz)
    throw std::invalid_argument("coercivity_check: test datum size mismatch");

  // M_alpha = P^2 I - omega^2 Mn, D_phi = mean-corrected Laplace weights.
  Eigen::MatrixXd Malpha = -omega * omega * medium.n2_matrix(g);
  Malpha.diagonal().array() += P * P;
  Eigen::VectorXd dphi(sz);
  for (std::size_t t = 0; t < sz; ++t) {
    const double k2 = g.ksq(t);
    dphi[t] = (k2 == 0.0) ? 0.0 : 1.0 / k2;
  }
  const Eigen::MatrixXd F = Malpha + Malpha * dphi.asDiagonal() * Malpha;
  const Eigen::MatrixXd Fs = 0.5 * (F + F.transpose());

  CoercivityReport rep;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Fs, Eigen::EigenvaluesOnly);
  rep.min_eig = eig.eigenvalues().minCoeff();

  // (I + D_phi M_alpha) u = g_tilde on the zero-mean subspace.
  Eigen::VectorXd gt = test_data;
  gt[0] = 0.0;  // zero mean, matching the mean-corrected phi convention
  Eigen::MatrixXd Op = Eigen::MatrixXd::Identity(sz, sz) + dphi.asDiagonal() * Malpha;
  const Eigen::VectorXd u = Op.partialPivLu().solve(gt);
  rep.bound_ratio = u.norm() * P * P / gt.norm();

  const int ng = 16;
  rep.alpha_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < ng; ++i)
    for (int j = 0; j < ng; ++j)
      for (int k = 0; k < ng; ++k) {
        const Vector3d x(omega_lo + (i + 0.5) * pi / ng, omega_lo + (j + 0.5) * pi / ng,
                         omega_lo + (k + 0.5) * pi / ng);
        rep.alpha_min = std::min(rep.alpha_min, P * P - omega * omega * medium.eval(x));
      }
  return rep;
}

}  // namespace dlab
