#include "dropletlab/forward.hpp"

#include <cmath>
#include <optional>

namespace dlab {

SpectralField solve_pf(const Kernel& helm, const BoundaryField& f) {
  if (helm.kind() != KernelKind::helmholtz)
    throw std::invalid_argument("solve_pf: needs an assembled helmholtz kernel");
  const Eigen::VectorXcd b = boundary_load(helm.grid(), f);
  return SpectralField(helm.grid(), helm.solve_shifted(b, 0.0));
}

SpectralField solve_pf_laplace(const ModeGrid& g, const BoundaryField& f) {
  const Eigen::VectorXcd b = boundary_load(g, f);
  if (std::abs(b[0]) > 1e-8 * (b.norm() + 1e-300))
    throw invalid_config("solve_pf_laplace: Neumann datum is not mean-compatible");
  Eigen::VectorXcd p = Eigen::VectorXcd::Zero(g.size());
  for (std::size_t t = 1; t < g.size(); ++t) p[t] = b[t] / g.ksq(t);
  return SpectralField(g, p);
}

SpectralField solve_qf(const ModeGrid& g, double P, const BoundaryField& f) {
  if (!(P > 0.0)) throw invalid_config("solve_qf: P must be positive");
  const Eigen::VectorXcd b = boundary_load(g, f);
  Eigen::VectorXcd q(b.size());
  for (std::size_t t = 0; t < g.size(); ++t) q[t] = b[t] / (g.ksq(t) + P * P);
  return SpectralField(g, q);
}

SpectralField solve_ug(const ModeGrid& g, const MediumSpec& medium, double omega, double P,
                       const BoundaryField& data) {
  const double ratio = omega * omega * medium.max_norm() / (P * P);
  if (!(ratio < 1.0))
    throw invalid_config("solve_ug: Born smallness omega^2 ||n^2|| / P^2 = " +
                         format_double(ratio) + " >= 1");
  SpectralField q = solve_qf(g, P, data);
  Eigen::VectorXcd u = q.c;
  const double tol = 1e-13;
  for (int it = 0; it < 20000; ++it) {
    Eigen::VectorXcd nu = omega * omega * medium.apply_n2(g, u);
    for (std::size_t t = 0; t < g.size(); ++t) nu[t] /= (g.ksq(t) + P * P);
    nu += q.c;
    const double diff = (nu - u).norm();
    u.swap(nu);
    if (diff <= tol * (u.norm() + 1e-300)) return SpectralField(g, u);
  }
  throw solver_failure("solve_ug: Lippmann-Schwinger iteration did not converge");
}

FineSolve solve_vg_fine(const DropletCluster& cl, const Kernel& helm, const ResonanceParams& rp,
                        const SpectralField& S, int nvox, bool self_check, int threads) {
  if (nvox < 3) throw invalid_config("solve_vg_fine: nvox too small");
  if (cl.count() < 1) throw invalid_config("solve_vg_fine: empty cluster");

  FineSolve fine;
  fine.coupling = rp.omega_sq * rp.rho0 / rp.k1;

  const double a = cl.a;
  const double hvox = 2.0 * a / nvox;
  const double wvox = hvox * hvox * hvox;
  const double vball = 4.0 / 3.0 * pi * a * a * a;
  for (int j = 0; j < cl.count(); ++j) {
    std::vector<std::size_t> added;
    double wsum = 0.0;
    for (int i1 = 0; i1 < nvox; ++i1)
      for (int i2 = 0; i2 < nvox; ++i2)
        for (int i3 = 0; i3 < nvox; ++i3) {
          const Vector3d off(-a + (i1 + 0.5) * hvox, -a + (i2 + 0.5) * hvox,
                             -a + (i3 + 0.5) * hvox);
          if (off.norm() > a) continue;
          fine.points.push_back(cl.centers[j] + off);
          fine.weights.push_back(wvox);
          fine.droplet.push_back(j);
          added.push_back(fine.points.size() - 1);
          wsum += wvox;
        }
    // volume-corrected voxel weights
    for (std::size_t p : added) fine.weights[p] *= vball / wsum;
  }

  const std::size_t N = fine.points.size();
  const Kernel::PointBatch batch = helm.prepare_points(fine.points, threads);
  Eigen::MatrixXd B(N, N);
  parallel_for(N, threads, [&](std::size_t p) {
    for (std::size_t q = 0; q < N; ++q) {
      double kval;
      if (p == q) {
        const double req = std::cbrt(3.0 * fine.weights[p] / (4.0 * pi));
        kval = req * req / 2.0 +
               helm.pair_remainder(batch, static_cast<int>(p), static_cast<int>(q)) *
                   fine.weights[p];
      } else {
        kval = helm.pair_eval(batch, static_cast<int>(p), static_cast<int>(q)) * fine.weights[q];
      }
      B(p, q) = (p == q ? 1.0 : 0.0) - fine.coupling * kval;
    }
  });

  Eigen::VectorXd rhs(N);
  for (std::size_t p = 0; p < N; ++p) rhs[p] = evaluate(S, fine.points[p]).real();
  fine.v = B.partialPivLu().solve(rhs);

  fine.moments.assign(cl.count(), 0.0);
  for (std::size_t p = 0; p < N; ++p)
    fine.moments[fine.droplet[p]] += fine.weights[p] * fine.v[p];

  if (self_check) {
    const int coarse = std::max(3, nvox / 2);
    if (coarse < nvox) {
      const FineSolve ref = solve_vg_fine(cl, helm, rp, S, coarse, false, threads);
      double rel = 0.0;
      for (int j = 0; j < cl.count(); ++j)
        rel = std::max(rel, std::abs(ref.moments[j] - fine.moments[j]) /
                                (std::abs(fine.moments[j]) + 1e-300));
      fine.self_check_rel = rel;
      if (rel > 0.10)
        throw solver_failure("solve_vg_fine: voxel resolution too coarse, two-level moment "
                             "discrepancy " +
                             format_double(rel));
    }
  }
  return fine;
}

BoundaryField trace_of_fine(const Kernel& helm, const FineSolve& fine, const SpectralField& S,
                            int threads) {
  (void)threads;
  // gamma(S) + coupling * gamma(A^{-1} sum_p w_p v_p psi(x_p)); one solve by
  // linearity.
  const ModeGrid& g = helm.grid();
  Eigen::VectorXd q = Eigen::VectorXd::Zero(g.size());
  for (std::size_t p = 0; p < fine.points.size(); ++p)
    q += fine.weights[p] * fine.v[p] * psi_vector(g, fine.points[p]);
  const Eigen::VectorXcd col = helm.solve_shifted(q.cast<cplx>(), 0.0);
  SpectralField vhat(g, S.c + fine.coupling * col);
  return trace(vhat);
}

std::vector<BoundaryField> default_test_sources(int n, int count) {
  static const std::array<std::pair<int, int>, 8> low_modes = {
      {{1, 0}, {0, 1}, {1, 1}, {2, 0}, {0, 2}, {2, 1}, {1, 2}, {2, 2}}};
  std::vector<BoundaryField> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const int face = i % 6;
    const auto [k1, k2] = low_modes[(i / 6) % low_modes.size()];
    BoundaryField f(n, -0.5);
    // unit H^{-1/2} norm; kappa != 0 keeps the datum mean-compatible
    f.c[f.flat(face, k1, k2)] = std::pow(1.0 + double(k1 * k1 + k2 * k2), 0.25);
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<PairingEntry> pairing_report(const std::vector<BoundaryField>& fs,
                                         const std::vector<BoundaryField>& gs,
                                         const std::vector<std::string>& ids,
                                         const DropletCluster& cl, const Kernel& helm,
                                         const ResonanceParams& rp,
                                         const NewtonianSpectrum& spec,
                                         const MediumSpec& medium, const PairingConfig& cfg) {
  if (fs.size() != gs.size() || fs.size() != ids.size())
    throw std::invalid_argument("pairing_report: mismatched pair lists");
  const ModeGrid& grid = helm.grid();
  const double omega = std::sqrt(rp.omega_sq);
  const double P = rp.p();
  const int M = cl.count();

  // Foldy-Lax matrix shared across pairs, factored once.
  FoldyLaxSystem sys;
  std::optional<Eigen::PartialPivLU<Eigen::MatrixXd>> fl_lu;
  if (M >= 1) {
    SpectralField zero(grid);
    sys = assemble_foldy_lax(cl, helm, rp, spec, zero, cfg.threads);
    fl_lu.emplace(sys.A);
  }
  const double alpha = (M >= 1) ? sys.alpha_bar * std::pow(cl.a, 1.0 - cl.h) : 0.0;

  std::vector<PairingEntry> out(fs.size());
  for (std::size_t i = 0; i < fs.size(); ++i) {
    PairingEntry e;
    e.pair_id = ids[i];
    const SpectralField pf = solve_pf(helm, fs[i]);
    const SpectralField sg = solve_pf(helm, gs[i]);
    const SpectralField ug = solve_ug(grid, medium, omega, P, gs[i]);

    e.lambda0 = boundary_pairing(trace(pf), gs[i]);
    e.lambdaP = boundary_pairing(trace(ug), fs[i]);  // reciprocity

    const cplx up = (ug.c.array() * pf.c.array()).sum();  // bilinear <u, p>_Omega
    const cplx up_term = P * P * up;

    if (M >= 1) {
      Eigen::VectorXd rhs(M);
      for (int m = 0; m < M; ++m) rhs[m] = evaluate(sg, cl.centers[m]).real();
      const Eigen::VectorXd Y = fl_lu->solve(rhs);
      cplx dom = 0.0;
      for (int m = 0; m < M; ++m) dom += evaluate(pf, cl.centers[m]) * Y[m];
      e.j_surrogate = alpha * dom + up_term;

      if (M <= cfg.fine_oracle_max_m) {
        const FineSolve fine = solve_vg_fine(cl, helm, rp, sg, cfg.nvox, false, cfg.threads);
        cplx vp = 0.0;
        for (std::size_t p = 0; p < fine.points.size(); ++p)
          vp += fine.weights[p] * fine.v[p] * evaluate(pf, fine.points[p]);
        e.j_value = fine.coupling * vp + up_term;
        const BoundaryField tv = trace_of_fine(helm, fine, sg, cfg.threads);
        e.lambdaD = boundary_pairing(tv, fs[i]);
        e.identity_residual = std::abs((e.lambdaD - e.lambdaP) - e.j_value);
      } else {
        e.j_value = e.j_surrogate;
        e.lambdaD = e.lambda0 + alpha * dom;
        e.identity_residual = -1.0;
      }
    } else {
      e.lambdaD = e.lambda0;
      e.j_value = up_term;
      e.j_surrogate = up_term;
      e.identity_residual = std::abs((e.lambdaD - e.lambdaP) - e.j_value);
    }
    out[i] = e;
  }
  return out;
}

}  // namespace dlab
