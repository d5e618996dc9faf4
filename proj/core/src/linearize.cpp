#include "dropletlab/linearize.hpp"

#include <cmath>

#include "dropletlab/forward.hpp"

namespace dlab {

SpectralField solve_w(const SpectralField& qf, const MediumSpec& medium, double P) {
  if (!(P > 0.0)) throw invalid_config("solve_w: P must be positive");
  const ModeGrid& g = qf.grid;
  Eigen::VectorXcd w = medium.apply_n2(g, qf.c);
  for (std::size_t t = 0; t < g.size(); ++t) w[t] /= (g.ksq(t) + P * P);
  return SpectralField(g, w);
}

BornReport born_tail(const ModeGrid& g, const MediumSpec& medium, double omega, double P,
                     const BoundaryField& f, int jmax) {
  if (jmax < 2) throw invalid_config("born_tail: jmax must be >= 2");
  BornReport rep;
  rep.ratio = omega * omega * medium.max_norm() / (P * P);
  if (!(rep.ratio < 1.0))
    throw invalid_config("born_tail: series ratio " + format_double(rep.ratio) + " >= 1");

  const SpectralField qf = solve_qf(g, P, f);
  auto np_n2 = [&](const Eigen::VectorXcd& u) {
    Eigen::VectorXcd v = omega * omega * medium.apply_n2(g, u);
    for (std::size_t t = 0; t < g.size(); ++t) v[t] /= (g.ksq(t) + P * P);
    return v;
  };

  Eigen::VectorXcd term = np_n2(qf.c);  // omega^2 N^p(n^2 q), the linear term
  rep.first_born_norm = hs_norm(trace(SpectralField(g, term)), 0.5);

  BoundaryField tail_trace(g.n, 0.5);
  for (int j = 2; j <= jmax; ++j) {
    term = np_n2(term);
    const BoundaryField tr = trace(SpectralField(g, term));
    rep.term_norms.push_back(hs_norm(tr, 0.5));
    tail_trace.c += tr.c;
  }
  rep.tail_norm = hs_norm(tail_trace, 0.5);

  // Reference: gamma(u^f - q^f) - first Born term, with u^f from the full
  // effective solve.
  const SpectralField uf = solve_ug(g, medium, omega, P, f);
  BoundaryField ref = trace(uf);
  ref.c -= trace(qf).c;
  ref.c -= trace(SpectralField(g, np_n2(qf.c))).c;
  BoundaryField diff = ref;
  diff.c -= tail_trace.c;
  rep.tail_vs_reference = hs_norm(diff, 0.5);
  return rep;
}

std::vector<LinearizationSample> linearization_residual(const ModeGrid& g,
                                                        const MediumSpec& medium, double omega,
                                                        const std::vector<double>& Ps,
                                                        const std::vector<BoundaryField>& fs) {
  std::vector<LinearizationSample> out;
  out.reserve(Ps.size() * fs.size());
  for (double P : Ps) {
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const SpectralField qf = solve_qf(g, P, fs[i]);
      const SpectralField uf = solve_ug(g, medium, omega, P, fs[i]);
      const SpectralField w = solve_w(qf, medium, P);

      BoundaryField lead = trace(w);
      lead.c *= omega * omega;
      BoundaryField res = trace(uf);
      res.c -= trace(qf).c;
      res.c -= lead.c;

      LinearizationSample s;
      s.P = P;
      s.f_index = static_cast<int>(i);
      s.lead_norm = hs_norm(lead, 0.5);
      s.residual_norm = hs_norm(res, 0.5);
      s.residual_l2 = res.c.norm();
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace dlab
