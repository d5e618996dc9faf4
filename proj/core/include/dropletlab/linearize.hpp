#pragma once

#include "dropletlab/medium.hpp"
#include "dropletlab/spectral.hpp"

namespace dlab {

/// W = N^p(n^2 q^f): solution of (Delta - P^2) W = -n^2 q^f with zero Neumann
/// trace, diagonal in mode space after the band multiply.
SpectralField solve_w(const SpectralField& qf, const MediumSpec& medium, double P);

/// Born series bookkeeping for the trace expansion of u^f - q^f.
struct BornReport {
  double ratio = 0.0;  // omega^2 ||n^2|| ||N^p|| with ||N^p|| = 1/P^2 exactly
  std::vector<double> term_norms;  // H^{1/2} proxy norms of K_j, j = 2..jmax
  double first_born_norm = 0.0;    // ||omega^2 gamma N^p(n^2 q^f)||
  double tail_norm = 0.0;          // || sum_{j>=2} K_j ||
  double tail_vs_reference = 0.0;  // tail sum against gamma(u^f - q^f - first term)
};

BornReport born_tail(const ModeGrid& g, const MediumSpec& medium, double omega, double P,
                     const BoundaryField& f, int jmax);

struct LinearizationSample {
  double P = 0.0;
  int f_index = 0;
  double lead_norm = 0.0;      // H^{1/2} proxy of omega^2 gamma W
  double residual_norm = 0.0;  // H^{1/2} proxy of Lambda_P f - gamma q^f - omega^2 gamma W
  double residual_l2 = 0.0;    // plain L2 face norm of the same residual
};

/// Linearization residual sweep over P for a family of Neumann data.
std::vector<LinearizationSample> linearization_residual(const ModeGrid& g,
                                                        const MediumSpec& medium, double omega,
                                                        const std::vector<double>& Ps,
                                                        const std::vector<BoundaryField>& fs);

}  // namespace dlab
