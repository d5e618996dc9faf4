#pragma once

#include <string>
#include <vector>

#include "dropletlab/common.hpp"

namespace dlab {

/// The 2pi period cell and the box Omega = [pi/2, 3pi/2]^3 strictly inside it.
/// Omega has side pi so the Neumann cosine basis has integer wavenumbers.
struct DomainSpec {
  double cell_lo = 0.0;
  double cell_hi = cell_period;
  double box_lo = omega_lo;
  double box_hi = omega_hi;

  double side() const { return box_hi - box_lo; }
  double volume() const { return side() * side() * side(); }
  Vector3d center() const {
    const double c = 0.5 * (box_lo + box_hi);
    return {c, c, c};
  }
};

/// Periodic droplet cluster: M = n^3 unit-ball droplets of radius scale `a`
/// at the sites of a regular grid inside Omega, each owning a cube cell of
/// volume a^(1-h). Grid sites not covered by cells form the remainder region.
struct DropletCluster {
  double a = 0.0;           // radius scale
  double h = 0.0;           // dilution exponent in [0,1)
  double kappa = 0.0;       // configured density constant, M ~ kappa a^(h-1)
  double kappa_realized = 0.0;  // M a^(1-h), exact by construction
  int grid_n = 0;           // sites per dimension
  double pitch = 0.0;       // grid spacing
  double margin = 0.0;      // requested extra inset from the boundary
  std::vector<Vector3d> centers;
  double cell_side = 0.0;   // a^((1-h)/3)

  int count() const { return static_cast<int>(centers.size()); }
  double cell_volume() const { return cell_side * cell_side * cell_side; }
  double min_separation() const;
};

/// Largest admissible radius scale: the droplet ball must fit in its cell,
/// the cell in Omega, and the lattice must keep at least one droplet.
double lattice_a_max(double h, double kappa);

/// Deterministic periodic lattice. The droplet count honors
/// M = floor(kappa a^(h-1)) up to cube rounding (M = n^3 with
/// n = round(cbrt(kappa a^(h-1)))); the realized kappa is recorded.
/// `margin` insets the populated grid from the boundary, thickening the
/// remainder shell without touching any invariant.
DropletCluster build_lattice(const DomainSpec& dom, double a, double h, double kappa,
                             double margin = 0.0);

/// sum_{j != m} |z_m - z_j|^{-k} over the cluster (1-based m not used; m is a
/// 0-based droplet index).
double lattice_sum(const DropletCluster& cl, int m, double k);

/// Volume of Omega not covered by droplet cells.
double remainder_volume(const DomainSpec& dom, const DropletCluster& cl);

std::string cluster_to_json(const DropletCluster& cl);
DropletCluster cluster_from_json(const std::string& text);

}  // namespace dlab
