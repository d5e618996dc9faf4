#include "dropletlab/geometry.hpp"

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

namespace dlab {

double DropletCluster::min_separation() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t j = i + 1; j < centers.size(); ++j)
      best = std::min(best, (centers[i] - centers[j]).norm());
  return centers.size() < 2 ? 0.0 : best;
}

double lattice_a_max(double h, double kappa) {
  // ball radius a <= cell_side/2 = a^((1-h)/3)/2  =>  a <= (1/2)^(3/(2+h))
  const double ball_fit = std::pow(0.5, 3.0 / (2.0 + h));
  // at least one droplet: kappa a^(h-1) >= 1
  const double count_fit = std::pow(kappa, 1.0 / (1.0 - h));
  // cell inside Omega: a^((1-h)/3) <= pi
  const double cell_fit = std::pow(pi, 3.0 / (1.0 - h));
  return std::min({ball_fit, count_fit, cell_fit});
}

DropletCluster build_lattice(const DomainSpec& dom, double a, double h, double kappa,
                             double margin) {
  if (!(h >= 0.0 && h < 1.0)) throw invalid_config("build_lattice: h must lie in [0,1)");
  if (!(a > 0.0)) throw invalid_config("build_lattice: a must be positive");
  if (!(kappa > 0.0)) throw invalid_config("build_lattice: kappa must be positive");
  const double amax = lattice_a_max(h, kappa);
  if (a >= amax)
    throw invalid_config("build_lattice: a = " + format_double(a) +
                         " too large, lattice does not fit (a_max = " + format_double(amax) + ")");

  DropletCluster cl;
  cl.a = a;
  cl.h = h;
  cl.kappa = kappa;
  cl.margin = margin;
  cl.cell_side = std::pow(a, (1.0 - h) / 3.0);

  const double target = kappa * std::pow(a, h - 1.0);
  int n = static_cast<int>(std::llround(std::cbrt(target)));
  if (n < 1) n = 1;

  const double side = dom.side();
  const double usable = side - 2.0 * margin;
  if (usable <= 0.0) throw invalid_config("build_lattice: margin leaves no usable interior");
  // Disjoint cells need pitch >= cell_side; shrink n if the grid is too dense.
  while (n > 1 && usable / n < cl.cell_side) --n;
  cl.grid_n = n;
  cl.pitch = usable / n;
  if (cl.pitch < cl.cell_side)
    throw invalid_config("build_lattice: cells of volume a^(1-h) do not fit disjointly");

  cl.centers.reserve(static_cast<std::size_t>(n) * n * n);
  const double origin = dom.box_lo + margin;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        cl.centers.push_back(Vector3d(origin + (i + 0.5) * cl.pitch,
                                      origin + (j + 0.5) * cl.pitch,
                                      origin + (k + 0.5) * cl.pitch));
  cl.kappa_realized = cl.centers.size() * std::pow(a, 1.0 - h);

  // Invariants: ball strictly inside its cell, cell inside Omega.
  if (a >= 0.5 * cl.cell_side)
    throw invalid_config("build_lattice: droplet ball does not fit strictly inside its cell");
  for (const auto& z : cl.centers)
    for (int d = 0; d < 3; ++d)
      if (z[d] - 0.5 * cl.cell_side < dom.box_lo - 1e-12 ||
          z[d] + 0.5 * cl.cell_side > dom.box_hi + 1e-12)
        throw invalid_config("build_lattice: cell escapes Omega");
  return cl;
}

double lattice_sum(const DropletCluster& cl, int m, double k) {
  if (m < 0 || m >= cl.count()) throw std::invalid_argument("lattice_sum: droplet index out of range");
  if (!(k > 0.0)) throw std::invalid_argument("lattice_sum: exponent must be positive");
  double s = 0.0;
  for (int j = 0; j < cl.count(); ++j) {
    if (j == m) continue;
    s += std::pow((cl.centers[m] - cl.centers[j]).norm(), -k);
  }
  return s;
}

double remainder_volume(const DomainSpec& dom, const DropletCluster& cl) {
  return dom.volume() - cl.count() * cl.cell_volume();
}

std::string cluster_to_json(const DropletCluster& cl) {
  nlohmann::json j;
  j["a"] = cl.a;
  j["h"] = cl.h;
  j["kappa"] = cl.kappa;
  j["kappa_realized"] = cl.kappa_realized;
  j["grid_n"] = cl.grid_n;
  j["pitch"] = cl.pitch;
  j["margin"] = cl.margin;
  j["cell_side"] = cl.cell_side;
  auto& centers = j["centers"] = nlohmann::json::array();
  for (const auto& z : cl.centers) centers.push_back({z[0], z[1], z[2]});
  return j.dump(2);
}

DropletCluster cluster_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  DropletCluster cl;
  cl.a = j.at("a").get<double>();
  cl.h = j.at("h").get<double>();
  cl.kappa = j.at("kappa").get<double>();
  cl.kappa_realized = j.at("kappa_realized").get<double>();
  cl.grid_n = j.at("grid_n").get<int>();
  cl.pitch = j.at("pitch").get<double>();
  cl.margin = j.value("margin", 0.0);
  cl.cell_side = j.at("cell_side").get<double>();
  for (const auto& z : j.at("centers")) cl.centers.push_back(Vector3d(z[0], z[1], z[2]));
  return cl;
}

}  // namespace dlab
