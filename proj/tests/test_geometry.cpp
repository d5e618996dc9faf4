#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dropletlab/geometry.hpp"

using namespace dlab;

namespace {
const DomainSpec dom;
}

TEST_CASE("direct construction: kappa a^(h-1) = 8 gives the 2x2x2 grid") {
  const DropletCluster cl = build_lattice(dom, 0.125, 0.0, 1.0);
  CHECK(cl.count() == 8);
  CHECK(cl.grid_n == 2);
  CHECK(cl.pitch == doctest::Approx(pi / 2.0).epsilon(1e-14));
  CHECK(cl.cell_side == doctest::Approx(0.5).epsilon(1e-14));
  // every ball strictly inside its cell, every cell inside Omega
  for (const auto& z : cl.centers)
    for (int d = 0; d < 3; ++d) {
      CHECK(z[d] - cl.a > z[d] - 0.5 * cl.cell_side);
      CHECK(z[d] - 0.5 * cl.cell_side >= dom.box_lo);
      CHECK(z[d] + 0.5 * cl.cell_side <= dom.box_hi);
    }
  CHECK(cl.min_separation() == doctest::Approx(pi / 2.0));
}

TEST_CASE("droplet count scales like a^(h-1)") {
  std::vector<double> as = {1.0 / 8, 1.0 / 16, 1.0 / 32};
  std::vector<double> ms;
  for (double a : as) ms.push_back(double(build_lattice(dom, a, 0.0, pi * pi * pi).count()));
  const double slope = fit_loglog_slope(as, ms);
  CHECK(slope > -1.25);
  CHECK(slope < -0.75);
  // kappa is realized exactly up to cube rounding
  for (double a : as) {
    const DropletCluster cl = build_lattice(dom, a, 0.0, pi * pi * pi);
    CHECK(cl.kappa_realized == doctest::Approx(cl.count() * a).epsilon(1e-12));
  }
}

TEST_CASE("degenerate lattice: one centered droplet near a_max") {
  const double amax = lattice_a_max(0.0, 1.0);
  const DropletCluster cl = build_lattice(dom, 0.99 * amax, 0.0, 1.0);
  CHECK(cl.count() == 1);
  CHECK(cl.centers[0][0] == doctest::Approx(pi));
  CHECK(cl.centers[0][1] == doctest::Approx(pi));
  CHECK(cl.centers[0][2] == doctest::Approx(pi));
}

TEST_CASE("lattice rejects impossible parameters") {
  CHECK_THROWS_AS(build_lattice(dom, lattice_a_max(0.0, 1.0), 0.0, 1.0), invalid_config);
  CHECK_THROWS_AS(build_lattice(dom, 0.05, 1.0, 1.0), invalid_config);
  CHECK_THROWS_AS(build_lattice(dom, 0.05, -0.1, 1.0), invalid_config);
  CHECK_THROWS_AS(build_lattice(dom, -0.05, 0.0, 1.0), invalid_config);
}

TEST_CASE("lattice is reproducible") {
  const DropletCluster a = build_lattice(dom, 1.0 / 16, 0.25, pi * pi * pi);
  const DropletCluster b = build_lattice(dom, 1.0 / 16, 0.25, pi * pi * pi);
  REQUIRE(a.count() == b.count());
  for (int i = 0; i < a.count(); ++i) CHECK((a.centers[i] - b.centers[i]).norm() == 0.0);
}

TEST_CASE("lattice_sum: empty sum and scaling in the separation") {
  const DropletCluster single = build_lattice(dom, 0.3, 0.0, 1.0);
  CHECK(lattice_sum(single, 0, 2.0) == 0.0);

  // direct summation over explicit lattices; slopes against d within 20%
  std::vector<double> ds, s2, s4;
  for (double a : {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    const DropletCluster cl = build_lattice(dom, a, 0.0, pi * pi * pi);
    // droplet closest to the center for a symmetric neighborhood
    int m = 0;
    double best = 1e9;
    for (int j = 0; j < cl.count(); ++j) {
      const double r = (cl.centers[j] - dom.center()).norm();
      if (r < best) {
        best = r;
        m = j;
      }
    }
    ds.push_back(cl.min_separation());
    s2.push_back(lattice_sum(cl, m, 2.0));
    s4.push_back(lattice_sum(cl, m, 4.0));
  }
  const double slope2 = fit_loglog_slope(ds, s2);
  const double slope4 = fit_loglog_slope(ds, s4);
  CHECK(std::abs(slope2 + 3.0) < 0.6);  // O(d^-3) for k < 3
  CHECK(std::abs(slope4 + 4.0) < 0.8);  // O(d^-k) for k > 3
}

TEST_CASE("remainder volume: exact tiling and margin scaling") {
  // exact tiling: pitch == cell side == pi/4 at h = 1/2
  const double h = 0.5;
  const double a = std::pow(pi / 4.0, 6.0);
  const double kappa = 64.0 * std::pow(a, 1.0 - h);
  const DropletCluster cl = build_lattice(dom, a, h, kappa);
  CHECK(cl.count() == 64);
  CHECK(remainder_volume(dom, cl) == doctest::Approx(0.0).epsilon(1e-10));

  // forced half-cell margin: remainder ~ a^((1-h)/3), log-log slope in [0.2, 0.5]
  std::vector<double> as, rem;
  for (int m = 4; m <= 9; ++m) {
    const double am = std::pow(pi / (m + 0.5), 3.0);  // h = 0
    const DropletCluster c = build_lattice(dom, am, 0.0, pi * pi * pi);
    as.push_back(am);
    rem.push_back(remainder_volume(dom, c));
  }
  const double slope = fit_loglog_slope(as, rem);
  CHECK(slope > 0.2);
  CHECK(slope < 0.5);
}

TEST_CASE("remainder exponent flattens as h -> 1") {
  auto slope_at = [&](double h) {
    std::vector<double> as, rem;
    for (int m = 4; m <= 9; ++m) {
      const double s = pi / (m + 0.5);
      const double am = std::pow(s, 3.0 / (1.0 - h));
      const DropletCluster c = build_lattice(dom, am, h, pi * pi * pi);
      as.push_back(am);
      rem.push_back(remainder_volume(dom, c));
    }
    return fit_loglog_slope(as, rem);
  };
  const double s0 = slope_at(0.0);
  const double s6 = slope_at(0.6);
  CHECK(s6 < 0.6 * s0);
  CHECK(s6 == doctest::Approx((1.0 - 0.6) / 3.0).epsilon(0.35));
}

TEST_CASE("min separation respects the paper scale") {
  for (double h : {0.0, 0.5}) {
    const DropletCluster cl = build_lattice(dom, 1.0 / 32, h, pi * pi * pi);
    CHECK(cl.min_separation() >= 0.99 * std::pow(cl.a, (1.0 - h) / 3.0));
  }
}

TEST_CASE("cluster JSON round trip") {
  const DropletCluster cl = build_lattice(dom, 1.0 / 16, 0.5, pi * pi * pi, 0.3);
  const DropletCluster back = cluster_from_json(cluster_to_json(cl));
  REQUIRE(back.count() == cl.count());
  CHECK(back.a == cl.a);
  CHECK(back.h == cl.h);
  CHECK(back.margin == cl.margin);
  for (int i = 0; i < cl.count(); ++i) CHECK((back.centers[i] - cl.centers[i]).norm() < 1e-15);
}
