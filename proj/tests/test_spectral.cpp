#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dropletlab/quadrature.hpp"
#include "dropletlab/spectral.hpp"
#include "oracles.hpp"

using namespace dlab;

TEST_CASE("mode 0 is the normalized constant") {
  const ModeGrid g{6};
  SpectralField f(g);
  f.c[g.flat(0, 0, 0)] = 1.0;
  for (const auto& x : {Vector3d(2.0, 2.0, 2.0), Vector3d(3.0, 4.0, 2.5)})
    CHECK(evaluate(f, x).real() == doctest::Approx(std::pow(pi, -1.5)).epsilon(1e-13));
}

TEST_CASE("evaluate rejects points outside Omega") {
  const ModeGrid g{4};
  SpectralField f(g);
  CHECK_THROWS_AS(evaluate(f, Vector3d(0.5, 2.0, 2.0)), std::invalid_argument);
}

TEST_CASE("Parseval identity against quadrature") {
  const ModeGrid g{8};
  const SpectralField f = testing::random_field(g, 7, 7);
  const int nq = 2 * g.n + 12;
  const Quadrature1D q = gauss_legendre(nq, omega_lo, omega_hi);
  double s = 0.0;
  for (int i1 = 0; i1 < nq; ++i1)
    for (int i2 = 0; i2 < nq; ++i2)
      for (int i3 = 0; i3 < nq; ++i3)
        s += q.weights[i1] * q.weights[i2] * q.weights[i3] *
             std::norm(evaluate(f, Vector3d(q.nodes[i1], q.nodes[i2], q.nodes[i3])));
  CHECK(std::sqrt(s) == doctest::Approx(f.l2_norm()).epsilon(1e-12));
}

TEST_CASE("mode orthonormality by numerical quadrature") {
  // int psi_k psi_k' = delta_kk' for a sample of pairs
  const int n = 6;
  const int nq = static_cast<int>(std::ceil(1.3 * 2 * n)) + 10;
  const Quadrature1D q = gauss_legendre(nq, omega_lo, omega_hi);
  const ModeGrid g{n};
  const std::vector<Index3> ks = {{0, 0, 0}, {1, 0, 0}, {2, 3, 1}, {5, 5, 5}, {4, 0, 2}};
  for (const auto& ka : ks)
    for (const auto& kb : ks) {
      double s = 0.0;
      for (int i1 = 0; i1 < nq; ++i1)
        for (int i2 = 0; i2 < nq; ++i2)
          for (int i3 = 0; i3 < nq; ++i3) {
            const Vector3d x(q.nodes[i1], q.nodes[i2], q.nodes[i3]);
            const double pa = phi1d(ka[0], x[0]) * phi1d(ka[1], x[1]) * phi1d(ka[2], x[2]);
            const double pb = phi1d(kb[0], x[0]) * phi1d(kb[1], x[1]) * phi1d(kb[2], x[2]);
            s += q.weights[i1] * q.weights[i2] * q.weights[i3] * pa * pb;
          }
      const double expect = (ka == kb) ? 1.0 : 0.0;
      CHECK(s == doctest::Approx(expect).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("trace: constants, single modes, and pointwise consistency") {
  const ModeGrid g{6};
  SpectralField c(g);
  c.c[g.flat(0, 0, 0)] = 1.0;
  const BoundaryField tc = trace(c);
  for (int face = 0; face < 6; ++face)
    CHECK(evaluate_face(tc, face, face_point(face, 2.0, 2.2)).real() ==
          doctest::Approx(std::pow(pi, -1.5)).epsilon(1e-13));

  // psi_(1,0,0): +cos pattern on the near x1 face, sign flip on the far face
  SpectralField m(g);
  m.c[g.flat(1, 0, 0)] = 1.0;
  const BoundaryField tm = trace(m);
  const double amp = std::sqrt(2.0 / pi) / pi;  // phi_1(pi/2) * phi_0 * phi_0
  CHECK(evaluate_face(tm, 0, face_point(0, 2.0, 2.0)).real() == doctest::Approx(amp));
  CHECK(evaluate_face(tm, 1, face_point(1, 2.0, 2.0)).real() == doctest::Approx(-amp));
  // lateral face carries the cos profile
  const Vector3d xl = face_point(2, 2.3, 2.9);
  CHECK(evaluate_face(tm, 2, xl).real() ==
        doctest::Approx(phi1d(1, xl[0]) * phi1d(0, pi / 2) * phi1d(0, xl[2])));

  // trace . evaluate consistency at random face points
  const SpectralField f = testing::random_field(g, 3, 5);
  const BoundaryField tf = trace(f);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> ud(omega_lo, omega_hi);
  for (int face = 0; face < 6; ++face) {
    const Vector3d x = face_point(face, ud(rng), ud(rng));
    CHECK(std::abs(evaluate_face(tf, face, x) - evaluate(f, x)) < 1e-10);
  }
}

TEST_CASE("boundary pairing: areas, orthogonality, quadrature oracle") {
  const int n = 6;
  BoundaryField one(n, 0.5), oneg(n, -0.5);
  for (int face = 0; face < 6; ++face) {
    one.c[one.flat(face, 0, 0)] = pi;  // the constant 1 in orthonormal face modes
    oneg.c[oneg.flat(face, 0, 0)] = pi;
  }
  CHECK(boundary_pairing(one, oneg).real() == doctest::Approx(6.0 * pi * pi).epsilon(1e-13));

  BoundaryField ua(n), ub(n);
  ua.c[ua.flat(2, 1, 0)] = 1.0;
  ub.c[ub.flat(2, 0, 1)] = 1.0;
  CHECK(std::abs(boundary_pairing(ua, ub)) == 0.0);

  // random pair against direct face quadrature
  const BoundaryField u = testing::random_boundary_field(n, 11);
  const BoundaryField v = testing::random_boundary_field(n, 12);
  const int nq = static_cast<int>(std::ceil(1.3 * 2 * n)) + 10;
  const Quadrature1D q = gauss_legendre(nq, omega_lo, omega_hi);
  cplx s = 0.0;
  for (int face = 0; face < 6; ++face)
    for (int i = 0; i < nq; ++i)
      for (int j = 0; j < nq; ++j) {
        const Vector3d x = face_point(face, q.nodes[i], q.nodes[j]);
        s += q.weights[i] * q.weights[j] * evaluate_face(u, face, x) * evaluate_face(v, face, x);
      }
  CHECK(std::abs(s - boundary_pairing(u, v)) < 1e-10);

  BoundaryField wrong(n + 1);
  CHECK_THROWS_AS(boundary_pairing(u, wrong), std::invalid_argument);
}

TEST_CASE("H^{1/2}/H^{-1/2} duality inequality") {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const BoundaryField u = testing::random_boundary_field(8, 100 + seed, 6);
    const BoundaryField g = testing::random_boundary_field(8, 200 + seed, 6);
    CHECK(std::abs(boundary_pairing(u, g)) <= hs_norm(u, 0.5) * hs_norm(g, -0.5) + 1e-12);
  }
}

TEST_CASE("shifted torus basis diagonalizes the conjugated operator (FD oracle)") {
  // apply Delta + 2i xi.grad - P^2 by 8th-order finite differences on a
  // uniform grid of the periodic cell, wrapping with the shift phase, and
  // compare with the symbol.
  const double P = 3.0;
  const Vector3c xi(cplx(2.0, -1.0), cplx(-1.5, 2.5), cplx(0.5, 1.0));
  const Vector3d shift(0.5, 0.0, 0.5);
  const int K = 3;
  TorusField f(K, shift);
  std::mt19937 rng(17);
  std::normal_distribution<double> nd;
  for (Eigen::Index t = 0; t < f.c.size(); ++t) f.c[t] = cplx(nd(rng), nd(rng));

  const int n = 128;
  const double h = cell_period / n;
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = i * h;
  const Eigen::VectorXcd vals = synth_tensor(f, xs, xs, xs);

  // symbol-applied reference
  TorusField g = f;
  for (int a = -K; a <= K; ++a)
    for (int b = -K; b <= K; ++b)
      for (int c = -K; c <= K; ++c) {
        const Vector3d w(a + shift[0], b + shift[1], c + shift[2]);
        const cplx xw = xi[0] * w[0] + xi[1] * w[1] + xi[2] * w[2];
        g.c[g.flat(a, b, c)] *= cplx(-w.squaredNorm() - P * P, 0.0) - 2.0 * xw;
      }
  const Eigen::VectorXcd ref = synth_tensor(g, xs, xs, xs);

  // 8th-order central stencils
  const double c1[4] = {4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
  const double c2[5] = {-205.0 / 72, 8.0 / 5, -1.0 / 5, 8.0 / 315, -1.0 / 560};
  // wrap phase: crossing the cell in dim d multiplies by e^{+-i 2 pi s_d}
  auto at = [&](int i, int j, int k, int d, int off) -> cplx {
    int idx[3] = {i, j, k};
    idx[d] += off;
    cplx phase = 1.0;
    if (idx[d] < 0) {
      idx[d] += n;
      phase = std::exp(cplx(0.0, -2.0 * pi * shift[d]));
    } else if (idx[d] >= n) {
      idx[d] -= n;
      phase = std::exp(cplx(0.0, 2.0 * pi * shift[d]));
    }
    return phase * vals[(static_cast<std::size_t>(idx[0]) * n + idx[1]) * n + idx[2]];
  };
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; i += 3)
    for (int j = 0; j < n; j += 3)
      for (int k = 0; k < n; k += 3) {
        cplx lap = 3.0 * c2[0] * at(i, j, k, 0, 0);
        cplx grad_term = 0.0;
        for (int d = 0; d < 3; ++d) {
          cplx der = 0.0;
          for (int o = 1; o <= 4; ++o) {
            const cplx fp = at(i, j, k, d, o), fm = at(i, j, k, d, -o);
            lap += c2[o] * (fp + fm);
            der += c1[o - 1] * (fp - fm);
          }
          grad_term += 2.0 * cplx(0, 1) * xi[d] * der / h;
        }
        const cplx fd = lap / (h * h) + grad_term -
                        P * P * at(i, j, k, 0, 0);
        const cplx rv = ref[(static_cast<std::size_t>(i) * n + j) * n + k];
        num += std::norm(fd - rv);
        den += std::norm(rv);
      }
  CHECK(std::sqrt(num / den) < 1e-6);
}

TEST_CASE("torus field norms: Parseval on the cell and Omega restriction") {
  TorusField f(2, Vector3d(0.5, 0.5, 0.0));
  std::mt19937 rng(23);
  std::normal_distribution<double> nd;
  for (Eigen::Index t = 0; t < f.c.size(); ++t) f.c[t] = cplx(nd(rng), nd(rng));

  // cell Parseval against quadrature
  const int nq = 24;
  const Quadrature1D q = gauss_legendre(nq, 0.0, cell_period);
  double s = 0.0;
  for (int i1 = 0; i1 < nq; ++i1)
    for (int i2 = 0; i2 < nq; ++i2)
      for (int i3 = 0; i3 < nq; ++i3)
        s += q.weights[i1] * q.weights[i2] * q.weights[i3] *
             std::norm(evaluate(f, Vector3d(q.nodes[i1], q.nodes[i2], q.nodes[i3])));
  CHECK(std::sqrt(s) == doctest::Approx(f.l2_norm_cell()).epsilon(1e-10));

  // Omega restriction against quadrature
  const Quadrature1D qo = gauss_legendre(nq, omega_lo, omega_hi);
  double so = 0.0;
  for (int i1 = 0; i1 < nq; ++i1)
    for (int i2 = 0; i2 < nq; ++i2)
      for (int i3 = 0; i3 < nq; ++i3)
        so += qo.weights[i1] * qo.weights[i2] * qo.weights[i3] *
              std::norm(evaluate(f, Vector3d(qo.nodes[i1], qo.nodes[i2], qo.nodes[i3])));
  CHECK(std::sqrt(so) == doctest::Approx(l2_norm_omega(f)).epsilon(1e-10));

  // synth_tensor matches pointwise evaluation
  const std::vector<double> xs = {2.0, 2.7}, ys = {3.1}, zs = {2.2, 3.7, 4.0};
  const Eigen::VectorXcd v = synth_tensor(f, xs, ys, zs);
  std::size_t t = 0;
  for (double x : xs)
    for (double y : ys)
      for (double z : zs) CHECK(std::abs(v[t++] - evaluate(f, Vector3d(x, y, z))) < 1e-12);
}

TEST_CASE("centered cosine-exponential integrals") {
  // against adaptive quadrature for complex z
  const Quadrature1D q = gauss_legendre(64, omega_lo, omega_hi);
  for (int k : {0, 1, 5}) {
    for (const cplx z : {cplx(3.0, 0.4), cplx(-2.0, 1.5), cplx(0.0, 0.0)}) {
      cplx ref = 0.0;
      for (std::size_t i = 0; i < q.nodes.size(); ++i)
        ref += q.weights[i] * phi1d(k, q.nodes[i]) *
               std::exp(cplx(0.0, 1.0) * z * (q.nodes[i] - pi));
      CHECK(std::abs(cos_exp_integral_centered(k, z) - ref) < 1e-12);
    }
  }
}
