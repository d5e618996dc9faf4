#include "dropletlab/quadrature.hpp"

#include <cmath>

namespace dlab {

Quadrature1D gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  Quadrature1D q;
  q.nodes.resize(n);
  q.weights.resize(n);
  // Newton iteration on Legendre polynomials, symmetric about 0.
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.nodes[i] = -x;
    q.weights[i] = w;
    q.nodes[n - 1 - i] = x;
    q.weights[n - 1 - i] = w;
  }
  return q;
}

Quadrature1D gauss_legendre(int n, double a, double b) {
  Quadrature1D q = gauss_legendre(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    q.nodes[i] = mid + half * q.nodes[i];
    q.weights[i] *= half;
  }
  return q;
}

Quadrature1D composite_gauss(int order, int panels, double a, double b) {
  if (panels < 1) throw std::invalid_argument("composite_gauss: panels must be >= 1");
  Quadrature1D base = gauss_legendre(order);
  Quadrature1D q;
  q.nodes.reserve(static_cast<std::size_t>(order) * panels);
  q.weights.reserve(static_cast<std::size_t>(order) * panels);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h, half = 0.5 * h;
    for (int i = 0; i < order; ++i) {
      q.nodes.push_back(mid + half * base.nodes[i]);
      q.weights.push_back(half * base.weights[i]);
    }
  }
  return q;
}

}  // namespace dlab
