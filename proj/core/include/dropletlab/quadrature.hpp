#pragma once

#include <vector>

#include "dropletlab/common.hpp"

namespace dlab {

struct Quadrature1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1].
Quadrature1D gauss_legendre(int n);

/// Gauss-Legendre rule mapped to [a, b].
Quadrature1D gauss_legendre(int n, double a, double b);

/// Composite Gauss rule on [a, b] with `panels` panels of `order` points each.
/// Used for oscillatory 1D transforms where a single panel would need an
/// impractically high order.
Quadrature1D composite_gauss(int order, int panels, double a, double b);

}  // namespace dlab
