#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace elwave {

/// 1D quadrature rule on the reference interval [0,1].
struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;
  int exactness = 0;  ///< integrates polynomials up to this degree

  std::size_t size() const { return points.size(); }
};

/// Tensor-product rule on the reference square [0,1]^2.
struct QuadratureRule2d {
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// n-point Gauss-Legendre rule on [0,1], exact to degree 2n-1. Throws for n < 1.
QuadratureRule gauss_legendre(int n);

/// n-point Gauss-Lobatto rule on [0,1] (endpoints included), exact to degree
/// 2n-3. Throws for n < 2.
QuadratureRule gauss_lobatto(int n);

/// Tensor product of two 1D rules, x-major point ordering.
QuadratureRule2d tensor_rule(const QuadratureRule& rule_x, const QuadratureRule& rule_y);

}  // namespace elwave
