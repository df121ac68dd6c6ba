#pragma once

#include <array>
#include <vector>

#include "mesh.hpp"
#include "quadrature.hpp"

namespace elwave {

/// Value of the i-th Lagrange polynomial for the given nodes at x.
double lagrange_value(const std::vector<double>& nodes, int i, double x);

/// Derivative of the i-th Lagrange polynomial for the given nodes at x.
double lagrange_derivative(const std::vector<double>& nodes, int i, double x);

/// p+1 equidistant points on [0,1] (just {0.5} for p = 0 is not supported;
/// requires p >= 1).
std::vector<double> equidistant_nodes(int p);

/// Scalar tensor-product Lagrange basis of degree p on the reference square
/// [0,1]^2, with equidistant nodes. Node k = iy*(p+1) + ix sits at
/// (nodes[ix], nodes[iy]); the basis is nodal: value(k, node_k) = 1.
class TensorBasis {
 public:
  explicit TensorBasis(int degree);

  int degree() const { return p_; }
  int size() const { return static_cast<int>(nodes_.size() * nodes_.size()); }
  const std::vector<double>& nodes_1d() const { return nodes_; }
  std::array<double, 2> node(int k) const;

  double value(int k, double x, double y) const;
  std::array<double, 2> gradient(int k, double x, double y) const;

 private:
  int p_;
  std::vector<double> nodes_;
};

/// Basis values and reference gradients tabulated at a set of points.
/// values[q][k] and gradients[q][k] for point q, basis function k.
struct ShapeTable {
  std::vector<std::vector<double>> values;
  std::vector<std::vector<std::array<double, 2>>> gradients;
};

ShapeTable tabulate(const TensorBasis& basis, const std::vector<std::array<double, 2>>& points);

/// Reference coordinates of the point with parameter s in [0,1] along a side.
std::array<double, 2> side_point(Side side, double s);

/// Chain rule for the affine map of an axis-aligned cell: reference gradient
/// to physical gradient.
inline std::array<double, 2> map_gradient_to_physical(const std::array<double, 2>& grad_ref,
                                                      const std::array<double, 2>& extents) {
  return {grad_ref[0] / extents[0], grad_ref[1] / extents[1]};
}

}  // namespace elwave
