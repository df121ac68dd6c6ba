#include "shapes.hpp"

#include <stdexcept>

namespace elwave {

double lagrange_value(const std::vector<double>& nodes, int i, double x) {
  const int n = static_cast<int>(nodes.size());
  if (i < 0 || i >= n) {
    throw std::out_of_range("lagrange_value: bad node index");
  }
  double v = 1.0;
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    v *= (x - nodes[j]) / (nodes[i] - nodes[j]);
  }
  return v;
}

double lagrange_derivative(const std::vector<double>& nodes, int i, double x) {
  const int n = static_cast<int>(nodes.size());
  if (i < 0 || i >= n) {
    throw std::out_of_range("lagrange_derivative: bad node index");
  }
  // d/dx prod_j (x - x_j)/(x_i - x_j) = sum_m (1/(x_i - x_m)) prod_{j != m} ...
  double sum = 0.0;
  for (int m = 0; m < n; ++m) {
    if (m == i) continue;
    double term = 1.0 / (nodes[i] - nodes[m]);
    for (int j = 0; j < n; ++j) {
      if (j == i || j == m) continue;
      term *= (x - nodes[j]) / (nodes[i] - nodes[j]);
    }
    sum += term;
  }
  return sum;
}

std::vector<double> equidistant_nodes(int p) {
  if (p < 1) {
    throw std::invalid_argument("equidistant_nodes: degree must be >= 1");
  }
  std::vector<double> nodes(static_cast<std::size_t>(p) + 1);
  for (int i = 0; i <= p; ++i) {
    nodes[static_cast<std::size_t>(i)] = static_cast<double>(i) / p;
  }
  return nodes;
}

TensorBasis::TensorBasis(int degree) : p_(degree), nodes_(equidistant_nodes(degree)) {}

std::array<double, 2> TensorBasis::node(int k) const {
  const int m = static_cast<int>(nodes_.size());
  if (k < 0 || k >= m * m) {
    throw std::out_of_range("TensorBasis::node: bad index");
  }
  return {nodes_[static_cast<std::size_t>(k % m)], nodes_[static_cast<std::size_t>(k / m)]};
}

double TensorBasis::value(int k, double x, double y) const {
  const int m = static_cast<int>(nodes_.size());
  if (k < 0 || k >= m * m) {
    throw std::out_of_range("TensorBasis::value: bad index");
  }
  return lagrange_value(nodes_, k % m, x) * lagrange_value(nodes_, k / m, y);
}

std::array<double, 2> TensorBasis::gradient(int k, double x, double y) const {
  const int m = static_cast<int>(nodes_.size());
  if (k < 0 || k >= m * m) {
    throw std::out_of_range("TensorBasis::gradient: bad index");
  }
  const int ix = k % m;
  const int iy = k / m;
  const double lx = lagrange_value(nodes_, ix, x);
  const double ly = lagrange_value(nodes_, iy, y);
  return {lagrange_derivative(nodes_, ix, x) * ly, lx * lagrange_derivative(nodes_, iy, y)};
}

ShapeTable tabulate(const TensorBasis& basis, const std::vector<std::array<double, 2>>& points) {
  ShapeTable table;
  const std::size_t nq = points.size();
  const std::size_t nb = static_cast<std::size_t>(basis.size());
  table.values.assign(nq, std::vector<double>(nb));
  table.gradients.assign(nq, std::vector<std::array<double, 2>>(nb));
  for (std::size_t q = 0; q < nq; ++q) {
    for (std::size_t k = 0; k < nb; ++k) {
      table.values[q][k] = basis.value(static_cast<int>(k), points[q][0], points[q][1]);
      table.gradients[q][k] = basis.gradient(static_cast<int>(k), points[q][0], points[q][1]);
    }
  }
  return table;
}

std::array<double, 2> side_point(Side side, double s) {
  switch (side) {
    case Side::Left:
      return {0.0, s};
    case Side::Right:
      return {1.0, s};
    case Side::Bottom:
      return {s, 0.0};
    case Side::Top:
      return {s, 1.0};
  }
  throw std::invalid_argument("side_point: bad side");
}

}  // namespace elwave
