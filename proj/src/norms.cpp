#include "norms.hpp"

#include <cmath>
#include <stdexcept>

#include "quadrature.hpp"
#include "shapes.hpp"

namespace elwave {

CellGather dg_gather(const DgDofMap& dofmap) {
  const int ndc = dofmap.dofs_per_cell;
  return [ndc, &dofmap](int cell, const Eigen::VectorXd& state, Eigen::VectorXd& local) {
    local = state.segment(dofmap.cell_offset(cell), ndc);
  };
}

CellGather cg_gather(const CgDofMap& dofmap) {
  const int nb = (dofmap.degree() + 1) * (dofmap.degree() + 1);
  return [nb, &dofmap](int cell, const Eigen::VectorXd& state, Eigen::VectorXd& local) {
    local.resize(2 * nb);
    for (int k = 0; k < nb; ++k) {
      const int node = dofmap.cell_node(cell, k);
      local[2 * k + 0] = state[dofmap.dof(node, 0)];
      local[2 * k + 1] = state[dofmap.dof(node, 1)];
    }
  };
}

double l2l2_error(const std::vector<double>& times, const std::vector<Eigen::VectorXd>& states,
                  const FieldFunction& exact, const StructuredQuadMesh& mesh, int p,
                  const CellGather& gather) {
  if (times.size() != states.size()) {
    throw std::invalid_argument("l2l2_error: trajectory and grid sizes differ");
  }
  if (times.size() < 2) {
    throw std::invalid_argument("l2l2_error: need at least one time interval");
  }
  if (!exact) {
    throw std::invalid_argument("l2l2_error: exact field not callable");
  }

  const TensorBasis basis(p);
  const int nb = basis.size();
  const QuadratureRule2d space_rule = tensor_rule(gauss_legendre(p + 2), gauss_legendre(p + 2));
  const ShapeTable table = tabulate(basis, space_rule.points);
  const QuadratureRule time_rule = gauss_legendre(3);

  Eigen::VectorXd local(2 * nb);
  double total = 0.0;
  for (std::size_t interval = 0; interval + 1 < times.size(); ++interval) {
    const double t0 = times[interval];
    const double tau = times[interval + 1] - t0;
    for (std::size_t qt = 0; qt < time_rule.size(); ++qt) {
      const double s = time_rule.points[qt];
      const double t = t0 + s * tau;
      const Eigen::VectorXd state =
          (1.0 - s) * states[interval] + s * states[interval + 1];
      double space_sq = 0.0;
      for (const Cell& cell : mesh.cells()) {
        gather(cell.index, state, local);
        for (std::size_t q = 0; q < space_rule.size(); ++q) {
          double uh0 = 0.0, uh1 = 0.0;
          const std::vector<double>& vals = table.values[q];
          for (int k = 0; k < nb; ++k) {
            uh0 += vals[static_cast<std::size_t>(k)] * local[2 * k + 0];
            uh1 += vals[static_cast<std::size_t>(k)] * local[2 * k + 1];
          }
          const Eigen::Vector2d x(cell.origin[0] + space_rule.points[q][0] * cell.extents[0],
                                  cell.origin[1] + space_rule.points[q][1] * cell.extents[1]);
          const Eigen::Vector2d ue = exact(x, t);
          const double d0 = uh0 - ue[0];
          const double d1 = uh1 - ue[1];
          space_sq += space_rule.weights[q] * cell.measure() * (d0 * d0 + d1 * d1);
        }
      }
      total += time_rule.weights[qt] * tau * space_sq;
    }
  }
  return std::sqrt(total);
}

}  // namespace elwave
