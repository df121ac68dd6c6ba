#include "cg.hpp"

#include <stdexcept>

#include "quadrature.hpp"
#include "shapes.hpp"

namespace elwave {

CgDofMap::CgDofMap(const StructuredQuadMesh& mesh, int degree) : p_(degree) {
  if (degree < 1) {
    throw std::invalid_argument("CgDofMap: degree must be >= 1");
  }
  nx_ = mesh.nx();
  ny_ = mesh.ny();
  nodes_x_ = p_ * nx_ + 1;
  nodes_y_ = p_ * ny_ + 1;
  x0_ = mesh.x_min();
  y0_ = mesh.y_min();
  dx_ = (mesh.x_max() - mesh.x_min()) / (nx_ * p_);
  dy_ = (mesh.y_max() - mesh.y_min()) / (ny_ * p_);

  constrained_.assign(static_cast<std::size_t>(total_dofs()), false);
  for (const Face& face : mesh.faces()) {
    if (face.kind != FaceKind::DirichletBoundary) {
      continue;
    }
    // Mark the p+1 nodes of the cell edge lying on this face.
    for (int a = 0; a <= p_; ++a) {
      int kx = 0, ky = 0;
      switch (face.side_plus) {
        case Side::Left:
          kx = 0;
          ky = a;
          break;
        case Side::Right:
          kx = p_;
          ky = a;
          break;
        case Side::Bottom:
          kx = a;
          ky = 0;
          break;
        case Side::Top:
          kx = a;
          ky = p_;
          break;
      }
      const int node = cell_node(face.cell_plus, ky * (p_ + 1) + kx);
      constrained_[static_cast<std::size_t>(dof(node, 0))] = true;
      constrained_[static_cast<std::size_t>(dof(node, 1))] = true;
    }
  }

  free_index_.assign(static_cast<std::size_t>(total_dofs()), -1);
  for (int d = 0; d < total_dofs(); ++d) {
    if (constrained_[static_cast<std::size_t>(d)]) {
      constrained_dofs_.push_back(d);
    } else {
      free_index_[static_cast<std::size_t>(d)] = static_cast<int>(free_dofs_.size());
      free_dofs_.push_back(d);
    }
  }
}

int CgDofMap::cell_node(int cell, int k) const {
  if (cell < 0 || cell >= nx_ * ny_) {
    throw std::out_of_range("CgDofMap::cell_node: bad cell");
  }
  const int m = p_ + 1;
  if (k < 0 || k >= m * m) {
    throw std::out_of_range("CgDofMap::cell_node: bad local node");
  }
  const int i = cell % nx_;
  const int j = cell / nx_;
  const int gx = p_ * i + (k % m);
  const int gy = p_ * j + (k / m);
  return gy * nodes_x_ + gx;
}

std::array<double, 2> CgDofMap::node_position(int node) const {
  if (node < 0 || node >= scalar_nodes()) {
    throw std::out_of_range("CgDofMap::node_position: bad node");
  }
  const int gx = node % nodes_x_;
  const int gy = node / nodes_x_;
  return {x0_ + gx * dx_, y0_ + gy * dy_};
}

Eigen::VectorXd CgDofMap::to_full(const Eigen::VectorXd& reduced,
                                  const Eigen::VectorXd& boundary_values) const {
  if (reduced.size() != free_count()) {
    throw std::invalid_argument("CgDofMap::to_full: reduced size mismatch");
  }
  if (boundary_values.size() != 0 && boundary_values.size() != constrained_count()) {
    throw std::invalid_argument("CgDofMap::to_full: boundary size mismatch");
  }
  Eigen::VectorXd full = Eigen::VectorXd::Zero(total_dofs());
  for (int i = 0; i < free_count(); ++i) {
    full[free_dofs_[static_cast<std::size_t>(i)]] = reduced[i];
  }
  if (boundary_values.size() != 0) {
    for (int i = 0; i < constrained_count(); ++i) {
      full[constrained_dofs_[static_cast<std::size_t>(i)]] = boundary_values[i];
    }
  }
  return full;
}

Eigen::VectorXd CgDofMap::restrict_to_free(const Eigen::VectorXd& full) const {
  if (full.size() != total_dofs()) {
    throw std::invalid_argument("CgDofMap::restrict_to_free: size mismatch");
  }
  Eigen::VectorXd reduced(free_count());
  for (int i = 0; i < free_count(); ++i) {
    reduced[i] = full[free_dofs_[static_cast<std::size_t>(i)]];
  }
  return reduced;
}

CgSystem assemble_cg(const StructuredQuadMesh& mesh, const CgDofMap& dofmap,
                     const IsotropicMaterial& material) {
  const int p = dofmap.degree();
  const TensorBasis basis(p);
  const int nb = basis.size();
  const QuadratureRule2d rule = tensor_rule(gauss_legendre(p + 1), gauss_legendre(p + 1));
  const ShapeTable table = tabulate(basis, rule.points);

  std::vector<Triplet> mass_full, stiff_full, mass_red, stiff_red;
  Eigen::MatrixXd local_m(2 * nb, 2 * nb), local_a(2 * nb, 2 * nb);
  std::vector<std::array<double, 2>> grads(static_cast<std::size_t>(nb));
  std::vector<int> cell_dofs(static_cast<std::size_t>(2 * nb));

  for (const Cell& cell : mesh.cells()) {
    local_m.setZero();
    local_a.setZero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      for (int k = 0; k < nb; ++k) {
        grads[static_cast<std::size_t>(k)] = map_gradient_to_physical(
            table.gradients[q][static_cast<std::size_t>(k)], cell.extents);
      }
      const double wq = rule.weights[q] * cell.measure();
      const double wq_rho = wq * material.density;
      for (int ki = 0; ki < nb; ++ki) {
        const double vi = table.values[q][static_cast<std::size_t>(ki)];
        const auto& gi = grads[static_cast<std::size_t>(ki)];
        for (int kj = 0; kj < nb; ++kj) {
          const double vj = table.values[q][static_cast<std::size_t>(kj)];
          const auto& gj = grads[static_cast<std::size_t>(kj)];
          const double mm = wq_rho * (vi * vj);
          local_m(2 * ki + 0, 2 * kj + 0) += mm;
          local_m(2 * ki + 1, 2 * kj + 1) += mm;
          const double dot = gi[0] * gj[0] + gi[1] * gj[1];
          for (int ci = 0; ci < 2; ++ci) {
            for (int cj = 0; cj < 2; ++cj) {
              const double tr_term =
                  gi[static_cast<std::size_t>(ci)] * gj[static_cast<std::size_t>(cj)];
              const double cross =
                  gi[static_cast<std::size_t>(cj)] * gj[static_cast<std::size_t>(ci)];
              const double sym = (ci == cj) ? (dot + cross) : cross;
              local_a(2 * ki + ci, 2 * kj + cj) +=
                  wq * (material.lambda * tr_term + material.mu * sym);
            }
          }
        }
      }
    }
    for (int k = 0; k < nb; ++k) {
      const int node = dofmap.cell_node(cell.index, k);
      cell_dofs[static_cast<std::size_t>(2 * k + 0)] = dofmap.dof(node, 0);
      cell_dofs[static_cast<std::size_t>(2 * k + 1)] = dofmap.dof(node, 1);
    }
    for (int a = 0; a < 2 * nb; ++a) {
      const int ga = cell_dofs[static_cast<std::size_t>(a)];
      const int fa = dofmap.free_index(ga);
      for (int b = 0; b < 2 * nb; ++b) {
        const int gb = cell_dofs[static_cast<std::size_t>(b)];
        mass_full.emplace_back(ga, gb, local_m(a, b));
        stiff_full.emplace_back(ga, gb, local_a(a, b));
        const int fb = dofmap.free_index(gb);
        if (fa >= 0 && fb >= 0) {
          mass_red.emplace_back(fa, fb, local_m(a, b));
          stiff_red.emplace_back(fa, fb, local_a(a, b));
        }
      }
    }
  }

  CgSystem sys;
  const int nfull = dofmap.total_dofs();
  const int nfree = dofmap.free_count();
  sys.mass_full = SparseOperator::from_triplets(nfull, nfull, mass_full, true);
  sys.stiffness_full = SparseOperator::from_triplets(nfull, nfull, stiff_full, true);
  sys.mass = SparseOperator::from_triplets(nfree, nfree, mass_red, true);
  sys.stiffness = SparseOperator::from_triplets(nfree, nfree, stiff_red, true);
  return sys;
}

Eigen::VectorXd dirichlet_values(const CgDofMap& dofmap, const FieldFunction& g, double t) {
  Eigen::VectorXd values = Eigen::VectorXd::Zero(dofmap.constrained_count());
  if (!g) {
    return values;
  }
  const auto& cdofs = dofmap.constrained_dofs();
  for (int i = 0; i < dofmap.constrained_count(); ++i) {
    const int d = cdofs[static_cast<std::size_t>(i)];
    const auto pos = dofmap.node_position(d / 2);
    values[i] = g(Eigen::Vector2d(pos[0], pos[1]), t)[d % 2];
  }
  return values;
}

Eigen::VectorXd assemble_cg_rhs(const StructuredQuadMesh& mesh, const CgDofMap& dofmap,
                                const CgSystem& system, const ProblemData& data, double t) {
  const int p = dofmap.degree();
  const TensorBasis basis(p);
  const int nb = basis.size();
  Eigen::VectorXd b_full = Eigen::VectorXd::Zero(dofmap.total_dofs());

  if (data.forcing) {
    const QuadratureRule2d rule = tensor_rule(gauss_legendre(p + 1), gauss_legendre(p + 1));
    const ShapeTable table = tabulate(basis, rule.points);
    for (const Cell& cell : mesh.cells()) {
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Eigen::Vector2d x(cell.origin[0] + rule.points[q][0] * cell.extents[0],
                                cell.origin[1] + rule.points[q][1] * cell.extents[1]);
        const Eigen::Vector2d f = data.forcing(x, t);
        const double wq = rule.weights[q] * cell.measure();
        for (int k = 0; k < nb; ++k) {
          const int node = dofmap.cell_node(cell.index, k);
          const double vk = wq * table.values[q][static_cast<std::size_t>(k)];
          b_full[dofmap.dof(node, 0)] += vk * f[0];
          b_full[dofmap.dof(node, 1)] += vk * f[1];
        }
      }
    }
  }

  if (data.neumann) {
    const QuadratureRule face_rule = gauss_legendre(p + 1);
    for (const Face& face : mesh.faces()) {
      if (face.kind != FaceKind::NeumannBoundary) {
        continue;
      }
      const Cell& cell = mesh.cell(face.cell_plus);
      const Eigen::Vector2d n(face.normal[0], face.normal[1]);
      for (std::size_t q = 0; q < face_rule.size(); ++q) {
        const std::array<double, 2> ref = side_point(face.side_plus, face_rule.points[q]);
        const Eigen::Vector2d x(cell.origin[0] + ref[0] * cell.extents[0],
                                cell.origin[1] + ref[1] * cell.extents[1]);
        const Eigen::Vector2d h = data.neumann(x, t, n);
        const double wq = face_rule.weights[q] * face.measure;
        for (int k = 0; k < nb; ++k) {
          const double psi = basis.value(k, ref[0], ref[1]);
          if (psi == 0.0) {
            continue;
          }
          const int node = dofmap.cell_node(cell.index, k);
          b_full[dofmap.dof(node, 0)] += wq * psi * h[0];
          b_full[dofmap.dof(node, 1)] += wq * psi * h[1];
        }
      }
    }
  }

  Eigen::VectorXd reduced = dofmap.restrict_to_free(b_full);
  if (dofmap.constrained_count() > 0) {
    const Eigen::VectorXd zero_free = Eigen::VectorXd::Zero(dofmap.free_count());
    if (data.dirichlet) {
      const Eigen::VectorXd ghat =
          dofmap.to_full(zero_free, dirichlet_values(dofmap, data.dirichlet, t));
      reduced -= dofmap.restrict_to_free(system.stiffness_full.apply(ghat));
    }
    if (data.dirichlet_tt) {
      const Eigen::VectorXd ghat_tt =
          dofmap.to_full(zero_free, dirichlet_values(dofmap, data.dirichlet_tt, t));
      reduced -= dofmap.restrict_to_free(system.mass_full.apply(ghat_tt));
    }
  }
  return reduced;
}

Eigen::VectorXd cg_interpolate_free(const CgDofMap& dofmap, const FieldFunction& field,
                                    double t) {
  Eigen::VectorXd reduced(dofmap.free_count());
  const auto& fdofs = dofmap.free_dofs();
  for (int i = 0; i < dofmap.free_count(); ++i) {
    const int d = fdofs[static_cast<std::size_t>(i)];
    const auto pos = dofmap.node_position(d / 2);
    reduced[i] = field(Eigen::Vector2d(pos[0], pos[1]), t)[d % 2];
  }
  return reduced;
}

}  // namespace elwave
