#pragma once

#include <Eigen/Dense>
#include <vector>

#include "elasticity.hpp"
#include "mesh.hpp"
#include "sparse.hpp"

namespace elwave {

/// Continuous Q_p numbering: scalar nodes shared between cells, two vector
/// components per node (dof = 2*node + component). Nodes on Dirichlet faces
/// are flagged constrained; the reduced system keeps only free dofs.
class CgDofMap {
 public:
  CgDofMap(const StructuredQuadMesh& mesh, int degree);

  int degree() const { return p_; }
  int scalar_nodes() const { return nodes_x_ * nodes_y_; }
  int total_dofs() const { return 2 * scalar_nodes(); }
  int free_count() const { return static_cast<int>(free_dofs_.size()); }
  int constrained_count() const { return static_cast<int>(constrained_dofs_.size()); }

  /// Global scalar node of a cell-local tensor node k = ky*(p+1) + kx.
  int cell_node(int cell, int k) const;
  std::array<double, 2> node_position(int node) const;
  int dof(int node, int component) const { return 2 * node + component; }

  bool is_constrained(int dof) const { return constrained_[static_cast<std::size_t>(dof)]; }
  /// Index into the reduced system, or -1 for constrained dofs.
  int free_index(int dof) const { return free_index_[static_cast<std::size_t>(dof)]; }
  const std::vector<int>& free_dofs() const { return free_dofs_; }
  const std::vector<int>& constrained_dofs() const { return constrained_dofs_; }

  /// Scatter a reduced vector into a full one, filling constrained dofs with
  /// the given boundary values (sized constrained_count, may be empty for 0).
  Eigen::VectorXd to_full(const Eigen::VectorXd& reduced,
                          const Eigen::VectorXd& boundary_values) const;
  Eigen::VectorXd restrict_to_free(const Eigen::VectorXd& full) const;

 private:
  int p_;
  int nx_, ny_;
  int nodes_x_, nodes_y_;
  double x0_, y0_, dx_, dy_;
  std::vector<bool> constrained_;
  std::vector<int> free_index_;
  std::vector<int> free_dofs_;
  std::vector<int> constrained_dofs_;
};

struct CgSystem {
  SparseOperator mass_full;       ///< all dofs, no constraints applied
  SparseOperator stiffness_full;  ///< all dofs
  SparseOperator mass;            ///< free x free
  SparseOperator stiffness;       ///< free x free
};

/// Continuous mass (rho_s-weighted) and stiffness with symmetric elimination
/// of Dirichlet rows/columns into the reduced operators.
CgSystem assemble_cg(const StructuredQuadMesh& mesh, const CgDofMap& dofmap,
                     const IsotropicMaterial& material);

/// Boundary data g evaluated at constrained dofs at time t, in the order of
/// dofmap.constrained_dofs().
Eigen::VectorXd dirichlet_values(const CgDofMap& dofmap, const FieldFunction& g, double t);

/// Reduced load vector at time t: volume forcing and Neumann tractions on
/// free dofs, minus the elimination couplings A_fc ghat and M_fc d2ghat/dt2.
Eigen::VectorXd assemble_cg_rhs(const StructuredQuadMesh& mesh, const CgDofMap& dofmap,
                                const CgSystem& system, const ProblemData& data, double t);

/// Nodal interpolation restricted to free dofs.
Eigen::VectorXd cg_interpolate_free(const CgDofMap& dofmap, const FieldFunction& field, double t);

}  // namespace elwave
