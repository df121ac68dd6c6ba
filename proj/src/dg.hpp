#pragma once

#include <Eigen/Dense>
#include <optional>

#include "elasticity.hpp"
#include "mesh.hpp"
#include "shapes.hpp"
#include "sparse.hpp"

namespace elwave {

/// Discontinuous vector-valued DoF numbering: per cell a contiguous block of
/// 2*(p+1)^2 coefficients, local index 2*node + component.
struct DgDofMap {
  DgDofMap(const StructuredQuadMesh& mesh, int degree);

  int degree = 0;
  int cell_count = 0;
  int dofs_per_cell = 0;

  int total_dofs() const { return cell_count * dofs_per_cell; }
  int cell_offset(int cell) const { return cell * dofs_per_cell; }
  int global_index(int cell, int node, int component) const {
    return cell_offset(cell) + 2 * node + component;
  }
};

/// Interior penalty configuration: tuning factor gamma0 and consistency
/// parameter S. S = 1 is the symmetric variant, S = -1 the non-symmetric one
/// and S = 0 the incomplete one.
struct PenaltyConfig {
  double gamma0 = 1.0;
  int S = 1;

  void validate() const;
};

/// Face penalty gamma_F = gamma0 * gamma_C * gamma_K with the material factor
/// gamma_C = max over adjacent cells of (lambda + 2 mu) and the inverse
/// estimate factor gamma_K = p (p + 1) / h_F.
double penalty_value(const Face& face, const IsotropicMaterial& material,
                     const PenaltyConfig& config, int p);

/// Term toggles for assemble_stiffness_ip, used to isolate individual sums of
/// the bilinear form in tests. Defaults assemble everything.
struct StiffnessParts {
  bool volume = true;       ///< cell integrals sigma(u) : eps(w)
  bool consistency = true;  ///< face integrals -{t(u)} . [w]
  bool symmetry = true;     ///< face integrals -S [u] . {t(w)}
  bool penalty = true;      ///< face integrals gamma_F [u] . [w]
};

/// rho_s-weighted vector mass matrix; block diagonal over cells.
SparseOperator assemble_mass(const StructuredQuadMesh& mesh, const DgDofMap& dofmap,
                             const IsotropicMaterial& material);

/// Interior penalty stiffness matrix: volume term plus consistency, symmetry
/// and penalty face terms over interior and Dirichlet faces. Homogeneous
/// Dirichlet convention; boundary data enters through assemble_dg_rhs.
SparseOperator assemble_stiffness_ip(const StructuredQuadMesh& mesh, const DgDofMap& dofmap,
                                     const IsotropicMaterial& material,
                                     const PenaltyConfig& config,
                                     const StiffnessParts& parts = StiffnessParts{});

/// Load vector at time t: volume forcing, Dirichlet lifting
/// g . (gamma_F w - S t(w)) on Dirichlet faces and Neumann tractions.
Eigen::VectorXd assemble_dg_rhs(const StructuredQuadMesh& mesh, const DgDofMap& dofmap,
                                const IsotropicMaterial& material, const PenaltyConfig& config,
                                const ProblemData& data, double t);

/// Nodal interpolation of a vector field at time t into dG coefficients.
Eigen::VectorXd dg_interpolate(const StructuredQuadMesh& mesh, const DgDofMap& dofmap,
                               const FieldFunction& field, double t);

/// Trace operators at one face quadrature point. The minus trace must be
/// absent exactly on boundary faces; g is the Dirichlet datum there.
Eigen::Vector2d jump_value(const Face& face, const Eigen::Vector2d& plus,
                           const std::optional<Eigen::Vector2d>& minus, const Eigen::Vector2d& g);
Eigen::Vector2d jump0_value(const Face& face, const Eigen::Vector2d& plus,
                            const std::optional<Eigen::Vector2d>& minus);
Eigen::Vector2d average_traction(const Face& face, const Eigen::Vector2d& plus,
                                 const std::optional<Eigen::Vector2d>& minus);

}  // namespace elwave
