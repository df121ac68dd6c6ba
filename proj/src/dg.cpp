#include "dg.hpp"

#include <stdexcept>

#include "quadrature.hpp"

namespace elwave {

DgDofMap::DgDofMap(const StructuredQuadMesh& mesh, int degree) {
  if (degree < 1) {
    throw std::invalid_argument("DgDofMap: degree must be >= 1");
  }
  this->degree = degree;
  cell_count = static_cast<int>(mesh.cells().size());
  dofs_per_cell = 2 * (degree + 1) * (degree + 1);
}

void PenaltyConfig::validate() const {
  if (!(gamma0 > 0.0)) {
    throw std::invalid_argument("PenaltyConfig: gamma0 must be positive");
  }
  if (S != 1 && S != -1 && S != 0) {
    throw std::invalid_argument("PenaltyConfig: S must be one of 1, -1, 0");
  }
}

double penalty_value(const Face& face, const IsotropicMaterial& material,
                     const PenaltyConfig& config, int p) {
  config.validate();
  const double gamma_c = material.lambda + 2.0 * material.mu;
  const double gamma_k = static_cast<double>(p) * (p + 1) / face.h_face;
  return config.gamma0 * gamma_c * gamma_k;
}

namespace {

// Traction sigma(psi e_c) * n for a scalar shape with physical gradient g:
// t = lambda g_c n + mu ((g.n) e_c + n_c g).
inline Eigen::Vector2d shape_traction(const IsotropicMaterial& mat,
                                      const std::array<double, 2>& g, int c,
                                      const std::array<double, 2>& n) {
  const double gn = g[0] * n[0] + g[1] * n[1];
  Eigen::Vector2d t;
  t[0] = mat.lambda * g[static_cast<std::size_t>(c)] * n[0] + mat.mu * n[static_cast<std::size_t>(c)] * g[0];
  t[1] = mat.lambda * g[static_cast<std::size_t>(c)] * n[1] + mat.mu * n[static_cast<std::size_t>(c)] * g[1];
  t[c] += mat.mu * gn;
  return t;
}

struct FaceSideData {
  int cell = -1;
  double jump_sign = 1.0;
  const std::vector<double>* values = nullptr;                  // [k] at current point
  std::vector<Eigen::Vector2d> tractions;                       // [k][c] flattened 2k+c
  std::vector<std::array<double, 2>> phys_grads;                // [k]
};

}  // namespace

SparseOperator assemble_mass(const StructuredQuadMesh& mesh, const DgDofMap& dofmap,
                             const IsotropicMaterial& material) {
  const int p = dofmap.degree;
  const TensorBasis basis(p);
  const int nb = basis.size();
  const QuadratureRule2d rule = tensor_rule(gauss_legendre(p + 1), gauss_legendre(p + 1));
  const ShapeTable table = tabulate(basis, rule.points);

  // Scalar reference mass; the physical one is this times rho * |K|.
  Eigen::MatrixXd ref_mass = Eigen::MatrixXd::Zero(nb, nb);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    for (int a = 0; a < nb; ++a) {
      for (int b = 0; b < nb; ++b) {
        ref_mass(a, b) += rule.weights[q] * (table.values[q][static_cast<std::size_t>(a)] *
                                             table.values[q][static_cast<std::size_t>(b)]);
      }
    }
  }

  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(dofmap.cell_count) * nb * nb * 2);
  for (const Cell& cell : mesh.cells()) {
    const double scale = material.density * cell.measure();
    for (int a = 0; a < nb; ++a) {
      for (int b = 0; b < nb; ++b) {
        const double v = scale * ref_mass(a, b);
        for (int c = 0; c < 2; ++c) {
          triplets.emplace_back(dofmap.global_index(cell.index, a, c),
                                dofmap.global_index(cell.index, b, c), v);
        }
      }
    }
  }
  return SparseOperator::from_triplets(dofmap.total_dofs(), dofmap.total_dofs(), triplets, true);
}

SparseOperator assemble_stiffness_ip(const StructuredQuadMesh& mesh, const DgDofMap& dofmap,
                                     const IsotropicMaterial& material,
                                     const PenaltyConfig& config, const StiffnessParts& parts) {
  config.validate();
  const int p = dofmap.degree;
  const TensorBasis basis(p);
  const int nb = basis.size();
  const int ndc = dofmap.dofs_per_cell;
  const double S = static_cast<double>(config.S);

  std::vector<Triplet> triplets;

  if (parts.volume) {
    const QuadratureRule2d rule = tensor_rule(gauss_legendre(p + 1), gauss_legendre(p + 1));
    const ShapeTable table = tabulate(basis, rule.points);
    Eigen::MatrixXd local(ndc, ndc);
    std::vector<std::array<double, 2>> grads(static_cast<std::size_t>(nb));
    for (const Cell& cell : mesh.cells()) {
      local.setZero();
      for (std::size_t q = 0; q < rule.size(); ++q) {
        for (int k = 0; k < nb; ++k) {
          grads[static_cast<std::size_t>(k)] =
              map_gradient_to_physical(table.gradients[q][static_cast<std::size_t>(k)],
                                       cell.extents);
        }
        const double wq = rule.weights[q] * cell.measure();
        for (int ki = 0; ki < nb; ++ki) {
          const auto& gi = grads[static_cast<std::size_t>(ki)];
          for (int kj = 0; kj < nb; ++kj) {
            const auto& gj = grads[static_cast<std::size_t>(kj)];
            const double dot = gi[0] * gj[0] + gi[1] * gj[1];
            for (int ci = 0; ci < 2; ++ci) {
              for (int cj = 0; cj < 2; ++cj) {
                // sigma(psi_j e_cj) : eps(psi_i e_ci); products are formed
                // symmetrically so the local matrix is bitwise symmetric.
                const double tr_term = gi[static_cast<std::size_t>(ci)] *
                                       gj[static_cast<std::size_t>(cj)];
                const double cross = gi[static_cast<std::size_t>(cj)] *
                                     gj[static_cast<std::size_t>(ci)];
                const double sym = (ci == cj) ? (dot + cross) : cross;
                local(2 * ki + ci, 2 * kj + cj) +=
                    wq * (material.lambda * tr_term + material.mu * sym);
              }
            }
          }
        }
      }
      const int off = dofmap.cell_offset(cell.index);
      for (int a = 0; a < ndc; ++a) {
        for (int b = 0; b < ndc; ++b) {
          triplets.emplace_back(off + a, off + b, local(a, b));
        }
      }
    }
  }

  const bool face_terms = parts.consistency || parts.symmetry || parts.penalty;
  if (face_terms) {
    const QuadratureRule face_rule = gauss_legendre(p + 1);
    // Shape values and reference gradients on each side, tabulated at the
    // face rule points once; cells are congruent up to extents.
    std::array<ShapeTable, 4> side_tables;
    for (int s = 0; s < 4; ++s) {
      std::vector<std::array<double, 2>> pts;
      pts.reserve(face_rule.size());
      for (double sq : face_rule.points) {
        pts.push_back(side_point(static_cast<Side>(s), sq));
      }
      side_tables[static_cast<std::size_t>(s)] = tabulate(basis, pts);
    }

    std::array<FaceSideData, 2> sides;
    for (auto& sd : sides) {
      sd.tractions.resize(static_cast<std::size_t>(ndc));
      sd.phys_grads.resize(static_cast<std::size_t>(nb));
    }
    std::array<Eigen::MatrixXd, 4> blocks;  // (side_w, side_u) -> 2*side_w + side_u
    for (auto& b : blocks) {
      b.resize(ndc, ndc);
    }

    for (const Face& face : mesh.faces()) {
      if (face.kind == FaceKind::NeumannBoundary) {
        continue;
      }
      const bool interior = face.is_interior();
      const int nsides = interior ? 2 : 1;
      const double avg = interior ? 0.5 : 1.0;
      const double gamma_f = penalty_value(face, material, config, p);
      const std::array<double, 2> n = face.normal;

      sides[0].cell = face.cell_plus;
      sides[0].jump_sign = 1.0;
      sides[1].cell = face.cell_minus;
      sides[1].jump_sign = -1.0;
      const std::array<Side, 2> local_sides = {face.side_plus, face.side_minus};

      for (int b = 0; b < nsides * nsides; ++b) {
        blocks[static_cast<std::size_t>(b)].setZero();
      }

      for (std::size_t q = 0; q < face_rule.size(); ++q) {
        for (int s = 0; s < nsides; ++s) {
          FaceSideData& sd = sides[static_cast<std::size_t>(s)];
          const ShapeTable& tab =
              side_tables[static_cast<std::size_t>(local_sides[static_cast<std::size_t>(s)])];
          const Cell& cell = mesh.cell(sd.cell);
          sd.values = &tab.values[q];
          for (int k = 0; k < nb; ++k) {
            sd.phys_grads[static_cast<std::size_t>(k)] =
                map_gradient_to_physical(tab.gradients[q][static_cast<std::size_t>(k)],
                                         cell.extents);
          }
          for (int k = 0; k < nb; ++k) {
            for (int c = 0; c < 2; ++c) {
              sd.tractions[static_cast<std::size_t>(2 * k + c)] =
                  shape_traction(material, sd.phys_grads[static_cast<std::size_t>(k)], c, n);
            }
          }
        }

        const double wq = face_rule.weights[q] * face.measure;
        for (int sw = 0; sw < nsides; ++sw) {
          const FaceSideData& w = sides[static_cast<std::size_t>(sw)];
          for (int su = 0; su < nsides; ++su) {
            const FaceSideData& u = sides[static_cast<std::size_t>(su)];
            Eigen::MatrixXd& block = blocks[static_cast<std::size_t>(2 * sw + su)];
            const double jj = u.jump_sign * w.jump_sign;
            for (int kw = 0; kw < nb; ++kw) {
              const double psi_w = (*w.values)[static_cast<std::size_t>(kw)];
              for (int ku = 0; ku < nb; ++ku) {
                const double psi_u = (*u.values)[static_cast<std::size_t>(ku)];
                const double psi_uw = psi_u * psi_w;
                for (int cw = 0; cw < 2; ++cw) {
                  for (int cu = 0; cu < 2; ++cu) {
                    double v = 0.0;
                    if (parts.consistency) {
                      // -{t(u)} . [w]
                      v += -avg * w.jump_sign * psi_w *
                           u.tractions[static_cast<std::size_t>(2 * ku + cu)][cw];
                    }
                    if (parts.symmetry) {
                      // -S [u] . {t(w)}; written as S times the transposed
                      // consistency expression so SIPG is bitwise symmetric.
                      v += S * (-avg * u.jump_sign * psi_u *
                                w.tractions[static_cast<std::size_t>(2 * kw + cw)][cu]);
                    }
                    if (parts.penalty && cu == cw) {
                      v += gamma_f * jj * psi_uw;
                    }
                    block(2 * kw + cw, 2 * ku + cu) += wq * v;
                  }
                }
              }
            }
          }
        }
      }

      for (int sw = 0; sw < nsides; ++sw) {
        const int row_off = dofmap.cell_offset(sides[static_cast<std::size_t>(sw)].cell);
        for (int su = 0; su < nsides; ++su) {
          const int col_off = dofmap.cell_offset(sides[static_cast<std::size_t>(su)].cell);
          const Eigen::MatrixXd& block = blocks[static_cast<std::size_t>(2 * sw + su)];
          for (int a = 0; a < ndc; ++a) {
            for (int b = 0; b < ndc; ++b) {
              triplets.emplace_back(row_off + a, col_off + b, block(a, b));
            }
          }
        }
      }
    }
  }

  const bool symmetric = (config.S == 1) && parts.consistency == parts.symmetry;
  return SparseOperator::from_triplets(dofmap.total_dofs(), dofmap.total_dofs(), triplets,
                                       symmetric);
}

Eigen::VectorXd assemble_dg_rhs(const StructuredQuadMesh& mesh, const DgDofMap& dofmap,
                                const IsotropicMaterial& material, const PenaltyConfig& config,
                                const ProblemData& data, double t) {
  config.validate();
  const int p = dofmap.degree;
  const TensorBasis basis(p);
  const int nb = basis.size();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dofmap.total_dofs());

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
          const double vk = wq * table.values[q][static_cast<std::size_t>(k)];
          rhs[dofmap.global_index(cell.index, k, 0)] += vk * f[0];
          rhs[dofmap.global_index(cell.index, k, 1)] += vk * f[1];
        }
      }
    }
  }

  const QuadratureRule face_rule = gauss_legendre(p + 1);
  const double S = static_cast<double>(config.S);
  for (const Face& face : mesh.faces()) {
    if (face.is_interior()) {
      continue;
    }
    const Cell& cell = mesh.cell(face.cell_plus);
    const double gamma_f = penalty_value(face, material, config, p);
    const std::array<double, 2> nn = face.normal;
    const Eigen::Vector2d n(nn[0], nn[1]);
    for (std::size_t q = 0; q < face_rule.size(); ++q) {
      const std::array<double, 2> ref = side_point(face.side_plus, face_rule.points[q]);
      const Eigen::Vector2d x(cell.origin[0] + ref[0] * cell.extents[0],
                              cell.origin[1] + ref[1] * cell.extents[1]);
      const double wq = face_rule.weights[q] * face.measure;
      if (face.kind == FaceKind::DirichletBoundary && data.dirichlet) {
        const Eigen::Vector2d g = data.dirichlet(x, t);
        for (int k = 0; k < nb; ++k) {
          const double psi = basis.value(k, ref[0], ref[1]);
          const auto grad = map_gradient_to_physical(basis.gradient(k, ref[0], ref[1]),
                                                     cell.extents);
          for (int c = 0; c < 2; ++c) {
            // g . (gamma_F w - S t(w)) for w = psi e_c
            const Eigen::Vector2d tw = shape_traction(material, grad, c, nn);
            double v = gamma_f * psi * g[c] - S * (g.dot(tw));
            rhs[dofmap.global_index(cell.index, k, c)] += wq * v;
          }
        }
      } else if (face.kind == FaceKind::NeumannBoundary && data.neumann) {
        const Eigen::Vector2d h = data.neumann(x, t, n);
        for (int k = 0; k < nb; ++k) {
          const double psi = basis.value(k, ref[0], ref[1]);
          rhs[dofmap.global_index(cell.index, k, 0)] += wq * psi * h[0];
          rhs[dofmap.global_index(cell.index, k, 1)] += wq * psi * h[1];
        }
      }
    }
  }
  return rhs;
}

Eigen::VectorXd dg_interpolate(const StructuredQuadMesh& mesh, const DgDofMap& dofmap,
                               const FieldFunction& field, double t) {
  const TensorBasis basis(dofmap.degree);
  Eigen::VectorXd coeffs(dofmap.total_dofs());
  for (const Cell& cell : mesh.cells()) {
    for (int k = 0; k < basis.size(); ++k) {
      const std::array<double, 2> ref = basis.node(k);
      const Eigen::Vector2d x(cell.origin[0] + ref[0] * cell.extents[0],
                              cell.origin[1] + ref[1] * cell.extents[1]);
      const Eigen::Vector2d u = field(x, t);
      coeffs[dofmap.global_index(cell.index, k, 0)] = u[0];
      coeffs[dofmap.global_index(cell.index, k, 1)] = u[1];
    }
  }
  return coeffs;
}

Eigen::Vector2d jump_value(const Face& face, const Eigen::Vector2d& plus,
                           const std::optional<Eigen::Vector2d>& minus,
                           const Eigen::Vector2d& g) {
  if (face.is_interior()) {
    if (!minus) {
      throw std::invalid_argument("jump_value: interior face needs a minus trace");
    }
    return plus - *minus;
  }
  if (minus) {
    throw std::invalid_argument("jump_value: boundary face has no minus trace");
  }
  return plus - g;
}

Eigen::Vector2d jump0_value(const Face& face, const Eigen::Vector2d& plus,
                            const std::optional<Eigen::Vector2d>& minus) {
  if (face.is_interior()) {
    if (!minus) {
      throw std::invalid_argument("jump0_value: interior face needs a minus trace");
    }
    return plus - *minus;
  }
  if (minus) {
    throw std::invalid_argument("jump0_value: boundary face has no minus trace");
  }
  return plus;
}

Eigen::Vector2d average_traction(const Face& face, const Eigen::Vector2d& plus,
                                 const std::optional<Eigen::Vector2d>& minus) {
  if (face.is_interior()) {
    if (!minus) {
      throw std::invalid_argument("average_traction: interior face needs a minus trace");
    }
    return 0.5 * (plus + *minus);
  }
  if (minus) {
    throw std::invalid_argument("average_traction: boundary face has no minus trace");
  }
  return plus;
}

}  // namespace elwave
