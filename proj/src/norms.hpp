#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "cg.hpp"
#include "dg.hpp"
#include "elasticity.hpp"
#include "mesh.hpp"

namespace elwave {

/// Copies the coefficients of one cell out of a global state vector into a
/// local block of size 2*(p+1)^2, ordered 2*node + component.
using CellGather =
    std::function<void(int cell, const Eigen::VectorXd& state, Eigen::VectorXd& local)>;

CellGather dg_gather(const DgDofMap& dofmap);
/// The state here is the full nodal vector, boundary values included.
CellGather cg_gather(const CgDofMap& dofmap);

/// L2(I; L2(Omega)) distance between the exact field and the discrete
/// trajectory, with the discrete field interpolated linearly in time between
/// the stored states. 3-point Gauss in time per interval, (p+2)-point Gauss
/// per axis in space.
double l2l2_error(const std::vector<double>& times, const std::vector<Eigen::VectorXd>& states,
                  const FieldFunction& exact, const StructuredQuadMesh& mesh, int p,
                  const CellGather& gather);

}  // namespace elwave
