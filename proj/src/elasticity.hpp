#pragma once

#include <Eigen/Dense>
#include <functional>

namespace elwave {

/// Linear isotropic material, parametrized by Young's modulus, Poisson ratio
/// and density. Lame parameters are derived on construction.
struct IsotropicMaterial {
  IsotropicMaterial(double young, double poisson, double density);

  double young_modulus;
  double poisson_ratio;
  double density;
  double lambda;  ///< first Lame parameter
  double mu;      ///< shear modulus
};

/// (lambda, mu) for plane-strain isotropic elasticity.
std::pair<double, double> lame_parameters(double young, double poisson);

/// Cauchy stress sigma = lambda tr(eps) I + 2 mu eps for the displacement
/// gradient grad(i,j) = d u_i / d x_j.
Eigen::Matrix2d stress(const IsotropicMaterial& material, const Eigen::Matrix2d& grad);

/// Traction sigma(grad) * n. The normal must be unit length.
Eigen::Vector2d traction(const IsotropicMaterial& material, const Eigen::Matrix2d& grad,
                         const Eigen::Vector2d& normal);

using FieldFunction = std::function<Eigen::Vector2d(const Eigen::Vector2d&, double)>;
using TractionFunction =
    std::function<Eigen::Vector2d(const Eigen::Vector2d&, double, const Eigen::Vector2d&)>;

/// Data set of a wave problem: volume forcing, boundary data and initial
/// conditions. dirichlet_t and dirichlet_tt are time derivatives of the
/// Dirichlet data, needed for boundary velocities and for the elimination
/// right-hand side when boundary values are removed from the system.
struct ProblemData {
  FieldFunction forcing;
  FieldFunction dirichlet;
  FieldFunction dirichlet_t;
  FieldFunction dirichlet_tt;
  TractionFunction neumann;
  FieldFunction initial_u;
  FieldFunction initial_v;
};

/// Exact fields of the travelling-wave benchmark:
/// u_i(x, t) = sin(2 pi (t + x_i)).
Eigen::Vector2d manufactured_displacement(const Eigen::Vector2d& x, double t);
Eigen::Vector2d manufactured_velocity(const Eigen::Vector2d& x, double t);
Eigen::Vector2d manufactured_forcing(const IsotropicMaterial& material, const Eigen::Vector2d& x,
                                     double t);

/// Problem data matching the travelling-wave benchmark for the material.
ProblemData manufactured_problem(const IsotropicMaterial& material);

/// All-zero data (free vibration from zero state).
ProblemData homogeneous_problem();

}  // namespace elwave
