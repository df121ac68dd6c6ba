#include "elasticity.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace elwave {

std::pair<double, double> lame_parameters(double young, double poisson) {
  if (!(young > 0.0)) {
    throw std::invalid_argument("lame_parameters: Young's modulus must be positive");
  }
  if (!(poisson > -1.0 && poisson < 0.5)) {
    throw std::invalid_argument("lame_parameters: Poisson ratio must lie in (-1, 1/2)");
  }
  const double lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
  const double mu = young / (2.0 * (1.0 + poisson));
  return {lambda, mu};
}

IsotropicMaterial::IsotropicMaterial(double young, double poisson, double density)
    : young_modulus(young), poisson_ratio(poisson), density(density) {
  if (!(density > 0.0)) {
    throw std::invalid_argument("IsotropicMaterial: density must be positive");
  }
  std::tie(lambda, mu) = lame_parameters(young, poisson);
}

Eigen::Matrix2d stress(const IsotropicMaterial& material, const Eigen::Matrix2d& grad) {
  const Eigen::Matrix2d eps = 0.5 * (grad + grad.transpose());
  return material.lambda * eps.trace() * Eigen::Matrix2d::Identity() + 2.0 * material.mu * eps;
}

Eigen::Vector2d traction(const IsotropicMaterial& material, const Eigen::Matrix2d& grad,
                         const Eigen::Vector2d& normal) {
  if (std::abs(normal.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("traction: normal must be unit length");
  }
  return stress(material, grad) * normal;
}

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

Eigen::Vector2d manufactured_displacement(const Eigen::Vector2d& x, double t) {
  return {std::sin(two_pi * (t + x[0])), std::sin(two_pi * (t + x[1]))};
}

Eigen::Vector2d manufactured_velocity(const Eigen::Vector2d& x, double t) {
  return {two_pi * std::cos(two_pi * (t + x[0])), two_pi * std::cos(two_pi * (t + x[1]))};
}

Eigen::Vector2d manufactured_forcing(const IsotropicMaterial& material, const Eigen::Vector2d& x,
                                     double t) {
  // rho u_tt - div sigma(u) reduces to a scalar multiple of u componentwise
  // for this field, since the mixed derivatives vanish.
  const double factor =
      two_pi * two_pi * (material.lambda + 2.0 * material.mu - material.density);
  return factor * manufactured_displacement(x, t);
}

ProblemData manufactured_problem(const IsotropicMaterial& material) {
  ProblemData data;
  data.forcing = [material](const Eigen::Vector2d& x, double t) {
    return manufactured_forcing(material, x, t);
  };
  data.dirichlet = [](const Eigen::Vector2d& x, double t) {
    return manufactured_displacement(x, t);
  };
  data.dirichlet_t = [](const Eigen::Vector2d& x, double t) {
    return manufactured_velocity(x, t);
  };
  data.dirichlet_tt = [](const Eigen::Vector2d& x, double t) {
    return (-two_pi * two_pi * manufactured_displacement(x, t)).eval();
  };
  data.neumann = [material](const Eigen::Vector2d& x, double t, const Eigen::Vector2d& n) {
    Eigen::Matrix2d grad = Eigen::Matrix2d::Zero();
    grad(0, 0) = two_pi * std::cos(two_pi * (t + x[0]));
    grad(1, 1) = two_pi * std::cos(two_pi * (t + x[1]));
    return traction(material, grad, n);
  };
  data.initial_u = [](const Eigen::Vector2d& x, double) {
    return manufactured_displacement(x, 0.0);
  };
  data.initial_v = [](const Eigen::Vector2d& x, double) { return manufactured_velocity(x, 0.0); };
  return data;
}

ProblemData homogeneous_problem() {
  auto zero = [](const Eigen::Vector2d&, double) { return Eigen::Vector2d::Zero().eval(); };
  ProblemData data;
  data.forcing = zero;
  data.dirichlet = zero;
  data.dirichlet_t = zero;
  data.dirichlet_tt = zero;
  data.neumann = [](const Eigen::Vector2d&, double, const Eigen::Vector2d&) {
    return Eigen::Vector2d::Zero().eval();
  };
  data.initial_u = zero;
  data.initial_v = zero;
  return data;
}

}  // namespace elwave
