#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "sparse.hpp"

namespace elwave {

enum class SolverMethod { ConjugateGradient, Gmres, DenseDirect, SparseDirect };

std::string solver_method_name(SolverMethod method);
SolverMethod parse_solver_method(const std::string& name);

struct SolverConfig {
  SolverMethod method = SolverMethod::ConjugateGradient;
  double rel_tolerance = 1e-10;
  int max_iterations = 50000;

  void validate() const;
};

struct SolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Thrown when an iterative method exhausts max_iterations; carries the
/// residual that was reached.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, int iterations, double residual)
      : std::runtime_error(what), iterations(iterations), residual(residual) {}
  int iterations;
  double residual;
};

/// One matrix, many right-hand sides. Direct methods factor once in the
/// constructor; iterative methods keep only a reference to the matrix.
class LinearSolver {
 public:
  LinearSolver(const SparseOperator& A, const SolverConfig& config);
  ~LinearSolver();
  LinearSolver(const LinearSolver&) = delete;
  LinearSolver& operator=(const LinearSolver&) = delete;

  Eigen::VectorXd solve(const Eigen::VectorXd& b, SolveStats* stats = nullptr) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Unpreconditioned conjugate gradients for symmetric positive definite
/// systems; relative residual measured against the right-hand side norm.
Eigen::VectorXd conjugate_gradient(const SparseOperator& A, const Eigen::VectorXd& b,
                                   double rel_tolerance, int max_iterations, SolveStats* stats);

/// Restarted GMRES (restart 200) without preconditioning.
Eigen::VectorXd gmres(const SparseOperator& A, const Eigen::VectorXd& b, double rel_tolerance,
                      int max_iterations, SolveStats* stats);

}  // namespace elwave
