#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "solvers.hpp"
#include "sparse.hpp"

namespace elwave {

/// Temporal Galerkin coefficient tables for trial degree r: alpha couples the
/// trial derivative to the test functions, beta the trial values. Both are
/// r x (r+1); beta is stored for a unit interval and scales linearly with the
/// interval length.
struct TimeCoefficients {
  int r = 0;
  Eigen::MatrixXd alpha;
  Eigen::MatrixXd beta;
};

/// Trial basis: Lagrange polynomials on the r+1 Gauss-Lobatto points of
/// [0,1]. Test basis: degree r-1 Lagrange polynomials on the upper r of those
/// points. Entries are quadrature sums over the same Gauss-Lobatto rule,
/// which is exact for every product that appears.
TimeCoefficients time_coefficients(int r);

/// Data of one time interval: spatial operators, interval length and the
/// load vectors assembled at the two endpoints.
struct TimeSlabSystem {
  const SparseOperator* M = nullptr;
  const SparseOperator* A = nullptr;
  double tau = 0.0;
  Eigen::VectorXd b0;
  Eigen::VectorXd b1;

  void validate() const;
};

/// Coupled form: unknowns ordered (v1, u1), matrix
/// [[-tau/2 M, M], [M, tau/2 A]].
SparseOperator build_block_matrix(const TimeSlabSystem& sys);
Eigen::VectorXd build_block_rhs(const TimeSlabSystem& sys, const Eigen::VectorXd& u0,
                                const Eigen::VectorXd& v0);

/// Condensed form K = M + tau^2/4 A with right-hand side
/// tau^2/4 (b0 + b1) + (M - tau^2/4 A) u0 + tau M v0.
std::pair<SparseOperator, Eigen::VectorXd> build_condensed(const TimeSlabSystem& sys,
                                                           const Eigen::VectorXd& u0,
                                                           const Eigen::VectorXd& v0);

/// v1 = (2/tau)(u1 - u0) - v0.
Eigen::VectorXd postprocess_velocity(const Eigen::VectorXd& u1, const Eigen::VectorXd& u0,
                                     const Eigen::VectorXd& v0, double tau);

enum class StepPath { Condensed, Block };

/// One interval solve; returns (u1, v1). The condensed path accepts any
/// solver; the block matrix is indefinite, so conjugate gradients are
/// rejected there.
std::pair<Eigen::VectorXd, Eigen::VectorXd> step(const TimeSlabSystem& sys,
                                                 const Eigen::VectorXd& u0,
                                                 const Eigen::VectorXd& v0,
                                                 const SolverConfig& solver,
                                                 StepPath path = StepPath::Condensed,
                                                 SolveStats* stats = nullptr);

struct SlabProblem {
  const SparseOperator* M = nullptr;
  const SparseOperator* A = nullptr;
  std::function<Eigen::VectorXd(double)> rhs_at;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> u;
  std::vector<Eigen::VectorXd> v;
  std::vector<SolveStats> stats;  ///< one entry per interval
};

/// March over a strictly increasing time grid, reassembling the load at each
/// endpoint. The factorization (or iteration context) is rebuilt only when
/// the interval length changes. Solver failures are rethrown with the
/// interval index attached.
Trajectory run(const std::vector<double>& grid, const SlabProblem& problem,
               const Eigen::VectorXd& u0, const Eigen::VectorXd& v0, const SolverConfig& solver,
               StepPath path = StepPath::Condensed);

}  // namespace elwave
