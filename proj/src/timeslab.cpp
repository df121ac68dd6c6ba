#include "timeslab.hpp"

#include <stdexcept>

#include "quadrature.hpp"
#include "shapes.hpp"

namespace elwave {

TimeCoefficients time_coefficients(int r) {
  if (r < 1) {
    throw std::invalid_argument("time_coefficients: r must be >= 1");
  }
  const QuadratureRule rule = gauss_lobatto(r + 1);
  const std::vector<double>& trial_nodes = rule.points;
  const std::vector<double> test_nodes(trial_nodes.begin() + 1, trial_nodes.end());

  TimeCoefficients tc;
  tc.r = r;
  tc.alpha = Eigen::MatrixXd::Zero(r, r + 1);
  tc.beta = Eigen::MatrixXd::Zero(r, r + 1);
  for (int kappa = 0; kappa < r; ++kappa) {
    for (int iota = 0; iota <= r; ++iota) {
      double a = 0.0, b = 0.0;
      for (std::size_t mu = 0; mu < rule.size(); ++mu) {
        const double t = rule.points[mu];
        const double w = rule.weights[mu];
        const double test = lagrange_value(test_nodes, kappa, t);
        a += w * lagrange_derivative(trial_nodes, iota, t) * test;
        b += w * lagrange_value(trial_nodes, iota, t) * test;
      }
      tc.alpha(kappa, iota) = a;
      tc.beta(kappa, iota) = b;
    }
  }
  return tc;
}

void TimeSlabSystem::validate() const {
  if (M == nullptr || A == nullptr) {
    throw std::invalid_argument("TimeSlabSystem: operators not set");
  }
  if (M->rows() != M->cols() || A->rows() != A->cols() || M->rows() != A->rows()) {
    throw std::invalid_argument("TimeSlabSystem: operator dimensions mismatch");
  }
  if (!(tau > 0.0)) {
    throw std::invalid_argument("TimeSlabSystem: tau must be positive");
  }
  if (b0.size() != M->rows() || b1.size() != M->rows()) {
    throw std::invalid_argument("TimeSlabSystem: load vector size mismatch");
  }
}

SparseOperator build_block_matrix(const TimeSlabSystem& sys) {
  sys.validate();
  const int n = sys.M->rows();
  const double half_tau = 0.5 * sys.tau;
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(4) * sys.M->nonzeros() +
                   static_cast<std::size_t>(sys.A->nonzeros()));
  auto push_block = [&](int row0, int col0, const SparseOperator& op, double scale) {
    const int* offsets = op.row_offsets();
    const int* cols = op.col_indices();
    const double* vals = op.values();
    for (int r = 0; r < op.rows(); ++r) {
      for (int k = offsets[r]; k < offsets[r + 1]; ++k) {
        triplets.emplace_back(row0 + r, col0 + cols[k], scale * vals[k]);
      }
    }
  };
  push_block(0, 0, *sys.M, -half_tau);
  push_block(0, n, *sys.M, 1.0);
  push_block(n, 0, *sys.M, 1.0);
  push_block(n, n, *sys.A, half_tau);
  return SparseOperator::from_triplets(2 * n, 2 * n, triplets, false);
}

Eigen::VectorXd build_block_rhs(const TimeSlabSystem& sys, const Eigen::VectorXd& u0,
                                const Eigen::VectorXd& v0) {
  sys.validate();
  const int n = sys.M->rows();
  if (u0.size() != n || v0.size() != n) {
    throw std::invalid_argument("build_block_rhs: state size mismatch");
  }
  const double half_tau = 0.5 * sys.tau;
  Eigen::VectorXd rhs(2 * n);
  rhs.head(n) = half_tau * sys.M->apply(v0) + sys.M->apply(u0);
  rhs.tail(n) =
      sys.M->apply(v0) - half_tau * sys.A->apply(u0) + half_tau * (sys.b0 + sys.b1);
  return rhs;
}

std::pair<SparseOperator, Eigen::VectorXd> build_condensed(const TimeSlabSystem& sys,
                                                           const Eigen::VectorXd& u0,
                                                           const Eigen::VectorXd& v0) {
  sys.validate();
  const int n = sys.M->rows();
  if (u0.size() != n || v0.size() != n) {
    throw std::invalid_argument("build_condensed: state size mismatch");
  }
  const double q = 0.25 * sys.tau * sys.tau;
  SparseOperator K = add_scaled(1.0, *sys.M, q, *sys.A);
  Eigen::VectorXd rhs = q * (sys.b0 + sys.b1) + sys.M->apply(u0) - q * sys.A->apply(u0) +
                        sys.tau * sys.M->apply(v0);
  return {std::move(K), std::move(rhs)};
}

Eigen::VectorXd postprocess_velocity(const Eigen::VectorXd& u1, const Eigen::VectorXd& u0,
                                     const Eigen::VectorXd& v0, double tau) {
  if (!(tau > 0.0)) {
    throw std::invalid_argument("postprocess_velocity: tau must be positive");
  }
  return (2.0 / tau) * (u1 - u0) - v0;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> step(const TimeSlabSystem& sys,
                                                 const Eigen::VectorXd& u0,
                                                 const Eigen::VectorXd& v0,
                                                 const SolverConfig& solver, StepPath path,
                                                 SolveStats* stats) {
  sys.validate();
  if (path == StepPath::Condensed) {
    auto [K, rhs] = build_condensed(sys, u0, v0);
    LinearSolver ls(K, solver);
    Eigen::VectorXd u1 = ls.solve(rhs, stats);
    return {u1, postprocess_velocity(u1, u0, v0, sys.tau)};
  }
  if (solver.method == SolverMethod::ConjugateGradient) {
    throw std::invalid_argument(
        "step: the block system is indefinite; use gmres, dense or sparse");
  }
  SparseOperator L = build_block_matrix(sys);
  Eigen::VectorXd rhs = build_block_rhs(sys, u0, v0);
  LinearSolver ls(L, solver);
  Eigen::VectorXd vu = ls.solve(rhs, stats);
  const int n = sys.M->rows();
  return {vu.tail(n), vu.head(n)};
}

Trajectory run(const std::vector<double>& grid, const SlabProblem& problem,
               const Eigen::VectorXd& u0, const Eigen::VectorXd& v0, const SolverConfig& solver,
               StepPath path) {
  if (problem.M == nullptr || problem.A == nullptr || !problem.rhs_at) {
    throw std::invalid_argument("run: incomplete slab problem");
  }
  if (grid.empty()) {
    throw std::invalid_argument("run: empty time grid");
  }
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("run: time grid must be strictly increasing");
    }
  }
  if (path == StepPath::Block && solver.method == SolverMethod::ConjugateGradient) {
    throw std::invalid_argument(
        "run: the block system is indefinite; use gmres, dense or sparse");
  }

  Trajectory traj;
  traj.times = grid;
  traj.u.reserve(grid.size());
  traj.v.reserve(grid.size());
  traj.u.push_back(u0);
  traj.v.push_back(v0);

  TimeSlabSystem sys;
  sys.M = problem.M;
  sys.A = problem.A;
  sys.b1 = problem.rhs_at(grid[0]);

  SparseOperator system_matrix;  // K or L for the current tau
  std::unique_ptr<LinearSolver> ls;
  double cached_tau = -1.0;
  const int n = problem.M->rows();

  for (std::size_t interval = 0; interval + 1 < grid.size(); ++interval) {
    sys.tau = grid[interval + 1] - grid[interval];
    sys.b0 = std::move(sys.b1);
    sys.b1 = problem.rhs_at(grid[interval + 1]);

    if (sys.tau != cached_tau) {
      if (path == StepPath::Condensed) {
        system_matrix = add_scaled(1.0, *problem.M, 0.25 * sys.tau * sys.tau, *problem.A);
      } else {
        system_matrix = build_block_matrix(sys);
      }
      ls = std::make_unique<LinearSolver>(system_matrix, solver);
      cached_tau = sys.tau;
    }

    const Eigen::VectorXd& u_prev = traj.u.back();
    const Eigen::VectorXd& v_prev = traj.v.back();
    SolveStats stats;
    try {
      if (path == StepPath::Condensed) {
        const double q = 0.25 * sys.tau * sys.tau;
        Eigen::VectorXd rhs = q * (sys.b0 + sys.b1) + problem.M->apply(u_prev) -
                              q * problem.A->apply(u_prev) + sys.tau * problem.M->apply(v_prev);
        Eigen::VectorXd u1 = ls->solve(rhs, &stats);
        traj.v.push_back(postprocess_velocity(u1, u_prev, v_prev, sys.tau));
        traj.u.push_back(std::move(u1));
      } else {
        Eigen::VectorXd rhs = build_block_rhs(sys, u_prev, v_prev);
        Eigen::VectorXd vu = ls->solve(rhs, &stats);
        traj.v.push_back(vu.head(n));
        traj.u.push_back(vu.tail(n));
      }
    } catch (const SolverFailure& e) {
      throw SolverFailure("interval " + std::to_string(interval) + ": " + e.what(),
                          e.iterations, e.residual);
    }
    traj.stats.push_back(stats);
  }
  return traj;
}

}  // namespace elwave
