#include "solvers.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <stdexcept>

namespace elwave {

std::string solver_method_name(SolverMethod method) {
  switch (method) {
    case SolverMethod::ConjugateGradient:
      return "cg";
    case SolverMethod::Gmres:
      return "gmres";
    case SolverMethod::DenseDirect:
      return "dense";
    case SolverMethod::SparseDirect:
      return "sparse";
  }
  return "unknown";
}

SolverMethod parse_solver_method(const std::string& name) {
  if (name == "cg") return SolverMethod::ConjugateGradient;
  if (name == "gmres") return SolverMethod::Gmres;
  if (name == "dense") return SolverMethod::DenseDirect;
  if (name == "sparse") return SolverMethod::SparseDirect;
  throw std::invalid_argument("unknown solver method '" + name +
                              "' (expected cg, gmres, dense or sparse)");
}

void SolverConfig::validate() const {
  if (!(rel_tolerance > 0.0 && rel_tolerance < 1.0)) {
    throw std::invalid_argument("SolverConfig: rel_tolerance must lie in (0, 1)");
  }
  if (max_iterations < 1) {
    throw std::invalid_argument("SolverConfig: max_iterations must be >= 1");
  }
}

Eigen::VectorXd conjugate_gradient(const SparseOperator& A, const Eigen::VectorXd& b,
                                   double rel_tolerance, int max_iterations, SolveStats* stats) {
  const double bnorm = b.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  if (bnorm == 0.0) {
    if (stats) {
      *stats = {0, 0.0};
    }
    return x;
  }
  Eigen::VectorXd r = b;
  Eigen::VectorXd p = r;
  double rr = r.squaredNorm();
  const double target = rel_tolerance * bnorm;
  int it = 0;
  while (std::sqrt(rr) > target) {
    if (it >= max_iterations) {
      throw SolverFailure("conjugate gradients did not converge within " +
                              std::to_string(max_iterations) + " iterations (residual " +
                              std::to_string(std::sqrt(rr) / bnorm) + ")",
                          it, std::sqrt(rr) / bnorm);
    }
    const Eigen::VectorXd Ap = A.matrix() * p;
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0)) {
      throw std::runtime_error("conjugate gradients: matrix is not positive definite");
    }
    const double alpha = rr / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
    ++it;
  }
  if (stats) {
    *stats = {it, std::sqrt(rr) / bnorm};
  }
  return x;
}

Eigen::VectorXd gmres(const SparseOperator& A, const Eigen::VectorXd& b, double rel_tolerance,
                      int max_iterations, SolveStats* stats) {
  const int n = static_cast<int>(b.size());
  const double bnorm = b.norm();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (bnorm == 0.0) {
    if (stats) {
      *stats = {0, 0.0};
    }
    return x;
  }
  const int restart = std::min(200, n);
  int total_it = 0;
  double rel_res = 1.0;

  while (total_it < max_iterations) {
    Eigen::VectorXd r = b - A.matrix() * x;
    double beta = r.norm();
    rel_res = beta / bnorm;
    if (rel_res <= rel_tolerance) {
      break;
    }
    Eigen::MatrixXd V(n, restart + 1);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(restart + 1, restart);
    Eigen::VectorXd cs = Eigen::VectorXd::Zero(restart);
    Eigen::VectorXd sn = Eigen::VectorXd::Zero(restart);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(restart + 1);
    V.col(0) = r / beta;
    g[0] = beta;
    int k = 0;
    for (; k < restart && total_it < max_iterations; ++k, ++total_it) {
      Eigen::VectorXd w = A.matrix() * V.col(k);
      for (int i = 0; i <= k; ++i) {
        H(i, k) = w.dot(V.col(i));
        w -= H(i, k) * V.col(i);
      }
      // One re-orthogonalization pass keeps the basis usable for badly
      // conditioned systems.
      for (int i = 0; i <= k; ++i) {
        const double corr = w.dot(V.col(i));
        H(i, k) += corr;
        w -= corr * V.col(i);
      }
      const double subdiag = w.norm();
      H(k + 1, k) = subdiag;
      if (subdiag > 0.0) {
        V.col(k + 1) = w / subdiag;
      }
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
        H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
        H(i, k) = t;
      }
      const double denom = std::hypot(H(k, k), H(k + 1, k));
      if (denom == 0.0) {
        cs[k] = 1.0;
        sn[k] = 0.0;
      } else {
        cs[k] = H(k, k) / denom;
        sn[k] = H(k + 1, k) / denom;
      }
      H(k, k) = cs[k] * H(k, k) + sn[k] * H(k + 1, k);
      H(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      rel_res = std::abs(g[k + 1]) / bnorm;
      if (rel_res <= rel_tolerance || subdiag == 0.0) {
        ++k;
        ++total_it;
        break;  // converged, or lucky breakdown
      }
    }
    if (k > 0) {
      const Eigen::VectorXd y =
          H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
      x += V.leftCols(k) * y;
    }
    if (rel_res <= rel_tolerance) {
      break;
    }
  }

  Eigen::VectorXd r = b - A.matrix() * x;
  rel_res = r.norm() / bnorm;
  if (rel_res > rel_tolerance) {
    throw SolverFailure("GMRES did not converge within " + std::to_string(max_iterations) +
                            " iterations (residual " + std::to_string(rel_res) + ")",
                        total_it, rel_res);
  }
  if (stats) {
    *stats = {total_it, rel_res};
  }
  return x;
}

struct LinearSolver::Impl {
  const SparseOperator& A;
  SolverConfig config;
  std::unique_ptr<Eigen::PartialPivLU<Eigen::MatrixXd>> dense_lu;
  std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> ldlt;
  std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>>> lu;
  Eigen::SparseMatrix<double> colmajor;  // backing store for the sparse factorizations

  Impl(const SparseOperator& A, const SolverConfig& config) : A(A), config(config) {
    config.validate();
    switch (config.method) {
      case SolverMethod::DenseDirect: {
        dense_lu = std::make_unique<Eigen::PartialPivLU<Eigen::MatrixXd>>(A.to_dense());
        break;
      }
      case SolverMethod::SparseDirect: {
        colmajor = A.matrix();
        if (A.symmetric_hint()) {
          ldlt = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
          ldlt->compute(colmajor);
          if (ldlt->info() != Eigen::Success) {
            throw std::runtime_error("sparse LDLT factorization failed");
          }
        } else {
          lu = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
          lu->compute(colmajor);
          if (lu->info() != Eigen::Success) {
            throw std::runtime_error("sparse LU factorization failed");
          }
        }
        break;
      }
      default:
        break;
    }
  }
};

LinearSolver::LinearSolver(const SparseOperator& A, const SolverConfig& config)
    : impl_(std::make_unique<Impl>(A, config)) {
  if (A.rows() != A.cols()) {
    throw std::invalid_argument("LinearSolver: matrix must be square");
  }
}

LinearSolver::~LinearSolver() = default;

Eigen::VectorXd LinearSolver::solve(const Eigen::VectorXd& b, SolveStats* stats) const {
  if (b.size() != impl_->A.rows()) {
    throw std::invalid_argument("LinearSolver::solve: right-hand side size mismatch");
  }
  switch (impl_->config.method) {
    case SolverMethod::ConjugateGradient:
      return conjugate_gradient(impl_->A, b, impl_->config.rel_tolerance,
                                impl_->config.max_iterations, stats);
    case SolverMethod::Gmres:
      return gmres(impl_->A, b, impl_->config.rel_tolerance, impl_->config.max_iterations, stats);
    case SolverMethod::DenseDirect: {
      Eigen::VectorXd x = impl_->dense_lu->solve(b);
      if (stats) {
        const double bnorm = b.norm();
        const double res = (b - impl_->A.matrix() * x).norm();
        *stats = {0, bnorm > 0.0 ? res / bnorm : 0.0};
      }
      return x;
    }
    case SolverMethod::SparseDirect: {
      Eigen::VectorXd x;
      if (impl_->ldlt) {
        x = impl_->ldlt->solve(b);
      } else {
        x = impl_->lu->solve(b);
      }
      if (stats) {
        const double bnorm = b.norm();
        const double res = (b - impl_->A.matrix() * x).norm();
        *stats = {0, bnorm > 0.0 ? res / bnorm : 0.0};
      }
      return x;
    }
  }
  throw std::logic_error("LinearSolver::solve: unhandled method");
}

}  // namespace elwave
