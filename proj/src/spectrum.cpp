#include "spectrum.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace elwave {

namespace {

constexpr int kDenseCap = 5000;
constexpr double kSymmetryTol = 1e-10;
constexpr double kLanczosTol = 1e-8;

void require_symmetric(const SparseOperator& K, const char* who) {
  if (K.rows() != K.cols()) {
    throw std::invalid_argument(std::string(who) + ": matrix must be square");
  }
  if (K.rows() == 0) {
    throw std::invalid_argument(std::string(who) + ": matrix is empty");
  }
  if (!K.is_symmetric(kSymmetryTol)) {
    throw std::invalid_argument(std::string(who) + ": matrix is not symmetric");
  }
}

/// Largest eigenvalue of a symmetric operator by Lanczos with full
/// reorthogonalization. Convergence: residual bound beta_j * |s_last| below
/// tol * |theta| for the extremal Ritz pair, or a long stagnation of the
/// extremal Ritz value. The stagnation stop matters for penalty-dominated
/// operators whose top eigenvalues are nearly degenerate: the Ritz value
/// settles in a few dozen steps while the Ritz vector keeps rotating inside
/// the near-degenerate subspace and the residual test never fires.
double lanczos_largest(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& op, int n,
                       double tol, int* iterations) {
  const int maxit = std::min(n, 1200);
  std::mt19937 rng(12345);
  std::normal_distribution<double> dist;
  Eigen::MatrixXd V(n, std::min(maxit + 1, 64));
  Eigen::VectorXd alpha(maxit), beta(maxit);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = dist(rng);
  }
  V.col(0) = v / v.norm();

  double theta = 0.0;
  double theta_prev = std::numeric_limits<double>::infinity();
  int stagnant = 0;
  bool converged = false;
  int j = 0;
  for (; j < maxit; ++j) {
    Eigen::VectorXd w = op(V.col(j));
    alpha[j] = V.col(j).dot(w);
    w -= alpha[j] * V.col(j);
    if (j > 0) {
      w -= beta[j - 1] * V.col(j - 1);
    }
    // Full reorthogonalization against the whole basis, twice.
    for (int pass = 0; pass < 2; ++pass) {
      w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
    }
    beta[j] = w.norm();

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(j + 1, j + 1);
    for (int i = 0; i <= j; ++i) {
      T(i, i) = alpha[i];
      if (i > 0) {
        T(i, i - 1) = T(i - 1, i) = beta[i - 1];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const int last = j;
    theta = es.eigenvalues()[last];
    const double resid = beta[j] * std::abs(es.eigenvectors()(last, last));
    const double scale = std::max(std::abs(theta), 1e-300);
    if (j >= 20 && std::abs(theta - theta_prev) <= 1e-11 * scale) {
      ++stagnant;
    } else {
      stagnant = 0;
    }
    theta_prev = theta;
    if (resid <= tol * scale || beta[j] == 0.0 || stagnant >= 5) {
      ++j;
      converged = true;
      break;
    }
    if (j + 2 > V.cols()) {
      V.conservativeResize(Eigen::NoChange, std::min(maxit + 1, 2 * static_cast<int>(V.cols())));
    }
    V.col(j + 1) = w / beta[j];
  }
  if (!converged) {
    throw std::runtime_error("Lanczos did not converge within " + std::to_string(maxit) +
                             " iterations");
  }
  if (iterations) {
    *iterations = j;
  }
  return theta;
}

CondNumResult spd_dense(const SparseOperator& K) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K.to_dense());
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("condition_number_spd: dense eigensolver failed");
  }
  CondNumResult result;
  result.lambda_min = es.eigenvalues()[0];
  result.lambda_max = es.eigenvalues()[es.eigenvalues().size() - 1];
  result.method = "dense";
  if (!(result.lambda_min > 0.0)) {
    throw IndefiniteMatrixError("condition_number_spd: smallest eigenvalue " +
                                    std::to_string(result.lambda_min) + " is not positive",
                                result.lambda_min);
  }
  result.kappa = result.lambda_max / result.lambda_min;
  return result;
}

CondNumResult spd_lanczos(const SparseOperator& K) {
  Eigen::SparseMatrix<double> colmajor = K.matrix();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(colmajor);
  if (ldlt.info() != Eigen::Success) {
    throw std::runtime_error("condition_number_spd: shift-invert factorization failed");
  }
  const double d_min = ldlt.vectorD().minCoeff();
  if (!(d_min > 0.0)) {
    throw IndefiniteMatrixError(
        "condition_number_spd: matrix is not positive definite (LDLT pivot " +
            std::to_string(d_min) + ")",
        d_min);
  }

  CondNumResult result;
  result.method = "lanczos";
  int it_max = 0, it_min = 0;
  result.lambda_max = lanczos_largest(
      [&K](const Eigen::VectorXd& x) { return (K.matrix() * x).eval(); },
      K.rows(), kLanczosTol, &it_max);
  const double inv_largest = lanczos_largest(
      [&ldlt](const Eigen::VectorXd& x) { return ldlt.solve(x).eval(); },
      K.rows(), kLanczosTol, &it_min);
  if (!(inv_largest > 0.0)) {
    throw std::runtime_error("condition_number_spd: shift-invert Lanczos failed");
  }
  result.lambda_min = 1.0 / inv_largest;
  result.iterations = it_max + it_min;
  result.kappa = result.lambda_max / result.lambda_min;
  return result;
}

}  // namespace

CondNumResult condition_number_spd(const SparseOperator& K, EigMethod method) {
  require_symmetric(K, "condition_number_spd");
  if (method == EigMethod::Auto) {
    method = K.rows() <= kDenseCap ? EigMethod::Dense : EigMethod::Lanczos;
  }
  if (method == EigMethod::Dense) {
    if (K.rows() > kDenseCap) {
      throw std::invalid_argument(
          "condition_number_spd: dense path capped at dimension 5000; use the Lanczos method "
          "or reduce n");
    }
    return spd_dense(K);
  }
  return spd_lanczos(K);
}

double condition_number_general(const SparseOperator& L) {
  if (L.rows() != L.cols()) {
    throw std::invalid_argument("condition_number_general: matrix must be square");
  }
  if (L.rows() == 0) {
    throw std::invalid_argument("condition_number_general: matrix is empty");
  }
  if (L.rows() > kDenseCap) {
    throw std::invalid_argument(
        "condition_number_general: dense singular values capped at dimension 5000; reduce n");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(L.to_dense());
  const auto& sv = svd.singularValues();
  const double s_max = sv[0];
  const double s_min = sv[sv.size() - 1];
  if (!(s_min > 1e-14 * s_max)) {
    throw std::runtime_error("condition_number_general: matrix is numerically singular");
  }
  return s_max / s_min;
}

std::vector<double> full_spectrum(const SparseOperator& K) {
  require_symmetric(K, "full_spectrum");
  if (K.rows() > kDenseCap) {
    throw std::invalid_argument(
        "full_spectrum: dense eigensolve capped at dimension 5000; reduce n");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K.to_dense());
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("full_spectrum: dense eigensolver failed");
  }
  return std::vector<double>(es.eigenvalues().data(),
                             es.eigenvalues().data() + es.eigenvalues().size());
}

NormalizedSpectrum normalize_spectrum(const std::vector<double>& eigenvalues) {
  if (eigenvalues.empty()) {
    throw std::invalid_argument("normalize_spectrum: empty spectrum");
  }
  const auto [lo_it, hi_it] = std::minmax_element(eigenvalues.begin(), eigenvalues.end());
  const double lo = *lo_it, hi = *hi_it;
  NormalizedSpectrum out;
  out.values.reserve(eigenvalues.size());
  if (hi == lo) {
    out.degenerate = true;
    out.values.assign(eigenvalues.size(), 0.0);
    return out;
  }
  const double span = hi - lo;
  for (double ev : eigenvalues) {
    out.values.push_back((ev - lo) / span);
  }
  return out;
}

std::vector<std::pair<double, double>> detect_clusters(const std::vector<double>& normalized,
                                                       double gap) {
  if (!(gap > 0.0 && gap < 1.0)) {
    throw std::invalid_argument("detect_clusters: gap must lie in (0, 1)");
  }
  if (!std::is_sorted(normalized.begin(), normalized.end())) {
    throw std::invalid_argument("detect_clusters: input must be sorted ascending");
  }
  std::vector<std::pair<double, double>> clusters;
  if (normalized.empty()) {
    return clusters;
  }
  double lo = normalized.front();
  double prev = lo;
  for (std::size_t i = 1; i < normalized.size(); ++i) {
    if (normalized[i] - prev > gap) {
      clusters.emplace_back(lo, prev);
      lo = normalized[i];
    }
    prev = normalized[i];
  }
  clusters.emplace_back(lo, prev);
  return clusters;
}

double cluster_compactness(const std::vector<std::pair<double, double>>& clusters) {
  double sum = 0.0;
  for (const auto& [lo, hi] : clusters) {
    if (hi < lo) {
      throw std::invalid_argument("cluster_compactness: cluster with hi < lo");
    }
    sum += hi - lo;
  }
  return sum;
}

SpectrumReport analyze_spectrum(const SparseOperator& K, double gap) {
  SpectrumReport report;
  report.eigenvalues = full_spectrum(K);
  NormalizedSpectrum ns = normalize_spectrum(report.eigenvalues);
  report.normalized = std::move(ns.values);
  report.degenerate = ns.degenerate;
  report.clusters = detect_clusters(report.normalized, gap);
  report.cluster_ids.resize(report.normalized.size());
  std::size_t cluster = 0;
  for (std::size_t i = 0; i < report.normalized.size(); ++i) {
    while (cluster + 1 < report.clusters.size() &&
           report.normalized[i] > report.clusters[cluster].second) {
      ++cluster;
    }
    report.cluster_ids[i] = static_cast<int>(cluster);
  }
  const double lambda_min = report.eigenvalues.front();
  const double lambda_max = report.eigenvalues.back();
  report.condition_number = lambda_min > 0.0 ? lambda_max / lambda_min
                                             : std::numeric_limits<double>::quiet_NaN();
  return report;
}

}  // namespace elwave
