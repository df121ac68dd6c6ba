#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "sparse.hpp"

namespace elwave {

enum class EigMethod { Auto, Dense, Lanczos };

/// Thrown when a matrix expected to be positive definite has a non-positive
/// smallest eigenvalue (for example an under-penalized stiffness matrix).
class IndefiniteMatrixError : public std::runtime_error {
 public:
  IndefiniteMatrixError(const std::string& what, double lambda_min)
      : std::runtime_error(what), lambda_min(lambda_min) {}
  double lambda_min;
};

struct CondNumResult {
  double kappa = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  std::string method;  ///< "dense" or "lanczos"
  int iterations = 0;  ///< Lanczos steps, 0 for the dense path
};

/// lambda_max / lambda_min of a symmetric positive definite matrix. Symmetry
/// is checked to 1e-10 relative. Auto takes the dense path up to dimension
/// 5000 and Lanczos with full reorthogonalization (relative tolerance 1e-8,
/// smallest eigenvalue through a shift-invert factorization) beyond.
CondNumResult condition_number_spd(const SparseOperator& K, EigMethod method = EigMethod::Auto);

/// sigma_max / sigma_min through dense singular values; dimension capped at
/// 5000. Throws when sigma_min < 1e-14 * sigma_max.
double condition_number_general(const SparseOperator& L);

/// All eigenvalues of a symmetric matrix, ascending. Dense only; dimension
/// capped at 5000.
std::vector<double> full_spectrum(const SparseOperator& K);

struct NormalizedSpectrum {
  std::vector<double> values;
  bool degenerate = false;  ///< all eigenvalues equal; values are all zero
};

/// Min-max map onto [0,1].
NormalizedSpectrum normalize_spectrum(const std::vector<double>& eigenvalues);

/// Splits a sorted normalized spectrum between consecutive values whose
/// difference exceeds gap; each cluster is reported as [first, last].
std::vector<std::pair<double, double>> detect_clusters(const std::vector<double>& normalized,
                                                       double gap);

/// Sum of cluster widths: the fraction of the normalized range covered.
double cluster_compactness(const std::vector<std::pair<double, double>>& clusters);

/// Provenance card plus the spectral quantities of one matrix.
struct SpectrumReport {
  std::string label;
  double tau = 0.0;
  double gamma0 = 0.0;
  int S = 0;
  int p = 0;
  int n = 0;
  std::vector<double> eigenvalues;
  std::vector<double> normalized;
  std::vector<int> cluster_ids;  ///< per eigenvalue, index into clusters
  std::vector<std::pair<double, double>> clusters;
  double condition_number = 0.0;
  bool degenerate = false;
};

/// Dense spectrum, normalization and clustering of one symmetric matrix; the
/// provenance fields are left for the caller.
SpectrumReport analyze_spectrum(const SparseOperator& K, double gap);

}  // namespace elwave
