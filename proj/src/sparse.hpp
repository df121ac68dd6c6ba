#pragma once

#include <Eigen/Sparse>
#include <string>
#include <vector>

namespace elwave {

using CsrMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

/// Compressed-row sparse matrix with a symmetry hint. Wraps an Eigen sparse
/// matrix kept in compressed form, so the raw CSR arrays are always valid.
class SparseOperator {
 public:
  SparseOperator() = default;
  explicit SparseOperator(CsrMatrix m, bool symmetric_hint = false);

  /// Duplicate triplets are summed in insertion order. Throws on non-finite
  /// values or out-of-range indices.
  static SparseOperator from_triplets(int rows, int cols, const std::vector<Triplet>& triplets,
                                      bool symmetric_hint = false);
  static SparseOperator from_dense(const Eigen::MatrixXd& dense, bool symmetric_hint = false);

  int rows() const { return static_cast<int>(m_.rows()); }
  int cols() const { return static_cast<int>(m_.cols()); }
  int nonzeros() const { return static_cast<int>(m_.nonZeros()); }
  bool symmetric_hint() const { return symmetric_hint_; }

  const CsrMatrix& matrix() const { return m_; }
  const int* row_offsets() const { return m_.outerIndexPtr(); }
  const int* col_indices() const { return m_.innerIndexPtr(); }
  const double* values() const { return m_.valuePtr(); }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  SparseOperator transposed() const;
  Eigen::MatrixXd to_dense() const { return Eigen::MatrixXd(m_); }

  /// Largest absolute entry (0 for an empty matrix).
  double max_abs() const;

  /// max |A - A^T| <= rel_tol * max |A|.
  bool is_symmetric(double rel_tol = 1e-12) const;

 private:
  CsrMatrix m_;
  bool symmetric_hint_ = false;
};

/// ca*A + cb*B; dimensions must agree.
SparseOperator add_scaled(double ca, const SparseOperator& A, double cb, const SparseOperator& B);

/// Matrix Market coordinate format, 1-based indices, 17 significant digits.
void write_matrix_market(const SparseOperator& A, const std::string& path);
SparseOperator read_matrix_market(const std::string& path);

}  // namespace elwave
