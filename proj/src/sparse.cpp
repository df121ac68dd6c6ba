#include "sparse.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace elwave {

SparseOperator::SparseOperator(CsrMatrix m, bool symmetric_hint)
    : m_(std::move(m)), symmetric_hint_(symmetric_hint) {
  m_.makeCompressed();
}

SparseOperator SparseOperator::from_triplets(int rows, int cols,
                                             const std::vector<Triplet>& triplets,
                                             bool symmetric_hint) {
  if (rows < 0 || cols < 0) {
    throw std::invalid_argument("SparseOperator::from_triplets: negative dimension");
  }
  for (const Triplet& t : triplets) {
    if (t.row() < 0 || t.row() >= rows || t.col() < 0 || t.col() >= cols) {
      throw std::invalid_argument("SparseOperator::from_triplets: index out of range");
    }
    if (!std::isfinite(t.value())) {
      throw std::invalid_argument("SparseOperator::from_triplets: non-finite value");
    }
  }
  CsrMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return SparseOperator(std::move(m), symmetric_hint);
}

SparseOperator SparseOperator::from_dense(const Eigen::MatrixXd& dense, bool symmetric_hint) {
  CsrMatrix m = dense.sparseView();
  m.makeCompressed();
  return SparseOperator(std::move(m), symmetric_hint);
}

Eigen::VectorXd SparseOperator::apply(const Eigen::VectorXd& x) const {
  if (x.size() != m_.cols()) {
    throw std::invalid_argument("SparseOperator::apply: size mismatch");
  }
  return m_ * x;
}

SparseOperator SparseOperator::transposed() const {
  CsrMatrix t = m_.transpose();
  t.makeCompressed();
  return SparseOperator(std::move(t), symmetric_hint_);
}

double SparseOperator::max_abs() const {
  double m = 0.0;
  const double* v = values();
  for (int i = 0; i < nonzeros(); ++i) {
    m = std::max(m, std::abs(v[i]));
  }
  return m;
}

bool SparseOperator::is_symmetric(double rel_tol) const {
  if (rows() != cols()) {
    return false;
  }
  CsrMatrix diff = m_ - CsrMatrix(m_.transpose());
  double d = 0.0;
  for (int k = 0; k < diff.nonZeros(); ++k) {
    d = std::max(d, std::abs(diff.valuePtr()[k]));
  }
  const double scale = max_abs();
  return d <= rel_tol * (scale > 0.0 ? scale : 1.0);
}

SparseOperator add_scaled(double ca, const SparseOperator& A, double cb, const SparseOperator& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw std::invalid_argument("add_scaled: dimension mismatch");
  }
  CsrMatrix m = ca * A.matrix() + cb * B.matrix();
  m.makeCompressed();
  return SparseOperator(std::move(m), A.symmetric_hint() && B.symmetric_hint());
}

void write_matrix_market(const SparseOperator& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_matrix_market: cannot open " + path);
  }
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << " " << A.cols() << " " << A.nonzeros() << "\n";
  const int* offsets = A.row_offsets();
  const int* cols = A.col_indices();
  const double* vals = A.values();
  char buf[64];
  for (int r = 0; r < A.rows(); ++r) {
    for (int k = offsets[r]; k < offsets[r + 1]; ++k) {
      std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", r + 1, cols[k] + 1, vals[k]);
      out << buf;
    }
  }
  if (!out) {
    throw std::runtime_error("write_matrix_market: write failed for " + path);
  }
}

SparseOperator read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_matrix_market: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0) {
    throw std::runtime_error("read_matrix_market: missing MatrixMarket banner");
  }
  if (line.find("coordinate") == std::string::npos || line.find("real") == std::string::npos) {
    throw std::runtime_error("read_matrix_market: only coordinate real matrices supported");
  }
  if (line.find("general") == std::string::npos) {
    throw std::runtime_error("read_matrix_market: only general symmetry supported");
  }
  do {
    if (!std::getline(in, line)) {
      throw std::runtime_error("read_matrix_market: truncated file");
    }
  } while (!line.empty() && line[0] == '%');

  int rows = 0, cols = 0;
  long long nnz = 0;
  {
    std::istringstream header(line);
    if (!(header >> rows >> cols >> nnz)) {
      throw std::runtime_error("read_matrix_market: bad size line");
    }
  }
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(nnz));
  for (long long k = 0; k < nnz; ++k) {
    int i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v)) {
      throw std::runtime_error("read_matrix_market: truncated entries");
    }
    triplets.emplace_back(i - 1, j - 1, v);
  }
  return SparseOperator::from_triplets(rows, cols, triplets);
}

}  // namespace elwave
