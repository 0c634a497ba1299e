#pragma once

#include <cstddef>
#include <vector>

#include "dgmrf/types.hpp"

namespace dgmrf {

/// Row-major dense matrix for desk-scale exact computations (baseline fits,
/// synthetic ground-truth posteriors). Not meant for large n.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  NodeVector multiply(const NodeVector& x) const;
  DenseMatrix multiply(const DenseMatrix& other) const;
  DenseMatrix transposed() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

/// In-place lower Cholesky A = LL^T (upper triangle left untouched).
/// Returns false if the matrix is not positive definite.
bool cholesky_in_place(DenseMatrix& a);

/// Solve LL^T x = b given the factor from cholesky_in_place.
NodeVector cholesky_solve(const DenseMatrix& chol, const NodeVector& b);

/// log det(A) = 2 sum log L_ii.
double cholesky_logdet(const DenseMatrix& chol);

/// In-place inverse of the lower-triangular factor.
DenseMatrix lower_triangular_inverse(const DenseMatrix& chol);

/// diag(A^{-1}) from the factor: squared column norms of L^{-1}.
NodeVector cholesky_inverse_diagonal(const DenseMatrix& chol);

/// Solve L y = b (forward) or L^T x = y (backward) in place.
void forward_substitute(const DenseMatrix& chol, NodeVector& b);
void backward_substitute(const DenseMatrix& chol, NodeVector& b);

}  // namespace dgmrf
