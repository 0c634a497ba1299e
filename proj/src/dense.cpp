#include "dgmrf/dense.hpp"

#include <cmath>
#include <stdexcept>

namespace dgmrf {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

NodeVector DenseMatrix::multiply(const NodeVector& x) const {
  if (x.size() != cols_) throw std::invalid_argument("DenseMatrix::multiply: length mismatch");
  NodeVector y(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double* a = row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += a[j] * x[j];
    y[i] = s;
  }
  return y;
}

DenseMatrix DenseMatrix::multiply(const DenseMatrix& other) const {
  if (cols_ != other.rows_) throw std::invalid_argument("DenseMatrix::multiply: shape mismatch");
  DenseMatrix out(rows_, other.cols_);
  // ikj order keeps the inner loop contiguous.
  for (std::size_t i = 0; i < rows_; ++i) {
    double* o = out.row(i);
    const double* a = row(i);
    for (std::size_t k = 0; k < cols_; ++k) {
      const double aik = a[k];
      if (aik == 0.0) continue;
      const double* b = other.row(k);
      for (std::size_t j = 0; j < other.cols_; ++j) o[j] += aik * b[j];
    }
  }
  return out;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

bool cholesky_in_place(DenseMatrix& a) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("cholesky: matrix must be square");
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    const double* lj = a.row(j);
    for (std::size_t k = 0; k < j; ++k) d -= lj[k] * lj[k];
    if (!(d > 0.0)) return false;
    const double ljj = std::sqrt(d);
    a(j, j) = ljj;
    const double inv = 1.0 / ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      const double* li = a.row(i);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      a(i, j) = s * inv;
    }
  }
  return true;
}

void forward_substitute(const DenseMatrix& chol, NodeVector& b) {
  const std::size_t n = chol.rows();
  for (std::size_t i = 0; i < n; ++i) {
    const double* l = chol.row(i);
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l[k] * b[k];
    b[i] = s / l[i];
  }
}

void backward_substitute(const DenseMatrix& chol, NodeVector& b) {
  const std::size_t n = chol.rows();
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= chol(k, i) * b[k];
    b[i] = s / chol(i, i);
  }
}

NodeVector cholesky_solve(const DenseMatrix& chol, const NodeVector& b) {
  if (b.size() != chol.rows()) throw std::invalid_argument("cholesky_solve: length mismatch");
  NodeVector x = b;
  forward_substitute(chol, x);
  backward_substitute(chol, x);
  return x;
}

double cholesky_logdet(const DenseMatrix& chol) {
  double s = 0.0;
  for (std::size_t i = 0; i < chol.rows(); ++i) s += std::log(chol(i, i));
  return 2.0 * s;
}

DenseMatrix lower_triangular_inverse(const DenseMatrix& chol) {
  const std::size_t n = chol.rows();
  DenseMatrix inv(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    inv(j, j) = 1.0 / chol(j, j);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = 0.0;
      const double* li = chol.row(i);
      for (std::size_t k = j; k < i; ++k) s -= li[k] * inv(k, j);
      inv(i, j) = s / li[i];
    }
  }
  return inv;
}

NodeVector cholesky_inverse_diagonal(const DenseMatrix& chol) {
  const DenseMatrix linv = lower_triangular_inverse(chol);
  const std::size_t n = chol.rows();
  NodeVector d(n, 0.0);
  // (A^{-1})_jj = sum_i (L^{-1})_ij^2
  for (std::size_t i = 0; i < n; ++i) {
    const double* l = linv.row(i);
    for (std::size_t j = 0; j <= i; ++j) d[j] += l[j] * l[j];
  }
  return d;
}

}  // namespace dgmrf
