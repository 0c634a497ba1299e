#include "dgmrf/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dgmrf {

namespace {

inline double pythag(double a, double b) {
  const double absa = std::abs(a), absb = std::abs(b);
  if (absa > absb) {
    const double r = absb / absa;
    return absa * std::sqrt(1.0 + r * r);
  }
  if (absb == 0.0) return 0.0;
  const double r = absa / absb;
  return absb * std::sqrt(1.0 + r * r);
}

inline double sign_of(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Householder reduction to tridiagonal form, eigenvalues-only variant
// (no transform accumulation). d gets the diagonal, e the subdiagonal
// with e[i] coupling rows i-1 and i.
void tridiagonalize(DenseMatrix& a, std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = a.rows();
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  for (std::size_t i = n - 1; i >= 1; --i) {
    const std::size_t l = i - 1;
    double h = 0.0, scale = 0.0;
    if (l > 0) {
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(a(i, k));
      if (scale == 0.0) {
        e[i] = a(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          a(i, k) /= scale;
          h += a(i, k) * a(i, k);
        }
        double f = a(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
          e[j] = g / h;
          f += e[j] * a(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = a(i, j);
          const double gj = e[j] - hh * f;
          e[j] = gj;
          for (std::size_t k = 0; k <= j; ++k) a(j, k) -= f * e[k] + gj * a(i, k);
        }
      }
    } else {
      e[i] = a(i, l);
    }
  }
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
  e[0] = 0.0;
}

// Implicit-shift QL iteration on a tridiagonal matrix (EISPACK tql1 lineage).
void tql_eigenvalues(std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = d.size();
  if (n == 1) return;
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();

  for (std::size_t l = 0; l < n; ++l) {
    std::size_t iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == 50)
          throw std::runtime_error("symmetric_eigenvalues: QL iteration failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = pythag(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + sign_of(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          const double b = c * e[i];
          r = pythag(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

std::vector<double> symmetric_eigenvalues_dense(DenseMatrix a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("symmetric_eigenvalues_dense: matrix must be square");
  std::vector<double> d, e;
  tridiagonalize(a, d, e);
  tql_eigenvalues(d, e);
  std::sort(d.begin(), d.end());
  return d;
}

std::vector<double> symmetric_eigenvalues(const SparseGraph& g, std::size_t dense_cap) {
  const std::size_t n = g.n_nodes();
  if (n > dense_cap)
    throw std::runtime_error(
        "symmetric_eigenvalues: graph exceeds the dense eigendecomposition cap (" +
        std::to_string(n) + " > " + std::to_string(dense_cap) +
        "); use the power-series log-det backend instead");

  DenseMatrix atilde(n, n);
  const auto& deg = g.degrees();
  for (index_t i = 0; i < n; ++i) {
    const auto nbrs = g.neighbors(i);
    const auto ws = g.neighbor_weights(i);
    for (std::size_t k = 0; k < nbrs.size(); ++k)
      atilde(i, nbrs[k]) = ws[k] / std::sqrt(deg[i] * deg[nbrs[k]]);
  }

  auto vals = symmetric_eigenvalues_dense(std::move(atilde));
  for (double& v : vals) {
    if (std::abs(v) > 1.0 + 1e-8)
      throw std::runtime_error("symmetric_eigenvalues: eigenvalue escaped [-1,1]");
    v = std::clamp(v, -1.0, 1.0);
  }
  return vals;
}

}  // namespace dgmrf
