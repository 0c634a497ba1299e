#pragma once

#include <cstddef>
#include <cstdint>
#include <cmath>
#include <vector>

namespace dgmrf {

/// Dense per-node values, indexed by node id.
using NodeVector = std::vector<double>;

using index_t = std::uint32_t;

// Small vector kernels shared across the solvers. All assume matching lengths.

inline double dot(const NodeVector& a, const NodeVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const NodeVector& a) { return std::sqrt(dot(a, a)); }

// y += c * x
inline void axpy(double c, const NodeVector& x, NodeVector& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline void scale(NodeVector& x, double c) {
  for (double& v : x) v *= c;
}

inline bool all_finite(const NodeVector& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace dgmrf
