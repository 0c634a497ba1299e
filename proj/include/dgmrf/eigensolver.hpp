#pragma once

#include <vector>

#include "dgmrf/dense.hpp"
#include "dgmrf/graph.hpp"

namespace dgmrf {

/// Eigenvalues of a dense symmetric matrix (lower triangle referenced),
/// ascending. Householder tridiagonalization followed by the implicit-shift
/// QL iteration; the matrix is destroyed.
std::vector<double> symmetric_eigenvalues_dense(DenseMatrix a);

/// Eigenvalues of D^{-1}A, ascending, all in [-1,1]. Computed as the
/// eigenvalues of the similar symmetric matrix D^{-1/2} A D^{-1/2}, which is
/// densified, so graphs beyond `dense_cap` nodes are rejected with an error
/// pointing at the power-series log-det backend.
std::vector<double> symmetric_eigenvalues(const SparseGraph& g, std::size_t dense_cap = 20000);

}  // namespace dgmrf
