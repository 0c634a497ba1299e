#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "dgmrf/types.hpp"

namespace dgmrf {

/// Matrix-free symmetric positive definite operator.
struct LinearOperator {
  std::size_t dimension = 0;
  std::function<void(const double* in, double* out)> apply;

  NodeVector operator()(const NodeVector& v) const;
};

struct CgConfig {
  double tol = 1e-7;          // relative residual ||Ax-b|| <= tol*||b||
  std::size_t max_iter = 0;   // 0 means 2*dimension
};

struct CgReport {
  std::size_t iterations = 0;
  double final_residual_norm = 0.0;
  bool converged = false;
};

/// Plain conjugate gradients. Returns the best iterate even on
/// non-convergence (report.converged = false); throws on NaN breakdown.
std::pair<NodeVector, CgReport> conjugate_gradient(
    const LinearOperator& op, const NodeVector& rhs, const CgConfig& config = {},
    const std::optional<NodeVector>& x0 = std::nullopt);

}  // namespace dgmrf
