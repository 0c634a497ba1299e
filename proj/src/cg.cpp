#include "dgmrf/cg.hpp"

#include <cmath>
#include <stdexcept>

namespace dgmrf {

NodeVector LinearOperator::operator()(const NodeVector& v) const {
  if (v.size() != dimension) throw std::invalid_argument("LinearOperator: length mismatch");
  NodeVector out(dimension);
  apply(v.data(), out.data());
  return out;
}

std::pair<NodeVector, CgReport> conjugate_gradient(const LinearOperator& op,
                                                   const NodeVector& rhs,
                                                   const CgConfig& config,
                                                   const std::optional<NodeVector>& x0) {
  const std::size_t n = op.dimension;
  if (rhs.size() != n) throw std::invalid_argument("conjugate_gradient: rhs length mismatch");
  if (!(config.tol > 0.0)) throw std::invalid_argument("conjugate_gradient: tol must be > 0");
  const std::size_t max_iter = config.max_iter ? config.max_iter : 2 * n;

  NodeVector x = x0 ? *x0 : NodeVector(n, 0.0);
  NodeVector r = rhs;
  if (x0) {
    op.apply(x.data(), r.data());
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
  }

  const double rhs_norm = norm2(rhs);
  const double target = config.tol * (rhs_norm > 0.0 ? rhs_norm : 1.0);

  CgReport report;
  double rr = dot(r, r);
  report.final_residual_norm = std::sqrt(rr);
  if (report.final_residual_norm <= target) {
    report.converged = true;
    return {std::move(x), report};
  }

  NodeVector p = r, ap(n);
  for (std::size_t it = 0; it < max_iter; ++it) {
    op.apply(p.data(), ap.data());
    const double pap = dot(p, ap);
    if (!std::isfinite(pap))
      throw std::runtime_error("conjugate_gradient: NaN encountered (operator not SPD?)");
    const double alpha = rr / pap;
    axpy(alpha, p, x);
    axpy(-alpha, ap, r);
    const double rr_new = dot(r, r);
    if (!std::isfinite(rr_new))
      throw std::runtime_error("conjugate_gradient: NaN in residual");
    report.iterations = it + 1;
    report.final_residual_norm = std::sqrt(rr_new);
    if (report.final_residual_norm <= target) {
      report.converged = true;
      break;
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  return {std::move(x), report};
}

}  // namespace dgmrf
