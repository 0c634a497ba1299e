#pragma once

#include <cstdint>
#include <vector>

#include "dgmrf/cg.hpp"
#include "dgmrf/graph.hpp"
#include "dgmrf/posterior.hpp"

namespace dgmrf {

/// Harmonic interpolation: every unobserved node ends up at the weighted
/// mean of its neighbors. Solved as the SPD system on the unobserved
/// sub-block of the combinatorial Laplacian via CG; observed values pass
/// through unchanged.
NodeVector label_propagation(const SparseGraph& g, const NodeVector& y,
                             const ObservationMask& mask, const CgConfig& cg = {},
                             CgReport* report = nullptr);

/// First-order intrinsic-style GMRF prior, Q = kappa (D - A) + epsilon I.
struct IgmrfModel {
  double kappa = 1.0;
  double sigma = 1.0;
  double epsilon = 1e-6;
};

struct IgmrfGridConfig {
  std::vector<double> sigmas{0.001, 0.01, 0.1, 1.0};
  double kappa_min = 0.01;
  double kappa_max = 1000.0;
  std::size_t n_kappa = 20;  // log-spaced
  double epsilon = 1e-6;
};

GmrfModel igmrf_gmrf_model(const SparseGraph& g, const IgmrfModel& model);

/// Exact log marginal likelihood of the IGMRF at (kappa, sigma) through
/// p(y_m) = p(y_m|x') p(x') / p(x'|y_m), valid for any x'. Dense Cholesky,
/// desk scale only. x_prime empty means "use the posterior mean".
double igmrf_log_marginal_likelihood(const SparseGraph& g, const IgmrfModel& model,
                                     const NodeVector& y, const ObservationMask& mask,
                                     const NodeVector& x_prime = {});

/// Grid search over (sigma, kappa) maximizing the log marginal likelihood.
IgmrfModel igmrf_fit(const SparseGraph& g, const NodeVector& y, const ObservationMask& mask,
                     const IgmrfGridConfig& grid = {});

PosteriorSummary igmrf_posterior(const IgmrfModel& model, const SparseGraph& g,
                                 const NodeVector& y, const ObservationMask& mask,
                                 std::size_t n_samples = 100, std::uint64_t seed = 0,
                                 const CgConfig& cg = {});

}  // namespace dgmrf
