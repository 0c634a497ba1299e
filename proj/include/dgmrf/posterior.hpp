#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dgmrf/cg.hpp"
#include "dgmrf/graph.hpp"
#include "dgmrf/model.hpp"
#include "dgmrf/rng.hpp"

namespace dgmrf {

/// A Gaussian prior over the latent field presented through the three pieces
/// the posterior machinery needs: Q applications, the vector Q mu, and draws
/// of noise with covariance Q (a factor applied to white noise).
struct GmrfModel {
  std::size_t n = 0;
  LinearOperator precision;
  NodeVector q_mu;
  std::function<NodeVector(Rng&)> precision_factor_noise;
};

/// DGMRF prior: Q = G^T G, Q mu = -G^T b_acc, noise = G^T z.
GmrfModel dgmrf_gmrf_model(const SparseGraph& g, const DgmrfParams& params);

struct PosteriorSummary {
  NodeVector mean;
  NodeVector marginal_std;
  std::size_t n_samples_used = 0;
  std::vector<CgReport> cg_reports;
  bool all_converged = true;
};

/// Solves (Q + sigma^{-2} I_m) mu~ = Q mu + sigma^{-2} y_m with CG.
NodeVector posterior_mean(const GmrfModel& model, const NodeVector& y,
                          const ObservationMask& mask, double sigma,
                          const CgConfig& cg = {}, CgReport* report = nullptr);

/// Perturbation sampling: x = Q~^{-1}(w + Q mu + sigma^{-2} y_m + sigma^{-1} I_m z2)
/// with w ~ N(0, Q), z2 ~ N(0, I); then x ~ N(mu~, Q~^{-1}).
NodeVector posterior_sample(const GmrfModel& model, const NodeVector& y,
                            const ObservationMask& mask, double sigma, Rng& rng,
                            const CgConfig& cg = {},
                            const std::optional<NodeVector>& warm_start = std::nullopt,
                            CgReport* report = nullptr);

/// Unbiased per-node sample variance over n_samples posterior draws.
NodeVector marginal_variances(const GmrfModel& model, const NodeVector& y,
                              const ObservationMask& mask, double sigma,
                              std::size_t n_samples, std::uint64_t seed,
                              const CgConfig& cg = {}, PosteriorSummary* summary = nullptr);

/// Mean plus marginal standard deviations from `n_samples` draws (default
/// protocol: 100 samples).
PosteriorSummary infer_posterior(const GmrfModel& model, const NodeVector& y,
                                 const ObservationMask& mask, double sigma,
                                 std::size_t n_samples, std::uint64_t seed,
                                 const CgConfig& cg = {});

// DGMRF-parametrized convenience wrappers.
NodeVector posterior_mean(const SparseGraph& g, const DgmrfParams& params, const NodeVector& y,
                          const ObservationMask& mask, const CgConfig& cg = {},
                          CgReport* report = nullptr);
NodeVector posterior_sample(const SparseGraph& g, const DgmrfParams& params,
                            const NodeVector& y, const ObservationMask& mask, Rng& rng,
                            const CgConfig& cg = {});
PosteriorSummary infer_posterior(const SparseGraph& g, const DgmrfParams& params,
                                 const NodeVector& y, const ObservationMask& mask,
                                 std::size_t n_samples, std::uint64_t seed,
                                 const CgConfig& cg = {});

}  // namespace dgmrf
