#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dgmrf/variational.hpp"

namespace dgmrf {

enum class GammaMode { trainable, fixed_zero, fixed_one };

GammaMode gamma_mode_from_string(const std::string& s);
std::string to_string(GammaMode m);

struct TrainConfig {
  std::size_t iterations = 10000;
  double learning_rate = 0.01;
  std::size_t n_mc_samples = 10;
  LogdetBackend logdet_backend = LogdetBackend::eigen;
  std::uint64_t seed = 0;

  std::size_t n_layers = 1;
  std::size_t n_vi_layers = 1;  // 0 = mean field
  GammaMode gamma_mode = GammaMode::trainable;

  // Power-series pre-processing knobs (when that backend is selected).
  std::size_t power_series_K = 50;
  std::size_t trace_probes = 1000;

  std::size_t dense_eig_cap = 20000;

  void validate() const;
};

/// Standard Adam over a flat parameter vector (maximization is handled by
/// feeding the negated gradient).
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t t = 0;
  NodeVector m, v;
};

void adam_step(AdamState& state, NodeVector& params, const NodeVector& grad, double lr);

struct TrainResult {
  DgmrfParams params;
  VariationalParams vp;
  std::vector<double> elbo_trace;  // per-node ELBO, one entry per iteration
  LogdetPreprocess pre;
};

/// Spec'd initialization: identity-adjacent layers, sigma = 1, nu = y with
/// unobserved entries at the observed mean, unit xi/tau.
void init_params(const NodeVector& y, const ObservationMask& mask, const TrainConfig& config,
                 DgmrfParams& params, VariationalParams& vp);

/// Maximizes the ELBO with Adam. Throws on divergence (non-finite ELBO),
/// reporting the last finite iteration in the message.
TrainResult train(const SparseGraph& g, const NodeVector& y, const ObservationMask& mask,
                  const TrainConfig& config,
                  const std::optional<LogdetPreprocess>& preprocess = std::nullopt);

}  // namespace dgmrf
