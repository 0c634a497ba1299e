#include "dgmrf/trainer.hpp"

#include <cmath>
#include <stdexcept>

namespace dgmrf {

GammaMode gamma_mode_from_string(const std::string& s) {
  if (s == "trainable") return GammaMode::trainable;
  if (s == "fixed0" || s == "fixed_zero") return GammaMode::fixed_zero;
  if (s == "fixed1" || s == "fixed_one") return GammaMode::fixed_one;
  throw std::invalid_argument("unknown gamma mode '" + s + "'");
}

std::string to_string(GammaMode m) {
  switch (m) {
    case GammaMode::trainable: return "trainable";
    case GammaMode::fixed_zero: return "fixed0";
    default: return "fixed1";
  }
}

void TrainConfig::validate() const {
  if (iterations == 0 || n_mc_samples == 0 || n_layers == 0)
    throw std::invalid_argument("TrainConfig: iterations, n_mc_samples, n_layers must be > 0");
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
}

void adam_step(AdamState& state, NodeVector& params, const NodeVector& grad, double lr) {
  if (params.size() != grad.size()) throw std::invalid_argument("adam_step: size mismatch");
  if (state.m.empty()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
  }
  ++state.t;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
    params[i] -= lr * (state.m[i] / c1) / (std::sqrt(state.v[i] / c2) + state.epsilon);
  }
}

void init_params(const NodeVector& y, const ObservationMask& mask, const TrainConfig& config,
                 DgmrfParams& params, VariationalParams& vp) {
  const std::size_t n = y.size();
  params.layers.assign(config.n_layers, LayerParams{});
  params.theta_sigma = 0.0;  // sigma = 1
  const double gamma_theta = config.gamma_mode == GammaMode::fixed_zero   ? -30.0
                             : config.gamma_mode == GammaMode::fixed_one ? 30.0
                                                                         : 0.0;
  for (auto& l : params.layers) l.theta3 = gamma_theta;

  double obs_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (mask.is_observed(i)) obs_mean += y[i];
  obs_mean /= static_cast<double>(mask.n_observed);

  vp.nu.resize(n);
  for (std::size_t i = 0; i < n; ++i) vp.nu[i] = mask.is_observed(i) ? y[i] : obs_mean;
  vp.log_xi.assign(n, 0.0);
  vp.log_tau.assign(n, 0.0);
  vp.vi_layers.assign(config.n_vi_layers, LayerParams{});
}

TrainResult train(const SparseGraph& g, const NodeVector& y, const ObservationMask& mask,
                  const TrainConfig& config,
                  const std::optional<LogdetPreprocess>& preprocess) {
  config.validate();
  const std::size_t n = g.n_nodes();
  if (y.size() != n || mask.size() != n) throw std::invalid_argument("train: length mismatch");

  LogdetPreprocess pre;
  if (preprocess) {
    pre = *preprocess;
  } else if (config.logdet_backend == LogdetBackend::eigen) {
    pre.eig = precompute_eigen(g, config.dense_eig_cap);
  } else {
    pre.traces =
        precompute_traces(g, config.power_series_K, config.trace_probes, config.seed);
  }

  TrainResult result;
  init_params(y, mask, config, result.params, result.vp);
  const ParamLayout layout{config.n_layers, config.n_vi_layers, n};
  NodeVector flat = pack_params(result.params, result.vp);

  // Positions of theta3 entries, zeroed out when gamma is fixed.
  std::vector<std::size_t> frozen;
  if (config.gamma_mode != GammaMode::trainable)
    for (std::size_t l = 0; l < config.n_layers; ++l) frozen.push_back(4 * l + 2);

  AdamState adam;
  const Rng base = Rng(config.seed);
  const double inv_n = 1.0 / static_cast<double>(n);
  result.elbo_trace.reserve(config.iterations);

  std::vector<NodeVector> noise(config.n_mc_samples);
  NodeVector grad(layout.size());
  for (std::size_t it = 0; it < config.iterations; ++it) {
    Rng rng = base.substream("train_mc", it);
    for (auto& r : noise) r = rng.normal_vector(n);

    unpack_params(flat, layout, result.params, result.vp);
    ElboWithGradient ewg;
    try {
      ewg = elbo_with_gradient(g, result.params, result.vp, y, mask, config.logdet_backend,
                               pre, noise);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error("train: diverged at iteration " + std::to_string(it) + " (" +
                               e.what() + "); last finite per-node ELBO " +
                               (result.elbo_trace.empty()
                                    ? std::string("n/a")
                                    : std::to_string(result.elbo_trace.back())));
    }
    result.elbo_trace.push_back(ewg.terms.per_node);

    // Ascent on the per-node ELBO = descent on its negation.
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] = -ewg.grad[i] * inv_n;
    for (std::size_t idx : frozen) grad[idx] = 0.0;
    adam_step(adam, flat, grad, config.learning_rate);
  }

  unpack_params(flat, layout, result.params, result.vp);
  result.pre = std::move(pre);
  return result;
}

}  // namespace dgmrf
