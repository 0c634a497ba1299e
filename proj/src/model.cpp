#include "dgmrf/model.hpp"

#include <cmath>
#include <stdexcept>

namespace dgmrf {

Reparam reparametrize(const LayerParams& p) {
  const double alpha = std::exp(p.theta1);
  return {alpha, alpha * std::tanh(p.theta2), 1.0 / (1.0 + std::exp(-p.theta3))};
}

LayerParams layer_params_for(double alpha, double beta, double gamma, double bias) {
  if (!(alpha > 0.0)) throw std::invalid_argument("layer_params_for: alpha must be > 0");
  if (!(std::abs(beta) < alpha))
    throw std::invalid_argument("layer_params_for: need |beta| < alpha");
  LayerParams p;
  p.theta1 = std::log(alpha);
  p.theta2 = std::atanh(beta / alpha);
  if (gamma <= 0.0)
    p.theta3 = -30.0;
  else if (gamma >= 1.0)
    p.theta3 = 30.0;
  else
    p.theta3 = std::log(gamma / (1.0 - gamma));
  p.bias = bias;
  return p;
}

double DgmrfParams::sigma() const { return std::exp(theta_sigma); }

void layer_apply(const SparseGraph& g, const LayerParams& p, const double* h, double* out,
                 bool transpose, bool include_bias) {
  const std::size_t n = g.n_nodes();
  const auto [alpha, beta, gamma] = reparametrize(p);
  const auto& deg = g.degrees();
  const auto& logdeg = g.log_degrees();
  const auto& off = g.row_offsets();
  const auto& col = g.col_indices();
  const auto& w = g.weights();
  const double b = include_bias && !transpose ? p.bias : 0.0;

  if (!transpose) {
    // out_i = alpha d_i^gamma h_i + beta d_i^{gamma-1} sum_j w_ij h_j + b
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = off[i]; k < off[i + 1]; ++k) s += w[k] * h[col[k]];
      const double dg = std::exp(gamma * logdeg[i]);
      out[i] = alpha * dg * h[i] + beta * (dg / deg[i]) * s + b;
    }
  } else {
    // out = alpha D^gamma h + beta A D^{gamma-1} h
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = off[i]; k < off[i + 1]; ++k) {
        const index_t j = col[k];
        s += w[k] * std::exp((gamma - 1.0) * logdeg[j]) * h[j];
      }
      out[i] = alpha * std::exp(gamma * logdeg[i]) * h[i] + beta * s;
    }
  }
}

NodeVector layer_apply(const SparseGraph& g, const LayerParams& p, const NodeVector& h,
                       bool transpose, bool include_bias) {
  if (h.size() != g.n_nodes()) throw std::invalid_argument("layer_apply: length mismatch");
  NodeVector out(h.size());
  layer_apply(g, p, h.data(), out.data(), transpose, include_bias);
  return out;
}

NodeVector g_apply(const SparseGraph& g, const DgmrfParams& params, const NodeVector& x,
                   bool include_bias) {
  if (x.size() != g.n_nodes()) throw std::invalid_argument("g_apply: length mismatch");
  if (params.layers.empty()) throw std::invalid_argument("g_apply: model needs >= 1 layer");
  NodeVector h = x, next(x.size());
  for (const auto& layer : params.layers) {
    layer_apply(g, layer, h.data(), next.data(), false, include_bias);
    h.swap(next);
  }
  return h;
}

NodeVector g_transpose_apply(const SparseGraph& g, const DgmrfParams& params,
                             const NodeVector& x) {
  if (x.size() != g.n_nodes())
    throw std::invalid_argument("g_transpose_apply: length mismatch");
  NodeVector h = x, next(x.size());
  for (auto it = params.layers.rbegin(); it != params.layers.rend(); ++it) {
    layer_apply(g, *it, h.data(), next.data(), true, false);
    h.swap(next);
  }
  return h;
}

NodeVector bias_accumulation(const SparseGraph& g, const DgmrfParams& params) {
  return g_apply(g, params, NodeVector(g.n_nodes(), 0.0), true);
}

NodeVector precision_apply(const SparseGraph& g, const DgmrfParams& params,
                           const NodeVector& v) {
  return g_transpose_apply(g, params, g_apply(g, params, v, false));
}

NodeVector posterior_precision_apply(const SparseGraph& g, const DgmrfParams& params,
                                     const ObservationMask& mask, const NodeVector& v) {
  if (mask.size() != g.n_nodes())
    throw std::invalid_argument("posterior_precision_apply: mask length mismatch");
  NodeVector out = precision_apply(g, params, v);
  const double inv_s2 = std::exp(-2.0 * params.theta_sigma);
  for (std::size_t i = 0; i < out.size(); ++i)
    if (mask.is_observed(i)) out[i] += inv_s2 * v[i];
  return out;
}

LinearOperator precision_operator(const SparseGraph& g, const DgmrfParams& params) {
  const std::size_t n = g.n_nodes();
  return {n, [&g, params, n](const double* in, double* out) {
            NodeVector v(in, in + n);
            NodeVector r = precision_apply(g, params, v);
            std::copy(r.begin(), r.end(), out);
          }};
}

LinearOperator posterior_precision_operator(const SparseGraph& g, const DgmrfParams& params,
                                            const ObservationMask& mask) {
  const std::size_t n = g.n_nodes();
  return {n, [&g, params, &mask, n](const double* in, double* out) {
            NodeVector v(in, in + n);
            NodeVector r = posterior_precision_apply(g, params, mask, v);
            std::copy(r.begin(), r.end(), out);
          }};
}

}  // namespace dgmrf
