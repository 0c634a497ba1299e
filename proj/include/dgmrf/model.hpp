#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dgmrf/cg.hpp"
#include "dgmrf/graph.hpp"
#include "dgmrf/types.hpp"

namespace dgmrf {

/// Free (unconstrained) parameters of one affine graph layer.
struct LayerParams {
  double theta1 = 0.0;  // alpha = exp(theta1)
  double theta2 = 0.0;  // beta  = alpha * tanh(theta2)
  double theta3 = 0.0;  // gamma = sigmoid(theta3)
  double bias = 0.0;
};

struct Reparam {
  double alpha, beta, gamma;
};

/// alpha > 0, |beta| < alpha, gamma in (0,1); total and differentiable.
Reparam reparametrize(const LayerParams& p);

/// Layer parameters realizing given (alpha, beta, gamma) up to sigmoid
/// saturation at gamma in {0,1} (theta3 = -/+ 30).
LayerParams layer_params_for(double alpha, double beta, double gamma, double bias = 0.0);

/// Full model: L layers plus the observation noise parameter.
struct DgmrfParams {
  std::vector<LayerParams> layers;
  double theta_sigma = 0.0;  // sigma = exp(theta_sigma)

  std::size_t n_layers() const { return layers.size(); }
  double sigma() const;
};

/// out = G_l h (+ bias*1), with G_l = alpha D^gamma + beta D^{gamma-1} A.
/// transpose applies G_l^T = alpha D^gamma + beta A D^{gamma-1}; the bias is
/// never added in transpose mode. One sparse pass.
void layer_apply(const SparseGraph& g, const LayerParams& p, const double* h, double* out,
                 bool transpose = false, bool include_bias = true);
NodeVector layer_apply(const SparseGraph& g, const LayerParams& p, const NodeVector& h,
                       bool transpose = false, bool include_bias = true);

/// z = G_L(...(G_1 x + b_1 1)...) + b_L 1.
NodeVector g_apply(const SparseGraph& g, const DgmrfParams& params, const NodeVector& x,
                   bool include_bias = true);
/// G^T x, composing the layer transposes in reverse order, no biases.
NodeVector g_transpose_apply(const SparseGraph& g, const DgmrfParams& params,
                             const NodeVector& x);

/// Offset vector of the composed affine map: b_acc = g(0). The prior mean is
/// mu = -G^{-1} b_acc and Q mu = -G^T b_acc.
NodeVector bias_accumulation(const SparseGraph& g, const DgmrfParams& params);

/// Q v = G^T G v (biases excluded).
NodeVector precision_apply(const SparseGraph& g, const DgmrfParams& params, const NodeVector& v);
/// Q~ v = Q v + sigma^{-2} I_m v.
NodeVector posterior_precision_apply(const SparseGraph& g, const DgmrfParams& params,
                                     const ObservationMask& mask, const NodeVector& v);

LinearOperator precision_operator(const SparseGraph& g, const DgmrfParams& params);
LinearOperator posterior_precision_operator(const SparseGraph& g, const DgmrfParams& params,
                                            const ObservationMask& mask);

}  // namespace dgmrf
