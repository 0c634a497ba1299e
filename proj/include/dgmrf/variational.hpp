#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dgmrf/graph.hpp"
#include "dgmrf/logdet.hpp"
#include "dgmrf/model.hpp"
#include "dgmrf/rng.hpp"
#include "dgmrf/types.hpp"

namespace dgmrf {

/// Parameters of the variational distribution q = N(nu, SS^T) with
/// S = diag(xi) Gtilde diag(tau). No vi_layers means mean field.
struct VariationalParams {
  NodeVector nu;
  NodeVector log_xi;
  NodeVector log_tau;
  std::vector<LayerParams> vi_layers;

  std::size_t n_vi_layers() const { return vi_layers.size(); }
};

/// x = diag(xi) Gtilde diag(tau) r + nu for the given standard-normal r.
NodeVector transform_q_noise(const SparseGraph& g, const VariationalParams& vp,
                             const NodeVector& r);

/// n_samples reparametrized draws from q.
std::vector<NodeVector> sample_q(const SparseGraph& g, const VariationalParams& vp,
                                 std::size_t n_samples, Rng& rng);

/// Entropy of q up to an additive constant:
/// logdet|Gtilde| + sum_i (log xi_i + log tau_i).
double q_entropy(const VariationalParams& vp, LogdetBackend backend,
                 const LogdetPreprocess& pre);

struct ElboTerms {
  double total = 0.0;     // additive constants dropped
  double per_node = 0.0;  // total / n
  double expected_joint_quad = 0.0;  // MC mean of the quadratic terms
  std::vector<double> sample_terms;  // per-sample quadratic terms, for MC SEs
};

/// The additive constant dropped from the reported ELBO: add this back to
/// compare against an exactly computed log marginal likelihood.
double dropped_elbo_constant(std::size_t n_nodes, std::size_t n_observed);

/// MC estimate of the ELBO for frozen noise vectors (one standard-normal
/// vector per sample). Throws if any term turns non-finite.
ElboTerms elbo_estimate(const SparseGraph& g, const DgmrfParams& params,
                        const VariationalParams& vp, const NodeVector& y,
                        const ObservationMask& mask, LogdetBackend backend,
                        const LogdetPreprocess& pre, const std::vector<NodeVector>& noise);

/// As elbo_estimate, drawing fresh noise from the rng.
ElboTerms elbo_estimate(const SparseGraph& g, const DgmrfParams& params,
                        const VariationalParams& vp, const NodeVector& y,
                        const ObservationMask& mask, LogdetBackend backend,
                        const LogdetPreprocess& pre, std::size_t n_mc_samples, Rng& rng);

/// Flat parameter vector layout: [per layer theta1..3,b] theta_sigma nu
/// log_xi log_tau [per VI layer theta1..3,b].
struct ParamLayout {
  std::size_t n_layers = 0;
  std::size_t n_vi_layers = 0;
  std::size_t n_nodes = 0;

  std::size_t size() const { return 4 * n_layers + 1 + 3 * n_nodes + 4 * n_vi_layers; }
};

NodeVector pack_params(const DgmrfParams& params, const VariationalParams& vp);
void unpack_params(const NodeVector& flat, const ParamLayout& layout, DgmrfParams& params,
                   VariationalParams& vp);

struct ElboWithGradient {
  ElboTerms terms;
  NodeVector grad;  // d total / d flat params
};

/// Reverse-mode gradient of the MC ELBO with frozen noise, over all free
/// parameters in flat layout.
ElboWithGradient elbo_with_gradient(const SparseGraph& g, const DgmrfParams& params,
                                    const VariationalParams& vp, const NodeVector& y,
                                    const ObservationMask& mask, LogdetBackend backend,
                                    const LogdetPreprocess& pre,
                                    const std::vector<NodeVector>& noise);

// Checkpoints carry model + variational parameters and enough header to
// validate what they belong to.
struct Checkpoint {
  std::size_t n_nodes = 0;
  std::uint64_t graph_hash = 0;
  std::uint64_t seed = 0;
  DgmrfParams params;
  VariationalParams vp;
};

void save_checkpoint(const Checkpoint& c, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace dgmrf
