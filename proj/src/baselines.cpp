#include "dgmrf/baselines.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dgmrf/dense.hpp"

namespace dgmrf {

NodeVector label_propagation(const SparseGraph& g, const NodeVector& y,
                             const ObservationMask& mask, const CgConfig& cg,
                             CgReport* report) {
  const std::size_t n = g.n_nodes();
  if (y.size() != n || mask.size() != n)
    throw std::invalid_argument("label_propagation: length mismatch");
  if (mask.n_observed == 0) throw std::invalid_argument("label_propagation: no observed nodes");

  std::vector<index_t> unobs;
  std::vector<std::size_t> slot(n, SIZE_MAX);
  for (index_t i = 0; i < n; ++i) {
    if (!mask.is_observed(i)) {
      slot[i] = unobs.size();
      unobs.push_back(i);
    }
  }
  NodeVector out = y;
  if (unobs.empty()) return out;

  // Laplacian restricted to unobserved rows/columns; observed neighbors
  // contribute to the right-hand side.
  const std::size_t m = unobs.size();
  NodeVector rhs(m, 0.0);
  for (std::size_t u = 0; u < m; ++u) {
    const index_t i = unobs[u];
    const auto nbrs = g.neighbors(i);
    const auto ws = g.neighbor_weights(i);
    for (std::size_t k = 0; k < nbrs.size(); ++k)
      if (mask.is_observed(nbrs[k])) rhs[u] += ws[k] * y[nbrs[k]];
  }
  const LinearOperator op{
      m, [&g, &mask, &unobs, &slot](const double* in, double* outv) {
        for (std::size_t u = 0; u < unobs.size(); ++u) {
          const index_t i = unobs[u];
          double s = g.degrees()[i] * in[u];
          const auto nbrs = g.neighbors(i);
          const auto ws = g.neighbor_weights(i);
          for (std::size_t k = 0; k < nbrs.size(); ++k)
            if (!mask.is_observed(nbrs[k])) s -= ws[k] * in[slot[nbrs[k]]];
          outv[u] = s;
        }
      }};
  auto [v, rep] = conjugate_gradient(op, rhs, cg);
  if (report) *report = rep;
  for (std::size_t u = 0; u < m; ++u) out[unobs[u]] = v[u];
  return out;
}

GmrfModel igmrf_gmrf_model(const SparseGraph& g, const IgmrfModel& model) {
  GmrfModel m;
  m.n = g.n_nodes();
  const double kappa = model.kappa, eps = model.epsilon;
  m.precision = {m.n, [&g, kappa, eps](const double* in, double* out) {
                   g.adjacency_apply(in, out);
                   const auto& deg = g.degrees();
                   for (std::size_t i = 0; i < g.n_nodes(); ++i)
                     out[i] = kappa * (deg[i] * in[i] - out[i]) + eps * in[i];
                 }};
  m.q_mu.assign(m.n, 0.0);
  // Covariance-Q noise via the scaled incidence factor:
  // w = sqrt(kappa) B^T z_e + sqrt(eps) z_n, cov(w) = kappa(D - A) + eps I.
  m.precision_factor_noise = [&g, kappa, eps](Rng& rng) {
    const std::size_t n = g.n_nodes();
    NodeVector w(n);
    const double se = std::sqrt(eps);
    for (std::size_t i = 0; i < n; ++i) w[i] = se * rng.normal();
    const double sk = std::sqrt(kappa);
    for (index_t i = 0; i < n; ++i) {
      const auto nbrs = g.neighbors(i);
      const auto ws = g.neighbor_weights(i);
      for (std::size_t k = 0; k < nbrs.size(); ++k) {
        const index_t j = nbrs[k];
        if (j <= i) continue;  // each undirected edge once
        const double z = sk * std::sqrt(ws[k]) * rng.normal();
        w[i] += z;
        w[j] -= z;
      }
    }
    return w;
  };
  return m;
}

namespace {

// Densified Q = kappa(D - A) + eps I.
DenseMatrix dense_igmrf_precision(const SparseGraph& g, const IgmrfModel& model) {
  const std::size_t n = g.n_nodes();
  DenseMatrix q(n, n);
  for (index_t i = 0; i < n; ++i) {
    q(i, i) = model.kappa * g.degrees()[i] + model.epsilon;
    const auto nbrs = g.neighbors(i);
    const auto ws = g.neighbor_weights(i);
    for (std::size_t k = 0; k < nbrs.size(); ++k) q(i, nbrs[k]) = -model.kappa * ws[k];
  }
  return q;
}

}  // namespace

double igmrf_log_marginal_likelihood(const SparseGraph& g, const IgmrfModel& model,
                                     const NodeVector& y, const ObservationMask& mask,
                                     const NodeVector& x_prime) {
  const std::size_t n = g.n_nodes();
  if (y.size() != n || mask.size() != n)
    throw std::invalid_argument("igmrf_log_marginal_likelihood: length mismatch");
  const double inv_s2 = 1.0 / (model.sigma * model.sigma);
  const double log2pi = std::log(2.0 * 3.14159265358979323846);

  DenseMatrix q = dense_igmrf_precision(g, model);
  DenseMatrix qt = q;
  for (std::size_t i = 0; i < n; ++i)
    if (mask.is_observed(i)) qt(i, i) += inv_s2;

  if (!cholesky_in_place(q))
    throw std::runtime_error("igmrf: prior precision not positive definite (epsilon too small?)");
  if (!cholesky_in_place(qt))
    throw std::runtime_error("igmrf: posterior precision not positive definite");
  const double logdet_q = cholesky_logdet(q);
  const double logdet_qt = cholesky_logdet(qt);

  NodeVector rhs(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (mask.is_observed(i)) rhs[i] = inv_s2 * y[i];
  const NodeVector mu_post = cholesky_solve(qt, rhs);
  const NodeVector& x = x_prime.empty() ? mu_post : x_prime;
  if (x.size() != n)
    throw std::invalid_argument("igmrf_log_marginal_likelihood: x_prime length mismatch");

  const GmrfModel gm = igmrf_gmrf_model(g, model);
  const NodeVector qx = gm.precision(x);
  const double log_prior = 0.5 * logdet_q - 0.5 * static_cast<double>(n) * log2pi -
                           0.5 * dot(x, qx);

  double quad_obs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask.is_observed(i)) {
      const double d = y[i] - x[i];
      quad_obs += d * d;
    }
  }
  const double M = static_cast<double>(mask.n_observed);
  const double log_lik =
      -0.5 * inv_s2 * quad_obs - M * std::log(model.sigma) - 0.5 * M * log2pi;

  NodeVector diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = x[i] - mu_post[i];
  NodeVector qt_diff(n, 0.0);
  {
    // Recompute Q~ diff sparsely: Q diff + inv_s2 masked diff.
    qt_diff = gm.precision(diff);
    for (std::size_t i = 0; i < n; ++i)
      if (mask.is_observed(i)) qt_diff[i] += inv_s2 * diff[i];
  }
  const double log_post = 0.5 * logdet_qt - 0.5 * static_cast<double>(n) * log2pi -
                          0.5 * dot(diff, qt_diff);

  return log_lik + log_prior - log_post;
}

IgmrfModel igmrf_fit(const SparseGraph& g, const NodeVector& y, const ObservationMask& mask,
                     const IgmrfGridConfig& grid) {
  if (grid.sigmas.empty() || grid.n_kappa == 0)
    throw std::invalid_argument("igmrf_fit: empty grid");
  std::vector<double> kappas(grid.n_kappa);
  if (grid.n_kappa == 1) {
    kappas[0] = grid.kappa_min;
  } else {
    const double lmin = std::log10(grid.kappa_min), lmax = std::log10(grid.kappa_max);
    for (std::size_t i = 0; i < grid.n_kappa; ++i)
      kappas[i] = std::pow(10.0, lmin + (lmax - lmin) * static_cast<double>(i) /
                                      static_cast<double>(grid.n_kappa - 1));
  }

  IgmrfModel best;
  double best_lml = -std::numeric_limits<double>::infinity();
  for (double kappa : kappas) {
    for (double sigma : grid.sigmas) {
      const IgmrfModel candidate{kappa, sigma, grid.epsilon};
      const double lml = igmrf_log_marginal_likelihood(g, candidate, y, mask);
      if (lml > best_lml) {
        best_lml = lml;
        best = candidate;
      }
    }
  }
  return best;
}

PosteriorSummary igmrf_posterior(const IgmrfModel& model, const SparseGraph& g,
                                 const NodeVector& y, const ObservationMask& mask,
                                 std::size_t n_samples, std::uint64_t seed,
                                 const CgConfig& cg) {
  return infer_posterior(igmrf_gmrf_model(g, model), y, mask, model.sigma, n_samples, seed, cg);
}

}  // namespace dgmrf
