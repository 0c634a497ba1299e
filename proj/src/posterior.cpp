#include "dgmrf/posterior.hpp"

#include <cmath>
#include <stdexcept>

namespace dgmrf {

GmrfModel dgmrf_gmrf_model(const SparseGraph& g, const DgmrfParams& params) {
  GmrfModel m;
  m.n = g.n_nodes();
  m.precision = precision_operator(g, params);
  NodeVector b_acc = bias_accumulation(g, params);
  m.q_mu = g_transpose_apply(g, params, b_acc);
  scale(m.q_mu, -1.0);
  m.precision_factor_noise = [&g, params](Rng& rng) {
    return g_transpose_apply(g, params, rng.normal_vector(g.n_nodes()));
  };
  return m;
}

namespace {

LinearOperator posterior_operator(const GmrfModel& model, const ObservationMask& mask,
                                  double sigma) {
  const double inv_s2 = 1.0 / (sigma * sigma);
  return {model.n, [&model, &mask, inv_s2](const double* in, double* out) {
            model.precision.apply(in, out);
            for (std::size_t i = 0; i < model.n; ++i)
              if (mask.is_observed(i)) out[i] += inv_s2 * in[i];
          }};
}

NodeVector data_rhs(const GmrfModel& model, const NodeVector& y, const ObservationMask& mask,
                    double sigma) {
  const double inv_s2 = 1.0 / (sigma * sigma);
  NodeVector rhs = model.q_mu;
  for (std::size_t i = 0; i < model.n; ++i)
    if (mask.is_observed(i)) rhs[i] += inv_s2 * y[i];
  return rhs;
}

}  // namespace

NodeVector posterior_mean(const GmrfModel& model, const NodeVector& y,
                          const ObservationMask& mask, double sigma, const CgConfig& cg,
                          CgReport* report) {
  if (y.size() != model.n || mask.size() != model.n)
    throw std::invalid_argument("posterior_mean: length mismatch");
  const LinearOperator op = posterior_operator(model, mask, sigma);
  auto [x, rep] = conjugate_gradient(op, data_rhs(model, y, mask, sigma), cg);
  if (report) *report = rep;
  return x;
}

NodeVector posterior_sample(const GmrfModel& model, const NodeVector& y,
                            const ObservationMask& mask, double sigma, Rng& rng,
                            const CgConfig& cg, const std::optional<NodeVector>& warm_start,
                            CgReport* report) {
  if (y.size() != model.n || mask.size() != model.n)
    throw std::invalid_argument("posterior_sample: length mismatch");
  NodeVector rhs = model.precision_factor_noise(rng);
  const NodeVector base = data_rhs(model, y, mask, sigma);
  const double inv_s = 1.0 / sigma;
  for (std::size_t i = 0; i < model.n; ++i) {
    rhs[i] += base[i];
    if (mask.is_observed(i)) rhs[i] += inv_s * rng.normal();
  }
  const LinearOperator op = posterior_operator(model, mask, sigma);
  auto [x, rep] = conjugate_gradient(op, rhs, cg, warm_start);
  if (report) *report = rep;
  return x;
}

NodeVector marginal_variances(const GmrfModel& model, const NodeVector& y,
                              const ObservationMask& mask, double sigma,
                              std::size_t n_samples, std::uint64_t seed, const CgConfig& cg,
                              PosteriorSummary* summary) {
  if (n_samples < 2) throw std::invalid_argument("marginal_variances: need >= 2 samples");
  CgReport mean_report;
  const NodeVector mu = posterior_mean(model, y, mask, sigma, cg, &mean_report);

  // Welford over samples, each CG warm-started at the posterior mean.
  NodeVector mean(model.n, 0.0), m2(model.n, 0.0);
  const Rng base(seed);
  bool all_converged = mean_report.converged;
  std::vector<CgReport> reports{mean_report};
  for (std::size_t s = 0; s < n_samples; ++s) {
    Rng rng = base.substream("posterior_sample", s);
    CgReport rep;
    const NodeVector x = posterior_sample(model, y, mask, sigma, rng, cg, mu, &rep);
    all_converged = all_converged && rep.converged;
    reports.push_back(rep);
    for (std::size_t i = 0; i < model.n; ++i) {
      const double delta = x[i] - mean[i];
      mean[i] += delta / static_cast<double>(s + 1);
      m2[i] += delta * (x[i] - mean[i]);
    }
  }
  NodeVector var(model.n);
  for (std::size_t i = 0; i < model.n; ++i)
    var[i] = m2[i] / static_cast<double>(n_samples - 1);

  if (summary) {
    summary->mean = mu;
    summary->marginal_std.resize(model.n);
    for (std::size_t i = 0; i < model.n; ++i) summary->marginal_std[i] = std::sqrt(var[i]);
    summary->n_samples_used = n_samples;
    summary->cg_reports = std::move(reports);
    summary->all_converged = all_converged;
  }
  return var;
}

PosteriorSummary infer_posterior(const GmrfModel& model, const NodeVector& y,
                                 const ObservationMask& mask, double sigma,
                                 std::size_t n_samples, std::uint64_t seed,
                                 const CgConfig& cg) {
  PosteriorSummary summary;
  marginal_variances(model, y, mask, sigma, n_samples, seed, cg, &summary);
  return summary;
}

NodeVector posterior_mean(const SparseGraph& g, const DgmrfParams& params, const NodeVector& y,
                          const ObservationMask& mask, const CgConfig& cg, CgReport* report) {
  return posterior_mean(dgmrf_gmrf_model(g, params), y, mask, params.sigma(), cg, report);
}

NodeVector posterior_sample(const SparseGraph& g, const DgmrfParams& params,
                            const NodeVector& y, const ObservationMask& mask, Rng& rng,
                            const CgConfig& cg) {
  return posterior_sample(dgmrf_gmrf_model(g, params), y, mask, params.sigma(), rng, cg);
}

PosteriorSummary infer_posterior(const SparseGraph& g, const DgmrfParams& params,
                                 const NodeVector& y, const ObservationMask& mask,
                                 std::size_t n_samples, std::uint64_t seed,
                                 const CgConfig& cg) {
  return infer_posterior(dgmrf_gmrf_model(g, params), y, mask, params.sigma(), n_samples, seed,
                         cg);
}

}  // namespace dgmrf
