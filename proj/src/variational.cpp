#include "dgmrf/variational.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "dgmrf/autodiff.hpp"
#include "dgmrf/text_io.hpp"

namespace dgmrf {

NodeVector transform_q_noise(const SparseGraph& g, const VariationalParams& vp,
                             const NodeVector& r) {
  const std::size_t n = g.n_nodes();
  if (r.size() != n || vp.nu.size() != n || vp.log_xi.size() != n || vp.log_tau.size() != n)
    throw std::invalid_argument("transform_q_noise: length mismatch");
  NodeVector t(n), next(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = std::exp(vp.log_tau[i]) * r[i];
  for (const auto& layer : vp.vi_layers) {
    layer_apply(g, layer, t.data(), next.data(), false, false);
    t.swap(next);
  }
  for (std::size_t i = 0; i < n; ++i) t[i] = std::exp(vp.log_xi[i]) * t[i] + vp.nu[i];
  return t;
}

std::vector<NodeVector> sample_q(const SparseGraph& g, const VariationalParams& vp,
                                 std::size_t n_samples, Rng& rng) {
  std::vector<NodeVector> out;
  out.reserve(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s)
    out.push_back(transform_q_noise(g, vp, rng.normal_vector(g.n_nodes())));
  return out;
}

double q_entropy(const VariationalParams& vp, LogdetBackend backend,
                 const LogdetPreprocess& pre) {
  double s = total_logdet(vp.vi_layers, backend, pre);
  for (std::size_t i = 0; i < vp.log_xi.size(); ++i) s += vp.log_xi[i] + vp.log_tau[i];
  return s;
}

double dropped_elbo_constant(std::size_t n_nodes, std::size_t n_observed) {
  return 0.5 * static_cast<double>(n_nodes) -
         0.5 * static_cast<double>(n_observed) * std::log(2.0 * 3.14159265358979323846);
}

namespace {

void require_finite(double v, const char* term) {
  if (!std::isfinite(v))
    throw std::runtime_error(std::string("elbo_estimate: non-finite ") + term);
}

}  // namespace

ElboTerms elbo_estimate(const SparseGraph& g, const DgmrfParams& params,
                        const VariationalParams& vp, const NodeVector& y,
                        const ObservationMask& mask, LogdetBackend backend,
                        const LogdetPreprocess& pre, const std::vector<NodeVector>& noise) {
  const std::size_t n = g.n_nodes();
  if (y.size() != n || mask.size() != n)
    throw std::invalid_argument("elbo_estimate: length mismatch");
  if (noise.empty()) throw std::invalid_argument("elbo_estimate: need >= 1 MC sample");
  const double inv_s2 = std::exp(-2.0 * params.theta_sigma);

  ElboTerms out;
  out.sample_terms.reserve(noise.size());
  double acc = 0.0;
  for (const auto& r : noise) {
    const NodeVector x = transform_q_noise(g, vp, r);
    const NodeVector gx = g_apply(g, params, x, true);
    double quad1 = dot(gx, gx);
    double quad2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask.is_observed(i)) {
        const double d = y[i] - x[i];
        quad2 += d * d;
      }
    }
    const double term = -0.5 * (quad1 + inv_s2 * quad2);
    require_finite(term, "expected joint quadratic");
    out.sample_terms.push_back(term);
    acc += term;
  }
  out.expected_joint_quad = acc / static_cast<double>(noise.size());

  const double logdet_g = total_logdet(params.layers, backend, pre);
  require_finite(logdet_g, "log|det G|");
  const double noise_term =
      -static_cast<double>(mask.n_observed) * params.theta_sigma;  // -M log sigma
  const double entropy = q_entropy(vp, backend, pre);
  require_finite(entropy, "entropy");

  out.total = out.expected_joint_quad + logdet_g + noise_term + entropy;
  out.per_node = out.total / static_cast<double>(n);
  return out;
}

ElboTerms elbo_estimate(const SparseGraph& g, const DgmrfParams& params,
                        const VariationalParams& vp, const NodeVector& y,
                        const ObservationMask& mask, LogdetBackend backend,
                        const LogdetPreprocess& pre, std::size_t n_mc_samples, Rng& rng) {
  std::vector<NodeVector> noise;
  noise.reserve(n_mc_samples);
  for (std::size_t s = 0; s < n_mc_samples; ++s) noise.push_back(rng.normal_vector(g.n_nodes()));
  return elbo_estimate(g, params, vp, y, mask, backend, pre, noise);
}

NodeVector pack_params(const DgmrfParams& params, const VariationalParams& vp) {
  NodeVector flat;
  flat.reserve(4 * params.layers.size() + 1 + 3 * vp.nu.size() + 4 * vp.vi_layers.size());
  for (const auto& l : params.layers) {
    flat.push_back(l.theta1);
    flat.push_back(l.theta2);
    flat.push_back(l.theta3);
    flat.push_back(l.bias);
  }
  flat.push_back(params.theta_sigma);
  flat.insert(flat.end(), vp.nu.begin(), vp.nu.end());
  flat.insert(flat.end(), vp.log_xi.begin(), vp.log_xi.end());
  flat.insert(flat.end(), vp.log_tau.begin(), vp.log_tau.end());
  for (const auto& l : vp.vi_layers) {
    flat.push_back(l.theta1);
    flat.push_back(l.theta2);
    flat.push_back(l.theta3);
    flat.push_back(l.bias);
  }
  return flat;
}

void unpack_params(const NodeVector& flat, const ParamLayout& layout, DgmrfParams& params,
                   VariationalParams& vp) {
  if (flat.size() != layout.size())
    throw std::invalid_argument("unpack_params: flat vector does not match layout");
  std::size_t k = 0;
  params.layers.resize(layout.n_layers);
  for (auto& l : params.layers) {
    l.theta1 = flat[k++];
    l.theta2 = flat[k++];
    l.theta3 = flat[k++];
    l.bias = flat[k++];
  }
  params.theta_sigma = flat[k++];
  const std::size_t n = layout.n_nodes;
  vp.nu.assign(flat.begin() + k, flat.begin() + k + n);
  k += n;
  vp.log_xi.assign(flat.begin() + k, flat.begin() + k + n);
  k += n;
  vp.log_tau.assign(flat.begin() + k, flat.begin() + k + n);
  k += n;
  vp.vi_layers.resize(layout.n_vi_layers);
  for (auto& l : vp.vi_layers) {
    l.theta1 = flat[k++];
    l.theta2 = flat[k++];
    l.theta3 = flat[k++];
    l.bias = flat[k++];
  }
}

namespace {

// Scalar tape handles for one layer's free parameters and their reparam.
struct LayerVars {
  ad::Var t1, t2, t3, b;
  ad::Var alpha, beta, gamma;
};

LayerVars push_layer_vars(ad::Tape& tape, const LayerParams& p) {
  LayerVars v;
  v.t1 = tape.input(p.theta1);
  v.t2 = tape.input(p.theta2);
  v.t3 = tape.input(p.theta3);
  v.b = tape.input(p.bias);
  v.alpha = tape.exp(v.t1);
  v.beta = tape.mul(v.alpha, tape.tanh(v.t2));
  v.gamma = tape.sigmoid(v.t3);
  return v;
}

struct TapeInputs {
  std::vector<LayerVars> layers;
  ad::Var theta_sigma;
  ad::Var nu, log_xi, log_tau;
  std::vector<LayerVars> vi_layers;
};

TapeInputs push_inputs(ad::Tape& tape, const DgmrfParams& params,
                       const VariationalParams& vp) {
  TapeInputs in;
  for (const auto& l : params.layers) in.layers.push_back(push_layer_vars(tape, l));
  in.theta_sigma = tape.input(params.theta_sigma);
  in.nu = tape.input(vp.nu);
  in.log_xi = tape.input(vp.log_xi);
  in.log_tau = tape.input(vp.log_tau);
  for (const auto& l : vp.vi_layers) in.vi_layers.push_back(push_layer_vars(tape, l));
  return in;
}

// Accumulates d objective / d flat params from a tape that was built with
// push_inputs and already ran backward.
void accumulate_grads(const ad::Tape& tape, const TapeInputs& in, double weight,
                      NodeVector& grad, const ParamLayout& layout) {
  std::size_t k = 0;
  auto add_scalar = [&](ad::Var v) {
    const auto& g = tape.grad(v);
    grad[k++] += weight * (g.empty() ? 0.0 : g[0]);
  };
  auto add_vector = [&](ad::Var v) {
    const auto& g = tape.grad(v);
    if (g.empty()) {
      k += layout.n_nodes;
      return;
    }
    for (std::size_t i = 0; i < g.size(); ++i) grad[k + i] += weight * g[i];
    k += layout.n_nodes;
  };
  for (const auto& l : in.layers) {
    add_scalar(l.t1);
    add_scalar(l.t2);
    add_scalar(l.t3);
    add_scalar(l.b);
  }
  add_scalar(in.theta_sigma);
  add_vector(in.nu);
  add_vector(in.log_xi);
  add_vector(in.log_tau);
  for (const auto& l : in.vi_layers) {
    add_scalar(l.t1);
    add_scalar(l.t2);
    add_scalar(l.t3);
    add_scalar(l.b);
  }
}

}  // namespace

ElboWithGradient elbo_with_gradient(const SparseGraph& g, const DgmrfParams& params,
                                    const VariationalParams& vp, const NodeVector& y,
                                    const ObservationMask& mask, LogdetBackend backend,
                                    const LogdetPreprocess& pre,
                                    const std::vector<NodeVector>& noise) {
  const std::size_t n = g.n_nodes();
  if (noise.empty()) throw std::invalid_argument("elbo_with_gradient: need >= 1 MC sample");
  const ParamLayout layout{params.layers.size(), vp.vi_layers.size(), n};

  ElboWithGradient out;
  out.grad.assign(layout.size(), 0.0);
  out.terms.sample_terms.reserve(noise.size());

  NodeVector mask_vec(n);
  for (std::size_t i = 0; i < n; ++i) mask_vec[i] = mask.is_observed(i) ? 1.0 : 0.0;

  // Expectation term, one tape per MC sample, each weighted 1/S.
  const double w = 1.0 / static_cast<double>(noise.size());
  ad::Tape tape;
  double acc = 0.0;
  for (const auto& r : noise) {
    tape.clear();
    TapeInputs in = push_inputs(tape, params, vp);
    const ad::Var r_const = tape.constant(r);
    const ad::Var y_const = tape.constant(y);
    const ad::Var m_const = tape.constant(mask_vec);
    const ad::Var zero_bias = tape.constant(0.0);

    ad::Var t = tape.mul(tape.exp(in.log_tau), r_const);
    for (const auto& l : in.vi_layers)
      t = tape.layer(g, t, l.alpha, l.beta, l.gamma, zero_bias, false, false);
    ad::Var x = tape.add(tape.mul(tape.exp(in.log_xi), t), in.nu);

    ad::Var h = x;
    for (const auto& l : in.layers)
      h = tape.layer(g, h, l.alpha, l.beta, l.gamma, l.b, false, true);
    const ad::Var quad1 = tape.dot(h, h);

    const ad::Var resid = tape.sub(y_const, x);
    const ad::Var quad2 = tape.dot(tape.mul(m_const, resid), resid);
    const ad::Var inv_s2 = tape.exp(tape.scale(in.theta_sigma, -2.0));
    const ad::Var term = tape.scale(tape.add(quad1, tape.smul(inv_s2, quad2)), -0.5);

    const double term_val = tape.scalar(term);
    if (!std::isfinite(term_val))
      throw std::runtime_error("elbo_with_gradient: non-finite expected joint quadratic");
    out.terms.sample_terms.push_back(term_val);
    acc += term_val;

    tape.backward(term);
    accumulate_grads(tape, in, w, out.grad, layout);
  }
  out.terms.expected_joint_quad = acc * w;

  // Deterministic terms: log|det G| - M log sigma + entropy of q.
  tape.clear();
  TapeInputs in = push_inputs(tape, params, vp);
  auto layer_logdet = [&](const LayerVars& l) {
    if (backend == LogdetBackend::eigen) {
      if (!pre.eig) throw std::invalid_argument("elbo_with_gradient: eigen pre-process missing");
      return tape.logdet_layer(*pre.eig, l.alpha, l.beta, l.gamma);
    }
    if (!pre.traces) throw std::invalid_argument("elbo_with_gradient: trace pre-process missing");
    return tape.logdet_layer(*pre.traces, l.alpha, l.beta, l.gamma);
  };

  ad::Var det_terms = tape.constant(0.0);
  for (const auto& l : in.layers) det_terms = tape.add(det_terms, layer_logdet(l));
  det_terms =
      tape.add(det_terms, tape.scale(in.theta_sigma, -static_cast<double>(mask.n_observed)));
  for (const auto& l : in.vi_layers) det_terms = tape.add(det_terms, layer_logdet(l));
  det_terms = tape.add(det_terms, tape.sum(in.log_xi));
  det_terms = tape.add(det_terms, tape.sum(in.log_tau));

  const double det_val = tape.scalar(det_terms);
  if (!std::isfinite(det_val))
    throw std::runtime_error("elbo_with_gradient: non-finite log-determinant terms");
  tape.backward(det_terms);
  accumulate_grads(tape, in, 1.0, out.grad, layout);

  out.terms.total = out.terms.expected_joint_quad + det_val;
  out.terms.per_node = out.terms.total / static_cast<double>(n);
  return out;
}

void save_checkpoint(const Checkpoint& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  out << "dgmrf-checkpoint v1\n";
  out << "n " << c.n_nodes << '\n';
  out << "graph_hash " << c.graph_hash << '\n';
  out << "seed " << c.seed << '\n';
  out << "L " << c.params.layers.size() << '\n';
  out << "L_q " << c.vp.vi_layers.size() << '\n';
  auto put = [&out](const std::string& key, double v) {
    out << key << " = " << format_double(v) << '\n';
  };
  for (std::size_t l = 0; l < c.params.layers.size(); ++l) {
    const auto& p = c.params.layers[l];
    const std::string tag = "layer" + std::to_string(l);
    put(tag + ".theta1", p.theta1);
    put(tag + ".theta2", p.theta2);
    put(tag + ".theta3", p.theta3);
    put(tag + ".bias", p.bias);
  }
  put("theta_sigma", c.params.theta_sigma);
  for (std::size_t l = 0; l < c.vp.vi_layers.size(); ++l) {
    const auto& p = c.vp.vi_layers[l];
    const std::string tag = "vi_layer" + std::to_string(l);
    put(tag + ".theta1", p.theta1);
    put(tag + ".theta2", p.theta2);
    put(tag + ".theta3", p.theta3);
    put(tag + ".bias", p.bias);
  }
  auto put_vec = [&out](const std::string& key, const NodeVector& v) {
    out << key << " =";
    for (double x : v) out << ' ' << format_double(x);
    out << '\n';
  };
  put_vec("nu", c.vp.nu);
  put_vec("log_xi", c.vp.log_xi);
  put_vec("log_tau", c.vp.log_tau);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line != "dgmrf-checkpoint v1")
    throw std::runtime_error("load_checkpoint: unexpected header in " + path);
  Checkpoint c;
  std::string key, eq;
  std::size_t n_layers = 0, n_vi = 0;
  in >> key >> c.n_nodes;
  in >> key >> c.graph_hash;
  in >> key >> c.seed;
  in >> key >> n_layers;
  in >> key >> n_vi;
  c.params.layers.resize(n_layers);
  c.vp.vi_layers.resize(n_vi);
  auto get = [&in, &path]() {
    std::string k2, e2, v2;
    if (!(in >> k2 >> e2 >> v2)) throw std::runtime_error("load_checkpoint: truncated " + path);
    return parse_double(v2);
  };
  for (auto& p : c.params.layers) {
    p.theta1 = get();
    p.theta2 = get();
    p.theta3 = get();
    p.bias = get();
  }
  c.params.theta_sigma = get();
  for (auto& p : c.vp.vi_layers) {
    p.theta1 = get();
    p.theta2 = get();
    p.theta3 = get();
    p.bias = get();
  }
  auto get_vec = [&in, &path](std::size_t n) {
    std::string k2, e2;
    in >> k2 >> e2;
    NodeVector v(n);
    for (auto& x : v)
      if (!read_double(in, x)) throw std::runtime_error("load_checkpoint: truncated " + path);
    return v;
  };
  c.vp.nu = get_vec(c.n_nodes);
  c.vp.log_xi = get_vec(c.n_nodes);
  c.vp.log_tau = get_vec(c.n_nodes);
  return c;
}

}  // namespace dgmrf
