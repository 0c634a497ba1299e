#include "dgmrf/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace dgmrf::ad {

namespace {

void check_same_length(const NodeVector& a, const NodeVector& b, const char* op) {
  if (a.size() != b.size())
    throw std::invalid_argument(std::string(op) + ": operand lengths differ");
}

}  // namespace

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return {static_cast<int>(nodes_.size()) - 1};
}

Var Tape::input(NodeVector value) {
  Node n;
  n.requires_grad = true;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::constant(NodeVector value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

const NodeVector& Tape::value(Var v) const { return nodes_.at(v.id).value; }

double Tape::scalar(Var v) const {
  const auto& val = value(v);
  if (val.size() != 1) throw std::invalid_argument("Tape::scalar: node is not a scalar");
  return val[0];
}

const NodeVector& Tape::grad(Var v) const { return nodes_.at(v.id).grad; }

double Tape::scalar_grad(Var v) const {
  const auto& g = grad(v);
  return g.empty() ? 0.0 : g[0];
}

void Tape::clear() { nodes_.clear(); }

NodeVector& Tape::grad_buffer(int id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad.assign(n.value.size(), 0.0);
  return n.grad;
}

Var Tape::add(Var a, Var b) {
  const auto& va = nodes_[a.id].value;
  const auto& vb = nodes_[b.id].value;
  check_same_length(va, vb, "add");
  Node n;
  n.op = Op::add;
  n.a = a.id;
  n.b = b.id;
  n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
  n.value.resize(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) n.value[i] = va[i] + vb[i];
  return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
  const auto& va = nodes_[a.id].value;
  const auto& vb = nodes_[b.id].value;
  check_same_length(va, vb, "sub");
  Node n;
  n.op = Op::sub;
  n.a = a.id;
  n.b = b.id;
  n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
  n.value.resize(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) n.value[i] = va[i] - vb[i];
  return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
  const auto& va = nodes_[a.id].value;
  const auto& vb = nodes_[b.id].value;
  check_same_length(va, vb, "mul");
  Node n;
  n.op = Op::mul;
  n.a = a.id;
  n.b = b.id;
  n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
  n.value.resize(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) n.value[i] = va[i] * vb[i];
  return push(std::move(n));
}

Var Tape::smul(Var s, Var v) {
  const auto& vs = nodes_[s.id].value;
  if (vs.size() != 1) throw std::invalid_argument("smul: first operand must be scalar");
  const auto& vv = nodes_[v.id].value;
  Node n;
  n.op = Op::smul;
  n.a = s.id;
  n.b = v.id;
  n.requires_grad = nodes_[s.id].requires_grad || nodes_[v.id].requires_grad;
  n.value.resize(vv.size());
  for (std::size_t i = 0; i < vv.size(); ++i) n.value[i] = vs[0] * vv[i];
  return push(std::move(n));
}

Var Tape::scale(Var a, double c) {
  const auto& va = nodes_[a.id].value;
  Node n;
  n.op = Op::scale;
  n.a = a.id;
  n.c = c;
  n.requires_grad = nodes_[a.id].requires_grad;
  n.value.resize(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) n.value[i] = c * va[i];
  return push(std::move(n));
}

Var Tape::exp(Var a) {
  const auto& va = nodes_[a.id].value;
  Node n;
  n.op = Op::vexp;
  n.a = a.id;
  n.requires_grad = nodes_[a.id].requires_grad;
  n.value.resize(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) n.value[i] = std::exp(va[i]);
  return push(std::move(n));
}

Var Tape::log(Var a) {
  const auto& va = nodes_[a.id].value;
  Node n;
  n.op = Op::vlog;
  n.a = a.id;
  n.requires_grad = nodes_[a.id].requires_grad;
  n.value.resize(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) n.value[i] = std::log(va[i]);
  return push(std::move(n));
}

Var Tape::tanh(Var a) {
  const auto& va = nodes_[a.id].value;
  Node n;
  n.op = Op::vtanh;
  n.a = a.id;
  n.requires_grad = nodes_[a.id].requires_grad;
  n.value.resize(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) n.value[i] = std::tanh(va[i]);
  return push(std::move(n));
}

Var Tape::sigmoid(Var a) {
  const auto& va = nodes_[a.id].value;
  Node n;
  n.op = Op::vsigmoid;
  n.a = a.id;
  n.requires_grad = nodes_[a.id].requires_grad;
  n.value.resize(va.size());
  for (std::size_t i = 0; i < va.size(); ++i) n.value[i] = 1.0 / (1.0 + std::exp(-va[i]));
  return push(std::move(n));
}

Var Tape::sum(Var a) {
  const auto& va = nodes_[a.id].value;
  Node n;
  n.op = Op::sum;
  n.a = a.id;
  n.requires_grad = nodes_[a.id].requires_grad;
  double s = 0.0;
  for (double v : va) s += v;
  n.value = {s};
  return push(std::move(n));
}

Var Tape::dot(Var a, Var b) {
  const auto& va = nodes_[a.id].value;
  const auto& vb = nodes_[b.id].value;
  check_same_length(va, vb, "dot");
  Node n;
  n.op = Op::dot;
  n.a = a.id;
  n.b = b.id;
  n.requires_grad = nodes_[a.id].requires_grad || nodes_[b.id].requires_grad;
  n.value = {dgmrf::dot(va, vb)};
  return push(std::move(n));
}

Var Tape::layer(const SparseGraph& g, Var h, Var alpha, Var beta, Var gamma, Var bias,
                bool transpose, bool include_bias) {
  const auto& vh = nodes_[h.id].value;
  if (vh.size() != g.n_nodes()) throw std::invalid_argument("layer: length mismatch");
  const double a = nodes_[alpha.id].value.at(0);
  const double b = nodes_[beta.id].value.at(0);
  const double gm = nodes_[gamma.id].value.at(0);
  const double bs = nodes_[bias.id].value.at(0);

  Node n;
  n.op = Op::layer;
  n.a = h.id;
  n.alpha = alpha.id;
  n.beta = beta.id;
  n.gamma = gamma.id;
  n.bias = bias.id;
  n.graph = &g;
  n.transpose = transpose;
  n.include_bias = include_bias;
  n.requires_grad = nodes_[h.id].requires_grad || nodes_[alpha.id].requires_grad ||
                    nodes_[beta.id].requires_grad || nodes_[gamma.id].requires_grad ||
                    nodes_[bias.id].requires_grad;
  n.value.resize(vh.size());

  const auto& deg = g.degrees();
  const auto& logdeg = g.log_degrees();
  const std::size_t nn = g.n_nodes();
  if (!transpose) {
    const double boff = include_bias ? bs : 0.0;
    NodeVector ah(nn);
    g.adjacency_apply(vh.data(), ah.data());
    for (std::size_t i = 0; i < nn; ++i) {
      const double dg = std::exp(gm * logdeg[i]);
      n.value[i] = a * dg * vh[i] + b * (dg / deg[i]) * ah[i] + boff;
    }
  } else {
    NodeVector t(nn);
    for (std::size_t i = 0; i < nn; ++i) t[i] = std::exp((gm - 1.0) * logdeg[i]) * vh[i];
    NodeVector at(nn);
    g.adjacency_apply(t.data(), at.data());
    for (std::size_t i = 0; i < nn; ++i)
      n.value[i] = a * std::exp(gm * logdeg[i]) * vh[i] + b * at[i];
  }
  return push(std::move(n));
}

Var Tape::logdet_layer(const EigPreprocess& pre, Var alpha, Var beta, Var gamma) {
  Node n;
  n.op = Op::logdet_eig;
  n.alpha = alpha.id;
  n.beta = beta.id;
  n.gamma = gamma.id;
  n.eig = &pre;
  n.requires_grad = nodes_[alpha.id].requires_grad || nodes_[beta.id].requires_grad ||
                    nodes_[gamma.id].requires_grad;
  n.value = {layer_logdet_eigen(pre, nodes_[alpha.id].value.at(0),
                                nodes_[beta.id].value.at(0), nodes_[gamma.id].value.at(0))};
  return push(std::move(n));
}

Var Tape::logdet_layer(const TracePreprocess& pre, Var alpha, Var beta, Var gamma) {
  Node n;
  n.op = Op::logdet_power;
  n.alpha = alpha.id;
  n.beta = beta.id;
  n.gamma = gamma.id;
  n.traces = &pre;
  n.requires_grad = nodes_[alpha.id].requires_grad || nodes_[beta.id].requires_grad ||
                    nodes_[gamma.id].requires_grad;
  n.value = {layer_logdet_power_series(pre, nodes_[alpha.id].value.at(0),
                                       nodes_[beta.id].value.at(0),
                                       nodes_[gamma.id].value.at(0))};
  return push(std::move(n));
}

void Tape::backward_layer(Node& node) {
  const SparseGraph& g = *node.graph;
  const std::size_t n = g.n_nodes();
  const auto& deg = g.degrees();
  const auto& logdeg = g.log_degrees();
  const NodeVector& h = nodes_[node.a].value;
  const NodeVector& gbar = node.grad;
  const double a = nodes_[node.alpha].value[0];
  const double b = nodes_[node.beta].value[0];
  const double gm = nodes_[node.gamma].value[0];

  NodeVector dgv(n), dgm1v(n);
  for (std::size_t i = 0; i < n; ++i) {
    dgv[i] = std::exp(gm * logdeg[i]);
    dgm1v[i] = dgv[i] / deg[i];
  }

  double ga = 0.0, gb = 0.0, gg = 0.0, gbias = 0.0;
  if (!node.transpose) {
    NodeVector ah(n);
    g.adjacency_apply(h.data(), ah.data());
    for (std::size_t i = 0; i < n; ++i) {
      const double self_term = dgv[i] * h[i];
      const double nbr_term = dgm1v[i] * ah[i];
      ga += gbar[i] * self_term;
      gb += gbar[i] * nbr_term;
      gg += gbar[i] * (a * self_term + b * nbr_term) * logdeg[i];
      gbias += gbar[i];
    }
    if (nodes_[node.a].requires_grad) {
      // d out / d h is the transposed layer map applied to gbar.
      NodeVector t(n), at(n);
      for (std::size_t i = 0; i < n; ++i) t[i] = dgm1v[i] * gbar[i];
      g.adjacency_apply(t.data(), at.data());
      NodeVector& gh = grad_buffer(node.a);
      for (std::size_t i = 0; i < n; ++i) gh[i] += a * dgv[i] * gbar[i] + b * at[i];
    }
  } else {
    NodeVector t(n), at(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = dgm1v[i] * h[i];
    g.adjacency_apply(t.data(), at.data());
    NodeVector lt(n), alt(n);
    for (std::size_t i = 0; i < n; ++i) lt[i] = t[i] * logdeg[i];
    g.adjacency_apply(lt.data(), alt.data());
    for (std::size_t i = 0; i < n; ++i) {
      ga += gbar[i] * dgv[i] * h[i];
      gb += gbar[i] * at[i];
      gg += gbar[i] * (a * dgv[i] * logdeg[i] * h[i] + b * alt[i]);
    }
    if (nodes_[node.a].requires_grad) {
      // d out / d h of the transpose map is the forward layer map (no bias).
      NodeVector agbar(n);
      g.adjacency_apply(gbar.data(), agbar.data());
      NodeVector& gh = grad_buffer(node.a);
      for (std::size_t i = 0; i < n; ++i)
        gh[i] += a * dgv[i] * gbar[i] + b * dgm1v[i] * agbar[i];
    }
  }
  if (nodes_[node.alpha].requires_grad) grad_buffer(node.alpha)[0] += ga;
  if (nodes_[node.beta].requires_grad) grad_buffer(node.beta)[0] += gb;
  if (nodes_[node.gamma].requires_grad) grad_buffer(node.gamma)[0] += gg;
  if (node.include_bias && !node.transpose && nodes_[node.bias].requires_grad)
    grad_buffer(node.bias)[0] += gbias;
}

void Tape::backward(Var objective) {
  Node& obj = nodes_.at(objective.id);
  if (obj.value.size() != 1)
    throw std::invalid_argument("backward: objective must be scalar");
  for (auto& n : nodes_) n.grad.clear();
  obj.grad = {1.0};

  for (int id = objective.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.requires_grad || n.grad.empty()) continue;
    switch (n.op) {
      case Op::leaf:
        break;
      case Op::add: {
        if (nodes_[n.a].requires_grad) {
          auto& ga = grad_buffer(n.a);
          for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += n.grad[i];
        }
        if (nodes_[n.b].requires_grad) {
          auto& gb = grad_buffer(n.b);
          for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += n.grad[i];
        }
        break;
      }
      case Op::sub: {
        if (nodes_[n.a].requires_grad) {
          auto& ga = grad_buffer(n.a);
          for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += n.grad[i];
        }
        if (nodes_[n.b].requires_grad) {
          auto& gb = grad_buffer(n.b);
          for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= n.grad[i];
        }
        break;
      }
      case Op::mul: {
        const auto& va = nodes_[n.a].value;
        const auto& vb = nodes_[n.b].value;
        if (nodes_[n.a].requires_grad) {
          auto& ga = grad_buffer(n.a);
          for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += n.grad[i] * vb[i];
        }
        if (nodes_[n.b].requires_grad) {
          auto& gb = grad_buffer(n.b);
          for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += n.grad[i] * va[i];
        }
        break;
      }
      case Op::smul: {
        const double s = nodes_[n.a].value[0];
        const auto& vv = nodes_[n.b].value;
        if (nodes_[n.a].requires_grad) {
          double acc = 0.0;
          for (std::size_t i = 0; i < vv.size(); ++i) acc += n.grad[i] * vv[i];
          grad_buffer(n.a)[0] += acc;
        }
        if (nodes_[n.b].requires_grad) {
          auto& gb = grad_buffer(n.b);
          for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += s * n.grad[i];
        }
        break;
      }
      case Op::scale: {
        if (nodes_[n.a].requires_grad) {
          auto& ga = grad_buffer(n.a);
          for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += n.c * n.grad[i];
        }
        break;
      }
      case Op::vexp: {
        auto& ga = grad_buffer(n.a);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += n.grad[i] * n.value[i];
        break;
      }
      case Op::vlog: {
        const auto& va = nodes_[n.a].value;
        auto& ga = grad_buffer(n.a);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += n.grad[i] / va[i];
        break;
      }
      case Op::vtanh: {
        auto& ga = grad_buffer(n.a);
        for (std::size_t i = 0; i < ga.size(); ++i)
          ga[i] += n.grad[i] * (1.0 - n.value[i] * n.value[i]);
        break;
      }
      case Op::vsigmoid: {
        auto& ga = grad_buffer(n.a);
        for (std::size_t i = 0; i < ga.size(); ++i)
          ga[i] += n.grad[i] * n.value[i] * (1.0 - n.value[i]);
        break;
      }
      case Op::sum: {
        auto& ga = grad_buffer(n.a);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += n.grad[0];
        break;
      }
      case Op::dot: {
        const auto& va = nodes_[n.a].value;
        const auto& vb = nodes_[n.b].value;
        if (nodes_[n.a].requires_grad) {
          auto& ga = grad_buffer(n.a);
          for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += n.grad[0] * vb[i];
        }
        if (nodes_[n.b].requires_grad) {
          auto& gb = grad_buffer(n.b);
          for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += n.grad[0] * va[i];
        }
        break;
      }
      case Op::layer:
        backward_layer(n);
        break;
      case Op::logdet_eig: {
        const double a = nodes_[n.alpha].value[0];
        const double b = nodes_[n.beta].value[0];
        double da = 0.0, db = 0.0;
        for (double lp : n.eig->lambda_prime) {
          const double lambda = a + b * lp;
          da += 1.0 / lambda;
          db += lp / lambda;
        }
        const double gbar = n.grad[0];
        if (nodes_[n.alpha].requires_grad) grad_buffer(n.alpha)[0] += gbar * da;
        if (nodes_[n.beta].requires_grad) grad_buffer(n.beta)[0] += gbar * db;
        if (nodes_[n.gamma].requires_grad)
          grad_buffer(n.gamma)[0] += gbar * n.eig->sum_log_degrees;
        break;
      }
      case Op::logdet_power: {
        const double a = nodes_[n.alpha].value[0];
        const double b = nodes_[n.beta].value[0];
        const double r = b / a;
        double dvdr = 0.0, neg_r_pow = 1.0;  // (-r)^{k-1}
        for (std::size_t k = 1; k <= n.traces->K(); ++k) {
          dvdr += neg_r_pow * n.traces->traces[k - 1];
          neg_r_pow *= -r;
        }
        const double gbar = n.grad[0];
        const double nn = static_cast<double>(n.traces->n);
        if (nodes_[n.alpha].requires_grad)
          grad_buffer(n.alpha)[0] += gbar * (nn / a - dvdr * r / a);
        if (nodes_[n.beta].requires_grad) grad_buffer(n.beta)[0] += gbar * dvdr / a;
        if (nodes_[n.gamma].requires_grad)
          grad_buffer(n.gamma)[0] += gbar * n.traces->sum_log_degrees;
        break;
      }
    }
  }
}

std::vector<NodeVector> gradient(Tape& tape, Var objective, const std::vector<Var>& inputs) {
  tape.backward(objective);
  std::vector<NodeVector> out;
  out.reserve(inputs.size());
  for (Var v : inputs) {
    const auto& g = tape.grad(v);
    if (g.empty())
      out.push_back(NodeVector(tape.value(v).size(), 0.0));
    else
      out.push_back(g);
  }
  return out;
}

}  // namespace dgmrf::ad
