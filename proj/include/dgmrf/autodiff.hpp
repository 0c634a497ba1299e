#pragma once

#include <cstdint>
#include <vector>

#include "dgmrf/graph.hpp"
#include "dgmrf/logdet.hpp"
#include "dgmrf/types.hpp"

namespace dgmrf::ad {

/// Handle to a tape node. Scalars are length-1 vectors.
struct Var {
  int id = -1;
};

/// Reverse-mode tape over vector-valued primitives. Nodes hold whole
/// node-vectors (or scalars), so memory stays O(layers * n) per evaluation
/// instead of one node per scalar. Referenced graphs and pre-processes must
/// outlive the tape.
class Tape {
 public:
  Var input(NodeVector value);              // leaf, participates in gradients
  Var constant(NodeVector value);           // leaf, no gradient
  Var input(double scalar) { return input(NodeVector{scalar}); }
  Var constant(double scalar) { return constant(NodeVector{scalar}); }

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);                    // elementwise, equal lengths
  Var smul(Var s, Var v);                   // scalar node * vector node
  Var scale(Var a, double c);
  Var exp(Var a);
  Var log(Var a);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var sum(Var a);                           // -> scalar
  Var dot(Var a, Var b);                    // -> scalar

  /// The graph layer as a single differentiable primitive; alpha, beta,
  /// gamma, bias are scalar nodes. Matches model.hpp layer_apply.
  Var layer(const SparseGraph& g, Var h, Var alpha, Var beta, Var gamma, Var bias,
            bool transpose, bool include_bias);

  /// Per-layer log-determinants with analytic partials in (alpha,beta,gamma).
  Var logdet_layer(const EigPreprocess& pre, Var alpha, Var beta, Var gamma);
  Var logdet_layer(const TracePreprocess& pre, Var alpha, Var beta, Var gamma);

  const NodeVector& value(Var v) const;
  double scalar(Var v) const;

  /// Reverse pass from a scalar objective. Gradients of all inputs are
  /// available through grad() afterwards.
  void backward(Var objective);
  const NodeVector& grad(Var v) const;
  double scalar_grad(Var v) const;

  void clear();
  std::size_t size() const { return nodes_.size(); }

 private:
  enum class Op : std::uint8_t {
    leaf, add, sub, mul, smul, scale, vexp, vlog, vtanh, vsigmoid,
    sum, dot, layer, logdet_eig, logdet_power,
  };

  struct Node {
    Op op = Op::leaf;
    bool requires_grad = false;
    int a = -1, b = -1;
    int alpha = -1, beta = -1, gamma = -1, bias = -1;
    const SparseGraph* graph = nullptr;
    const EigPreprocess* eig = nullptr;
    const TracePreprocess* traces = nullptr;
    bool transpose = false, include_bias = false;
    double c = 0.0;
    NodeVector value;
    NodeVector grad;
  };

  Var push(Node node);
  NodeVector& grad_buffer(int id);
  void backward_layer(Node& node);

  std::vector<Node> nodes_;
};

/// Gradients of a scalar objective with respect to the given tape inputs.
std::vector<NodeVector> gradient(Tape& tape, Var objective, const std::vector<Var>& inputs);

}  // namespace dgmrf::ad
