#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dgmrf/types.hpp"

namespace dgmrf {

class Rng;

/// Symmetric weighted graph in compressed sparse row form.
///
/// Both directions of every edge are stored explicitly, column indices are
/// sorted within each row, self-loops are disallowed and every node has at
/// least one neighbor. Instances are immutable after construction and safe
/// to share across threads.
class SparseGraph {
 public:
  struct Edge {
    index_t u, v;
    double w = 1.0;
  };

  /// Empty placeholder; every usable graph comes from a factory below.
  SparseGraph() = default;

  /// Builds the CSR arrays from an undirected edge list. Duplicate pairs
  /// (first occurrence kept) and self-loops are dropped. Throws if a node id
  /// is out of range, a weight is not positive, a node ends up isolated, or
  /// the graph is disconnected.
  static SparseGraph from_edges(std::size_t n_nodes, std::vector<Edge> edges);

  std::size_t n_nodes() const { return n_nodes_; }
  /// Number of stored directed entries (= 2x undirected edge count).
  std::size_t n_entries() const { return col_indices_.size(); }
  std::size_t n_edges() const { return col_indices_.size() / 2; }

  const std::vector<std::size_t>& row_offsets() const { return row_offsets_; }
  const std::vector<index_t>& col_indices() const { return col_indices_; }
  const std::vector<double>& weights() const { return weights_; }
  const NodeVector& degrees() const { return degrees_; }
  const NodeVector& log_degrees() const { return log_degrees_; }
  double sum_log_degrees() const { return sum_log_degrees_; }

  std::span<const index_t> neighbors(index_t i) const {
    return {col_indices_.data() + row_offsets_[i],
            col_indices_.data() + row_offsets_[i + 1]};
  }
  std::span<const double> neighbor_weights(index_t i) const {
    return {weights_.data() + row_offsets_[i],
            weights_.data() + row_offsets_[i + 1]};
  }

  /// y = A x, one sparse pass.
  void adjacency_apply(const double* x, double* y) const;
  NodeVector adjacency_apply(const NodeVector& x) const;

  /// y = D^{-1/2} A D^{-1/2} x, one sparse pass, no densification.
  void normalized_adjacency_apply(const double* x, double* y) const;
  NodeVector normalized_adjacency_apply(const NodeVector& x) const;

  /// Content hash over n, structure and weights.
  std::uint64_t content_hash() const;

 private:
  std::size_t n_nodes_ = 0;
  std::vector<std::size_t> row_offsets_;
  std::vector<index_t> col_indices_;
  std::vector<double> weights_;
  NodeVector degrees_;
  NodeVector log_degrees_;
  double sum_log_degrees_ = 0.0;
};

/// Parses "u v [w]" lines ('#' starts a comment). Unweighted lines get w=1.
/// Duplicate edges and self-loops are removed.
SparseGraph load_edge_list(const std::string& path, std::size_t n_nodes);
void save_edge_list(const SparseGraph& g, const std::string& path);

/// BFS hop distances from `source` (unreachable nodes get SIZE_MAX).
std::vector<std::size_t> bfs_distances(const SparseGraph& g, index_t source);

/// Unweighted graph connecting all node pairs at hop distance <= k.
SparseGraph k_hop_graph(const SparseGraph& g, std::size_t k);

/// Observation mask over the nodes of a graph.
struct ObservationMask {
  std::vector<std::uint8_t> observed;
  std::size_t n_observed = 0;

  std::size_t size() const { return observed.size(); }
  bool is_observed(std::size_t i) const { return observed[i] != 0; }
};

/// Marks exactly round(fraction_unobserved*n) nodes unobserved, chosen
/// without replacement, deterministically per seed. Masks drawn from the
/// same seed are nested: the observed set for a smaller fraction_unobserved
/// is a superset of the one for a larger fraction_unobserved.
ObservationMask generate_mask(std::size_t n, double fraction_unobserved, std::uint64_t seed);

ObservationMask load_mask(const std::string& path);
void save_mask(const ObservationMask& m, const std::string& path);

/// One value per line, node order. Round-trips exactly (hexfloat).
NodeVector load_node_vector(const std::string& path);
void save_node_vector(const NodeVector& v, const std::string& path);

}  // namespace dgmrf
