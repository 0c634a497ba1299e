#include "dgmrf/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dgmrf/rng.hpp"
#include "dgmrf/text_io.hpp"

namespace dgmrf {

SparseGraph SparseGraph::from_edges(std::size_t n_nodes, std::vector<Edge> edges) {
  if (n_nodes == 0) throw std::invalid_argument("graph: n_nodes must be positive");

  for (auto& e : edges) {
    if (e.u >= n_nodes || e.v >= n_nodes)
      throw std::out_of_range("graph: node id out of range [0, n_nodes)");
    if (!(e.w > 0.0)) throw std::invalid_argument("graph: edge weights must be positive");
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  // Drop self-loops, then duplicates (first occurrence wins).
  std::erase_if(edges, [](const Edge& e) { return e.u == e.v; });
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge& a, const Edge& b) {
                            return a.u == b.u && a.v == b.v;
                          }),
              edges.end());
  if (edges.empty()) throw std::invalid_argument("graph: no edges");

  SparseGraph g;
  g.n_nodes_ = n_nodes;
  g.row_offsets_.assign(n_nodes + 1, 0);
  for (const auto& e : edges) {
    ++g.row_offsets_[e.u + 1];
    ++g.row_offsets_[e.v + 1];
  }
  for (std::size_t i = 0; i < n_nodes; ++i) {
    if (g.row_offsets_[i + 1] == 0)
      throw std::invalid_argument("graph: isolated node " + std::to_string(i));
    g.row_offsets_[i + 1] += g.row_offsets_[i];
  }
  g.col_indices_.resize(2 * edges.size());
  g.weights_.resize(2 * edges.size());
  std::vector<std::size_t> fill(g.row_offsets_.begin(), g.row_offsets_.end() - 1);
  for (const auto& e : edges) {
    g.col_indices_[fill[e.u]] = e.v;
    g.weights_[fill[e.u]++] = e.w;
    g.col_indices_[fill[e.v]] = e.u;
    g.weights_[fill[e.v]++] = e.w;
  }
  // Sort column indices within each row (weights permuted alongside).
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const std::size_t lo = g.row_offsets_[i], hi = g.row_offsets_[i + 1];
    std::vector<std::pair<index_t, double>> row(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) row[k - lo] = {g.col_indices_[k], g.weights_[k]};
    std::sort(row.begin(), row.end());
    for (std::size_t k = lo; k < hi; ++k) {
      g.col_indices_[k] = row[k - lo].first;
      g.weights_[k] = row[k - lo].second;
    }
  }

  g.degrees_.resize(n_nodes);
  g.log_degrees_.resize(n_nodes);
  g.sum_log_degrees_ = 0.0;
  for (std::size_t i = 0; i < n_nodes; ++i) {
    double d = 0.0;
    for (std::size_t k = g.row_offsets_[i]; k < g.row_offsets_[i + 1]; ++k) d += g.weights_[k];
    g.degrees_[i] = d;
    g.log_degrees_[i] = std::log(d);
    g.sum_log_degrees_ += g.log_degrees_[i];
  }

  const auto dist = bfs_distances(g, 0);
  if (std::find(dist.begin(), dist.end(), SIZE_MAX) != dist.end())
    throw std::invalid_argument("graph: disconnected input");
  return g;
}

void SparseGraph::adjacency_apply(const double* x, double* y) const {
  for (std::size_t i = 0; i < n_nodes_; ++i) {
    double s = 0.0;
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
      s += weights_[k] * x[col_indices_[k]];
    y[i] = s;
  }
}

NodeVector SparseGraph::adjacency_apply(const NodeVector& x) const {
  if (x.size() != n_nodes_) throw std::invalid_argument("adjacency_apply: length mismatch");
  NodeVector y(n_nodes_);
  adjacency_apply(x.data(), y.data());
  return y;
}

void SparseGraph::normalized_adjacency_apply(const double* x, double* y) const {
  for (std::size_t i = 0; i < n_nodes_; ++i) {
    double s = 0.0;
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const index_t j = col_indices_[k];
      s += weights_[k] / std::sqrt(degrees_[j]) * x[j];
    }
    y[i] = s / std::sqrt(degrees_[i]);
  }
}

NodeVector SparseGraph::normalized_adjacency_apply(const NodeVector& x) const {
  if (x.size() != n_nodes_)
    throw std::invalid_argument("normalized_adjacency_apply: length mismatch");
  NodeVector y(n_nodes_);
  normalized_adjacency_apply(x.data(), y.data());
  return y;
}

std::uint64_t SparseGraph::content_hash() const {
  const std::uint64_t n = n_nodes_;
  std::uint64_t h = fnv1a(&n, sizeof n);
  h = fnv1a(row_offsets_.data(), row_offsets_.size() * sizeof(std::size_t), h);
  h = fnv1a(col_indices_.data(), col_indices_.size() * sizeof(index_t), h);
  h = fnv1a(weights_.data(), weights_.size() * sizeof(double), h);
  return h;
}

SparseGraph load_edge_list(const std::string& path, std::size_t n_nodes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_edge_list: cannot open " + path);
  std::vector<SparseGraph::Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long u, v;
    if (!(ls >> u)) continue;  // blank / comment-only line
    double w = 1.0;
    if (!(ls >> v)) {
      throw std::runtime_error("load_edge_list: " + path + ": line " +
                               std::to_string(lineno) + ": expected 'u v [w]'");
    }
    std::string rest;
    if (ls >> rest) {
      try {
        std::size_t used = 0;
        w = std::stod(rest, &used);
        if (used != rest.size()) throw std::invalid_argument(rest);
      } catch (const std::exception&) {
        throw std::runtime_error("load_edge_list: " + path + ": line " +
                                 std::to_string(lineno) + ": bad weight '" + rest + "'");
      }
      std::string extra;
      if (ls >> extra)
        throw std::runtime_error("load_edge_list: " + path + ": line " +
                                 std::to_string(lineno) + ": trailing tokens");
    }
    if (u < 0 || v < 0 || u >= static_cast<long long>(n_nodes) ||
        v >= static_cast<long long>(n_nodes))
      throw std::out_of_range("load_edge_list: " + path + ": line " +
                              std::to_string(lineno) + ": node id out of range");
    edges.push_back({static_cast<index_t>(u), static_cast<index_t>(v), w});
  }
  return SparseGraph::from_edges(n_nodes, std::move(edges));
}

void save_edge_list(const SparseGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_edge_list: cannot open " + path);
  for (std::size_t i = 0; i < g.n_nodes(); ++i) {
    const auto nbrs = g.neighbors(static_cast<index_t>(i));
    const auto ws = g.neighbor_weights(static_cast<index_t>(i));
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (nbrs[k] > i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%a", ws[k]);
        out << i << ' ' << nbrs[k] << ' ' << buf << '\n';
      }
    }
  }
}

std::vector<std::size_t> bfs_distances(const SparseGraph& g, index_t source) {
  std::vector<std::size_t> dist(g.n_nodes(), SIZE_MAX);
  std::deque<index_t> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const index_t i = queue.front();
    queue.pop_front();
    for (index_t j : g.neighbors(i)) {
      if (dist[j] == SIZE_MAX) {
        dist[j] = dist[i] + 1;
        queue.push_back(j);
      }
    }
  }
  return dist;
}

SparseGraph k_hop_graph(const SparseGraph& g, std::size_t k) {
  if (k < 1) throw std::invalid_argument("k_hop_graph: k must be >= 1");
  std::vector<SparseGraph::Edge> edges;
  // Depth-limited BFS from every node; edge weights of g are ignored.
  std::vector<std::size_t> dist(g.n_nodes(), SIZE_MAX);
  std::vector<index_t> touched;
  for (index_t s = 0; s < g.n_nodes(); ++s) {
    std::deque<index_t> queue{s};
    dist[s] = 0;
    touched.assign(1, s);
    while (!queue.empty()) {
      const index_t i = queue.front();
      queue.pop_front();
      if (dist[i] == k) continue;
      for (index_t j : g.neighbors(i)) {
        if (dist[j] == SIZE_MAX) {
          dist[j] = dist[i] + 1;
          touched.push_back(j);
          queue.push_back(j);
        }
      }
    }
    for (index_t j : touched) {
      if (j > s) edges.push_back({s, j, 1.0});
      dist[j] = SIZE_MAX;
    }
  }
  return SparseGraph::from_edges(g.n_nodes(), std::move(edges));
}

ObservationMask generate_mask(std::size_t n, double fraction_unobserved, std::uint64_t seed) {
  if (!(fraction_unobserved > 0.0 && fraction_unobserved < 1.0))
    throw std::invalid_argument("generate_mask: fraction must be in (0,1)");
  const auto n_unobserved =
      static_cast<std::size_t>(std::llround(fraction_unobserved * static_cast<double>(n)));
  if (n_unobserved >= n)
    throw std::invalid_argument("generate_mask: fraction leaves no observed nodes");

  // Fisher-Yates permutation; unobserved nodes are a prefix, so masks from
  // the same seed are nested across fractions.
  std::vector<index_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<index_t>(i);
  Rng rng = Rng(seed).substream("mask");
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next() % (i + 1));
    std::swap(perm[i], perm[j]);
  }

  ObservationMask m;
  m.observed.assign(n, 1);
  for (std::size_t i = 0; i < n_unobserved; ++i) m.observed[perm[i]] = 0;
  m.n_observed = n - n_unobserved;
  return m;
}

ObservationMask load_mask(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_mask: cannot open " + path);
  ObservationMask m;
  int v;
  while (in >> v) {
    if (v != 0 && v != 1) throw std::runtime_error("load_mask: entries must be 0/1");
    m.observed.push_back(static_cast<std::uint8_t>(v));
    m.n_observed += static_cast<std::size_t>(v);
  }
  if (m.n_observed == 0) throw std::runtime_error("load_mask: no observed nodes");
  return m;
}

void save_mask(const ObservationMask& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_mask: cannot open " + path);
  for (auto v : m.observed) out << int(v) << '\n';
}

NodeVector load_node_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_node_vector: cannot open " + path);
  NodeVector v;
  double x;
  while (read_double(in, x)) v.push_back(x);
  return v;
}

void save_node_vector(const NodeVector& v, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_node_vector: cannot open " + path);
  char buf[64];
  for (double x : v) {
    std::snprintf(buf, sizeof buf, "%a", x);
    out << buf << '\n';
  }
}

}  // namespace dgmrf
