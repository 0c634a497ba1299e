#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dgmrf/graph.hpp"

namespace dgmrf {

struct Point2 {
  double x, y;
};

struct DelaunayConfig {
  /// Weight edges with w_ij = 1/(dist + epsilon) instead of w_ij = 1.
  bool inverse_distance_weights = false;
  /// Guards against coincident points in the weighting.
  double epsilon = 1e-6;
};

struct SpatialGraph {
  SparseGraph graph;
  std::vector<Point2> points;
};

/// Samples n points uniformly on [0,1]^2 and connects them by their Delaunay
/// triangulation (incremental Bowyer-Watson). Deterministic for a fixed seed;
/// cocircular ties are broken by insertion order.
SpatialGraph generate_delaunay_graph(std::size_t n, std::uint64_t seed,
                                     const DelaunayConfig& config = {});

/// Delaunay edges of the given points (indices into `points`).
std::vector<std::pair<index_t, index_t>> delaunay_edges(const std::vector<Point2>& points);

/// CSV "id,x,y".
void save_points_csv(const std::vector<Point2>& points, const std::string& path);
std::vector<Point2> load_points_csv(const std::string& path);

}  // namespace dgmrf
