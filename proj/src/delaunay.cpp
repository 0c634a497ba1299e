#include "dgmrf/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dgmrf/rng.hpp"

namespace dgmrf {

namespace {

struct Tri {
  index_t a, b, c;
};

inline double orient2d(const Point2& pa, const Point2& pb, const Point2& pc) {
  return (pb.x - pa.x) * (pc.y - pa.y) - (pb.y - pa.y) * (pc.x - pa.x);
}

// > 0 iff pd lies strictly inside the circumcircle of the CCW triangle (pa,pb,pc).
inline double incircle(const Point2& pa, const Point2& pb, const Point2& pc, const Point2& pd) {
  const double adx = pa.x - pd.x, ady = pa.y - pd.y;
  const double bdx = pb.x - pd.x, bdy = pb.y - pd.y;
  const double cdx = pc.x - pd.x, cdy = pc.y - pd.y;
  const double ad2 = adx * adx + ady * ady;
  const double bd2 = bdx * bdx + bdy * bdy;
  const double cd2 = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd2 - cdy * bd2) - ady * (bdx * cd2 - cdx * bd2) +
         ad2 * (bdx * cdy - cdx * bdy);
}

}  // namespace

std::vector<std::pair<index_t, index_t>> delaunay_edges(const std::vector<Point2>& points) {
  const std::size_t n = points.size();
  if (n < 3) throw std::invalid_argument("delaunay_edges: need at least 3 points");

  // Super-triangle enclosing the unit square with a wide margin.
  std::vector<Point2> pts = points;
  const index_t s0 = static_cast<index_t>(n), s1 = s0 + 1, s2 = s0 + 2;
  pts.push_back({-50.0, -40.0});
  pts.push_back({50.0, -40.0});
  pts.push_back({0.5, 90.0});

  std::vector<Tri> tris{{s0, s1, s2}};
  std::vector<Tri> bad;
  // Polygon hole boundary as directed edges.
  std::vector<std::pair<index_t, index_t>> boundary;

  for (index_t p = 0; p < n; ++p) {
    bad.clear();
    boundary.clear();
    std::vector<std::size_t> bad_idx;
    for (std::size_t t = 0; t < tris.size(); ++t) {
      const Tri& tr = tris[t];
      if (incircle(pts[tr.a], pts[tr.b], pts[tr.c], pts[p]) > 0.0) {
        bad.push_back(tr);
        bad_idx.push_back(t);
      }
    }
    // Boundary = edges appearing in exactly one bad triangle.
    auto add_edge = [&boundary](index_t u, index_t v) {
      for (auto it = boundary.begin(); it != boundary.end(); ++it) {
        if (it->first == v && it->second == u) {
          boundary.erase(it);
          return;
        }
      }
      boundary.emplace_back(u, v);
    };
    for (const Tri& tr : bad) {
      add_edge(tr.a, tr.b);
      add_edge(tr.b, tr.c);
      add_edge(tr.c, tr.a);
    }
    for (auto it = bad_idx.rbegin(); it != bad_idx.rend(); ++it) {
      tris[*it] = tris.back();
      tris.pop_back();
    }
    for (const auto& [u, v] : boundary) {
      // Keep CCW orientation for the incircle test.
      if (orient2d(pts[u], pts[v], pts[p]) > 0.0)
        tris.push_back({u, v, p});
      else
        tris.push_back({v, u, p});
    }
  }

  std::set<std::pair<index_t, index_t>> edges;
  for (const Tri& tr : tris) {
    if (tr.a >= n || tr.b >= n || tr.c >= n) continue;  // touches super-triangle
    const index_t v[3] = {tr.a, tr.b, tr.c};
    for (int i = 0; i < 3; ++i) {
      index_t u = v[i], w = v[(i + 1) % 3];
      if (u > w) std::swap(u, w);
      edges.emplace(u, w);
    }
  }
  return {edges.begin(), edges.end()};
}

SpatialGraph generate_delaunay_graph(std::size_t n, std::uint64_t seed,
                                     const DelaunayConfig& config) {
  if (n < 3) throw std::invalid_argument("generate_delaunay_graph: n must be >= 3");

  Rng rng = Rng(seed).substream("delaunay");
  std::vector<Point2> pts(n);
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (auto& p : pts) {
      p.x = rng.uniform();
      p.y = rng.uniform();
    }
    if (n == 3 && std::abs(orient2d(pts[0], pts[1], pts[2])) < 1e-12) continue;  // resample

    auto pairs = delaunay_edges(pts);
    std::vector<SparseGraph::Edge> edges;
    edges.reserve(pairs.size());
    for (const auto& [u, v] : pairs) {
      double w = 1.0;
      if (config.inverse_distance_weights) {
        const double dx = pts[u].x - pts[v].x, dy = pts[u].y - pts[v].y;
        w = 1.0 / (std::sqrt(dx * dx + dy * dy) + config.epsilon);
      }
      edges.push_back({u, v, w});
    }
    return {SparseGraph::from_edges(n, std::move(edges)), std::move(pts)};
  }
  throw std::runtime_error("generate_delaunay_graph: repeated degenerate samples");
}

void save_points_csv(const std::vector<Point2>& points, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_points_csv: cannot open " + path);
  out << "id,x,y\n";
  char buf[96];
  for (std::size_t i = 0; i < points.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%a,%a", i, points[i].x, points[i].y);
    out << buf << '\n';
  }
}

std::vector<Point2> load_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_points_csv: cannot open " + path);
  std::vector<Point2> pts;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string id, xs, ys;
    if (!std::getline(ls, id, ',') || !std::getline(ls, xs, ',') || !std::getline(ls, ys))
      throw std::runtime_error("load_points_csv: malformed line: " + line);
    pts.push_back({std::strtod(xs.c_str(), nullptr), std::strtod(ys.c_str(), nullptr)});
  }
  return pts;
}

}  // namespace dgmrf
