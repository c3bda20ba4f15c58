#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/errors.hpp"
#include "qwalk/linalg.hpp"
#include "qwalk/polygon.hpp"

namespace qwalk {

/// Undirected edge; `u == v` is a loop.
struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;

  bool is_loop() const { return u == v; }
  std::size_t other(std::size_t end) const { return end == u ? v : u; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Multigraph with a local arc labeling. Vertex v owns arcs (v, 0..d_v-1);
/// label j at v names the edge id `incident(v)[j]`. Arcs are indexed globally
/// in vertex-major order (v1,0), ..., (v1,d1-1), (v2,0), ..., which is the
/// coined-walk basis order. A loop contributes two arcs at its vertex, and
/// those two arcs are paired with each other.
class LabeledGraph {
 public:
  LabeledGraph() = default;

  /// Default labeling: at each vertex, incident edge ids in ascending order
  /// receive labels 0, 1, 2, ...
  static LabeledGraph from_edges(std::size_t vertex_count, std::vector<Edge> edges) {
    std::vector<std::vector<std::size_t>> labels(vertex_count);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      check_endpoints(vertex_count, edges[e], e);
      labels[edges[e].u].push_back(e);
      labels[edges[e].v].push_back(e);
    }
    // push order is already ascending in e; loops push twice consecutively
    return LabeledGraph(vertex_count, std::move(edges), std::move(labels));
  }

  /// Explicit labeling. `labels[v]` must be a permutation of the incident
  /// edge-id multiset of v (a loop id appears twice).
  static LabeledGraph with_labels(std::size_t vertex_count, std::vector<Edge> edges,
                                  std::vector<std::vector<std::size_t>> labels) {
    if (labels.size() != vertex_count) {
      throw Error(ErrorCode::InvalidInput, "label table size differs from vertex count");
    }
    std::vector<std::vector<std::size_t>> expected(vertex_count);
    for (std::size_t e = 0; e < edges.size(); ++e) {
      check_endpoints(vertex_count, edges[e], e);
      expected[edges[e].u].push_back(e);
      expected[edges[e].v].push_back(e);
    }
    for (std::size_t v = 0; v < vertex_count; ++v) {
      auto got = labels[v];
      std::sort(got.begin(), got.end());
      if (got != expected[v]) {
        throw Error(ErrorCode::InvalidInput,
                    "arc labels at vertex " + std::to_string(v) + " do not match its incident edges",
                    "vertex", v);
      }
    }
    return LabeledGraph(vertex_count, std::move(edges), std::move(labels));
  }

  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t arc_count() const { return arc_edge_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t id) const { return edges_.at(id); }

  std::size_t degree(std::size_t v) const { return labels_.at(v).size(); }
  const std::vector<std::size_t>& incident(std::size_t v) const { return labels_.at(v); }
  std::size_t arc_offset(std::size_t v) const { return offsets_.at(v); }
  std::size_t arc_index(std::size_t v, std::size_t j) const {
    if (j >= degree(v)) throw Error(ErrorCode::InvalidInput, "arc label out of range", "vertex", v);
    return offsets_[v] + j;
  }

  /// (vertex, label) of a global arc index
  std::pair<std::size_t, std::size_t> arc(std::size_t index) const {
    const auto v = arc_tail_.at(index);
    return {v, index - offsets_[v]};
  }
  std::size_t arc_tail(std::size_t index) const { return arc_tail_.at(index); }
  std::size_t arc_edge(std::size_t index) const { return arc_edge_.at(index); }

  /// Flip-flop pairing: the arc that traverses the same edge in reverse.
  std::size_t mate(std::size_t index) const { return mate_.at(index); }
  std::pair<std::size_t, std::size_t> paired(std::size_t v, std::size_t j) const {
    return arc(mate(arc_index(v, j)));
  }

  bool has_loops() const {
    return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.is_loop(); });
  }

  bool is_regular() const {
    if (vertex_count_ == 0) return true;
    const auto d = degree(0);
    for (std::size_t v = 1; v < vertex_count_; ++v) {
      if (degree(v) != d) return false;
    }
    return true;
  }

  /// Distinct neighbours (loops make a vertex its own neighbour).
  const std::vector<std::size_t>& neighbours(std::size_t v) const { return neighbours_.at(v); }

  bool adjacent(std::size_t a, std::size_t b) const {
    const auto& n = neighbours_.at(a);
    return std::binary_search(n.begin(), n.end(), b);
  }

  /// Number of edges joining a and b.
  std::size_t multiplicity(std::size_t a, std::size_t b) const {
    std::size_t count = 0;
    for (const auto& e : edges_) {
      if ((e.u == a && e.v == b) || (e.u == b && e.v == a)) ++count;
    }
    return count;
  }

 private:
  LabeledGraph(std::size_t n, std::vector<Edge> edges, std::vector<std::vector<std::size_t>> labels)
      : vertex_count_(n), edges_(std::move(edges)), labels_(std::move(labels)) {
    offsets_.assign(n + 1, 0);
    for (std::size_t v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + labels_[v].size();
    const auto arcs = offsets_[n];
    arc_edge_.resize(arcs);
    arc_tail_.resize(arcs);
    mate_.assign(arcs, 0);

    // (edge id) -> arcs that carry it; each edge has exactly two slots
    std::vector<std::vector<std::size_t>> slots(edges_.size());
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t j = 0; j < labels_[v].size(); ++j) {
        const auto a = offsets_[v] + j;
        arc_edge_[a] = labels_[v][j];
        arc_tail_[a] = v;
        slots[labels_[v][j]].push_back(a);
      }
    }
    for (const auto& s : slots) {
      mate_[s[0]] = s[1];
      mate_[s[1]] = s[0];
    }

    neighbours_.assign(n, {});
    for (const auto& e : edges_) {
      neighbours_[e.u].push_back(e.v);
      if (!e.is_loop()) neighbours_[e.v].push_back(e.u);
    }
    for (auto& nb : neighbours_) {
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
  }

  static void check_endpoints(std::size_t n, const Edge& e, std::size_t id) {
    if (e.u >= n || e.v >= n) {
      throw Error(ErrorCode::InvalidInput, "edge " + std::to_string(id) + " has an endpoint out of range",
                  "edge", id);
    }
  }

  std::size_t vertex_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> labels_;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::size_t> arc_edge_;
  std::vector<std::size_t> arc_tail_;
  std::vector<std::size_t> mate_;
  std::vector<std::vector<std::size_t>> neighbours_;
};

/// Deterministic labeling by ascending edge id.
inline LabeledGraph assign_arc_labels(std::size_t vertex_count, std::vector<Edge> edges) {
  return LabeledGraph::from_edges(vertex_count, std::move(edges));
}

using EdgePair = std::pair<std::size_t, std::size_t>;

/// Basis index <-> bipartite edge (x, y). `y_count` fixes the Szegedy product
/// basis index x * y_count + y.
class Bijection {
 public:
  Bijection() = default;
  Bijection(std::vector<EdgePair> forward, std::size_t y_count)
      : forward_(std::move(forward)), y_count_(y_count) {
    for (std::size_t i = 0; i < forward_.size(); ++i) {
      if (forward_[i].second >= y_count_) {
        throw Error(ErrorCode::InvalidInput, "bijection image outside the y range", "index", i);
      }
      if (!inverse_.emplace(forward_[i], i).second) {
        throw Error(ErrorCode::NotInjective, "two basis indices map to the same edge", "index", i);
      }
    }
  }

  std::size_t size() const { return forward_.size(); }
  std::size_t y_count() const { return y_count_; }
  const EdgePair& operator[](std::size_t i) const { return forward_.at(i); }
  const std::vector<EdgePair>& forward() const { return forward_; }

  std::size_t index_of(EdgePair edge) const {
    auto it = inverse_.find(edge);
    if (it == inverse_.end()) throw Error(ErrorCode::InvalidInput, "edge not in bijection image");
    return it->second;
  }
  bool contains(EdgePair edge) const { return inverse_.count(edge) != 0; }

  /// Positions of the image in the x-major product basis.
  std::vector<std::size_t> basis_map() const {
    std::vector<std::size_t> out;
    out.reserve(forward_.size());
    for (const auto& [x, y] : forward_) out.push_back(x * y_count_ + y);
    return out;
  }

 private:
  std::vector<EdgePair> forward_;
  std::map<EdgePair, std::size_t> inverse_;
  std::size_t y_count_ = 0;
};

/// Data of an (extended) Szegedy walk on a bipartite graph.
/// p is |X| x |Y| (rows X -> Y), q is |Y| x |X|; theta and theta_prime are
/// indexed (x, y). Sink rows of p are all zero.
struct BipartiteWalkSpec {
  std::size_t x_count = 0;
  std::size_t y_count = 0;
  std::vector<EdgePair> edges;
  RealMatrix p;
  RealMatrix q;
  RealMatrix theta;
  RealMatrix theta_prime;
  std::vector<bool> sink;

  /// Uniform weights over each vertex's incident edges, zero phases.
  static BipartiteWalkSpec uniform(std::size_t x_count, std::size_t y_count,
                                   std::vector<EdgePair> edges) {
    BipartiteWalkSpec s;
    s.x_count = x_count;
    s.y_count = y_count;
    s.edges = std::move(edges);
    s.p = RealMatrix::Zero(static_cast<Eigen::Index>(x_count), static_cast<Eigen::Index>(y_count));
    s.q = RealMatrix::Zero(static_cast<Eigen::Index>(y_count), static_cast<Eigen::Index>(x_count));
    s.theta = s.p;
    s.theta_prime = s.p;
    s.sink.assign(x_count, false);
    std::vector<std::size_t> dx(x_count, 0), dy(y_count, 0);
    for (const auto& [x, y] : s.edges) {
      if (x >= x_count || y >= y_count) throw Error(ErrorCode::InvalidInput, "edge endpoint out of range");
      ++dx[x];
      ++dy[y];
    }
    for (const auto& [x, y] : s.edges) {
      s.p(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = 1.0 / static_cast<double>(dx[x]);
      s.q(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = 1.0 / static_cast<double>(dy[y]);
    }
    return s;
  }

  double p_at(std::size_t x, std::size_t y) const {
    return p(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }
  double q_at(std::size_t y, std::size_t x) const {
    return q(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x));
  }
  double theta_at(std::size_t x, std::size_t y) const {
    return theta.size() == 0 ? 0.0 : theta(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }
  double theta_prime_at(std::size_t x, std::size_t y) const {
    return theta_prime.size() == 0 ? 0.0
                                   : theta_prime(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }
  bool is_sink(std::size_t x) const { return x < sink.size() && sink[x]; }

  std::vector<std::vector<bool>> edge_mask() const {
    std::vector<std::vector<bool>> mask(x_count, std::vector<bool>(y_count, false));
    for (const auto& [x, y] : edges) mask[x][y] = true;
    return mask;
  }
  std::vector<std::size_t> x_degrees() const {
    std::vector<std::size_t> d(x_count, 0);
    for (const auto& e : edges) ++d[e.first];
    return d;
  }
  std::vector<std::size_t> y_degrees() const {
    std::vector<std::size_t> d(y_count, 0);
    for (const auto& e : edges) ++d[e.second];
    return d;
  }
  std::size_t dimension() const { return x_count * y_count; }
  std::size_t index(std::size_t x, std::size_t y) const { return x * y_count + y; }

  /// Checks the data invariants: shapes, edges unique and in range, weights
  /// supported on edges, Q rows stochastic, P rows stochastic or sink-zero.
  void validate(double tol = kDefaultTolerance) const {
    const auto m = static_cast<Eigen::Index>(x_count);
    const auto n = static_cast<Eigen::Index>(y_count);
    if (p.rows() != m || p.cols() != n || q.rows() != n || q.cols() != m) {
      throw Error(ErrorCode::DimensionMismatch, "P must be |X|x|Y| and Q must be |Y|x|X|");
    }
    if ((theta.size() != 0 && (theta.rows() != m || theta.cols() != n)) ||
        (theta_prime.size() != 0 && (theta_prime.rows() != m || theta_prime.cols() != n))) {
      throw Error(ErrorCode::DimensionMismatch, "phase matrices must be |X|x|Y|");
    }
    if (!sink.empty() && sink.size() != x_count) {
      throw Error(ErrorCode::DimensionMismatch, "sink flags must have one entry per x");
    }
    std::vector<std::vector<bool>> mask(x_count, std::vector<bool>(y_count, false));
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const auto [x, y] = edges[k];
      if (x >= x_count || y >= y_count) throw Error(ErrorCode::InvalidInput, "edge endpoint out of range", "edge", k);
      if (mask[x][y]) throw Error(ErrorCode::InvalidInput, "duplicate bipartite edge", "edge", k);
      mask[x][y] = true;
    }
    for (std::size_t x = 0; x < x_count; ++x) {
      double row = 0.0;
      for (std::size_t y = 0; y < y_count; ++y) {
        const double pv = p_at(x, y);
        const double qv = q_at(y, x);
        if (pv < 0.0 || qv < 0.0) throw Error(ErrorCode::InvalidInput, "negative transition weight", "x", x);
        if ((pv > 0.0 || qv > 0.0) && !mask[x][y]) {
          throw Error(ErrorCode::InvalidInput,
                      "weight on non-edge (" + std::to_string(x) + "," + std::to_string(y) + ")", "x", x);
        }
        row += pv;
      }
      if (is_sink(x)) {
        if (row != 0.0) throw Error(ErrorCode::InvalidInput, "sink row of P is not zero", "x", x);
      } else if (std::abs(row - 1.0) > tol) {
        throw Error(ErrorCode::InvalidInput, "row " + std::to_string(x) + " of P does not sum to 1", "x", x);
      }
    }
    for (std::size_t y = 0; y < y_count; ++y) {
      double row = 0.0;
      for (std::size_t x = 0; x < x_count; ++x) row += q_at(y, x);
      if (std::abs(row - 1.0) > tol) {
        throw Error(ErrorCode::InvalidInput, "row " + std::to_string(y) + " of Q does not sum to 1", "y", y);
      }
    }
  }
};

/// Line graph of the bipartite graph: one vertex per edge, vertex index in
/// lexicographic (x, y) order; adjacency when edges share an x or a y.
inline std::pair<LabeledGraph, Bijection> line_graph(const BipartiteWalkSpec& spec) {
  if (spec.edges.empty()) throw Error(ErrorCode::InvalidInput, "bipartite graph has no edges");
  auto pairs = spec.edges;
  std::sort(pairs.begin(), pairs.end());
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (pairs[i] == pairs[i - 1]) throw Error(ErrorCode::InvalidInput, "duplicate bipartite edge");
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      if (pairs[i].first == pairs[j].first || pairs[i].second == pairs[j].second) {
        edges.push_back({i, j});
      }
    }
  }
  const auto count = pairs.size();
  return {LabeledGraph::from_edges(count, std::move(edges)), Bijection(std::move(pairs), spec.y_count)};
}

/// Replaces every vertex v by the graph on its arcs (v, 0..d_v-1) whose
/// cliques are the given cells. New vertex (v, j) gets the arc index of (v, j);
/// each original edge becomes an edge between its two arcs. Edge order: clique
/// edges vertex by vertex, then inherited edges by original edge id.
inline LabeledGraph expand_vertices_to_cliques(
    const LabeledGraph& graph, const std::vector<std::vector<std::vector<std::size_t>>>& cells) {
  if (cells.size() != graph.vertex_count()) {
    throw Error(ErrorCode::InvalidInput, "need one partition per vertex");
  }
  std::vector<Edge> edges;
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
    std::vector<int> seen(graph.degree(v), 0);
    for (const auto& cell : cells[v]) {
      if (cell.empty()) throw Error(ErrorCode::InvalidInput, "empty partition cell", "vertex", v);
      for (auto j : cell) {
        if (j >= graph.degree(v) || seen[j]++ != 0) {
          throw Error(ErrorCode::InvalidInput, "partition at vertex " + std::to_string(v) + " is not a partition of its labels",
                      "vertex", v);
        }
      }
      for (std::size_t a = 0; a < cell.size(); ++a) {
        for (std::size_t b = a + 1; b < cell.size(); ++b) {
          edges.push_back({graph.arc_offset(v) + std::min(cell[a], cell[b]),
                           graph.arc_offset(v) + std::max(cell[a], cell[b])});
        }
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
      throw Error(ErrorCode::InvalidInput, "partition at vertex " + std::to_string(v) + " does not cover every label",
                  "vertex", v);
    }
  }
  for (std::size_t a = 0; a < graph.arc_count(); ++a) {
    if (a < graph.mate(a)) edges.push_back({a, graph.mate(a)});
  }
  // inherited edges were pushed in arc order; reorder them by original edge id
  const auto clique_edges = edges.size() - graph.edge_count();
  std::stable_sort(edges.begin() + static_cast<std::ptrdiff_t>(clique_edges), edges.end(),
                   [&](const Edge& a, const Edge& b) { return graph.arc_edge(a.u) < graph.arc_edge(b.u); });
  return LabeledGraph::from_edges(graph.arc_count(), std::move(edges));
}

/// Result of collapsing the polygons of a tessellation to single vertices.
struct Contraction {
  LabeledGraph graph;
  /// input polygon index -> new vertex
  std::vector<std::size_t> polygon_to_vertex;
  /// old vertex -> arc of the new graph; filled only when every old vertex
  /// carries exactly one cross-polygon edge (then old vertices are arcs)
  std::vector<std::size_t> vertex_to_arc;
};

/// Collapses each polygon support to one vertex. New vertices follow polygon
/// discovery order (ascending minimal support index); every edge joining two
/// polygons becomes one edge of the multigraph, so parallel edges survive.
/// Arc labels at a new vertex run over its cross edges ordered by old
/// endpoint, then old edge id.
inline Contraction contract_cliques_to_multigraph(const LabeledGraph& line, const Tessellation& alpha) {
  constexpr auto npos = Tessellation::npos;
  const auto n = line.vertex_count();
  std::vector<std::size_t> owner(n, npos);
  for (std::size_t k = 0; k < alpha.polygons.size(); ++k) {
    if (alpha.polygons[k].support.empty()) throw Error(ErrorCode::InvalidInput, "empty polygon", "polygon", k);
    for (auto vtx : alpha.polygons[k].support) {
      if (vtx >= n) throw Error(ErrorCode::InvalidInput, "polygon vertex out of range", "polygon", k);
      if (owner[vtx] != npos) throw Error(ErrorCode::OverlappingPolygons, "polygons overlap", "vertex", vtx);
      owner[vtx] = k;
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (owner[v] == npos) throw Error(ErrorCode::CoverageViolation, "vertex not covered by any polygon", "vertex", v);
  }

  std::vector<std::size_t> order(alpha.polygons.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return alpha.polygons[a].min_vertex() < alpha.polygons[b].min_vertex();
  });
  Contraction out;
  out.polygon_to_vertex.assign(alpha.polygons.size(), 0);
  for (std::size_t r = 0; r < order.size(); ++r) out.polygon_to_vertex[order[r]] = r;

  // (old endpoint, old edge id, new edge id) per new vertex
  struct Slot {
    std::size_t old_vertex, old_edge, new_edge;
  };
  std::vector<std::vector<Slot>> slots(order.size());
  std::vector<Edge> edges;
  for (std::size_t e = 0; e < line.edge_count(); ++e) {
    const auto& old = line.edge(e);
    const auto pu = owner[old.u];
    const auto pv = owner[old.v];
    if (pu == pv) continue;
    const auto id = edges.size();
    const auto a = out.polygon_to_vertex[pu];
    const auto b = out.polygon_to_vertex[pv];
    edges.push_back({a, b});
    slots[a].push_back({old.u, e, id});
    slots[b].push_back({old.v, e, id});
  }
  std::vector<std::vector<std::size_t>> labels(order.size());
  for (std::size_t v = 0; v < slots.size(); ++v) {
    std::sort(slots[v].begin(), slots[v].end(), [](const Slot& a, const Slot& b) {
      return a.old_vertex != b.old_vertex ? a.old_vertex < b.old_vertex : a.old_edge < b.old_edge;
    });
    for (const auto& s : slots[v]) labels[v].push_back(s.new_edge);
  }
  out.graph = LabeledGraph::with_labels(order.size(), std::move(edges), std::move(labels));

  std::vector<std::size_t> to_arc(n, npos);
  bool one_each = true;
  for (std::size_t v = 0; v < slots.size() && one_each; ++v) {
    for (std::size_t j = 0; j < slots[v].size(); ++j) {
      auto& dst = to_arc[slots[v][j].old_vertex];
      if (dst != npos) {
        one_each = false;
        break;
      }
      dst = out.graph.arc_offset(v) + j;
    }
  }
  if (one_each && std::find(to_arc.begin(), to_arc.end(), npos) == to_arc.end()) {
    out.vertex_to_arc = std::move(to_arc);
  }
  return out;
}

}  // namespace qwalk
