#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/converters.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/linalg.hpp"
#include "qwalk/reflection.hpp"
#include "qwalk/walks.hpp"

namespace qwalk {

/// Marked positions (coined vertices or Szegedy X vertices), sorted and unique.
struct MarkedSet {
  std::vector<std::size_t> positions;

  MarkedSet() = default;
  MarkedSet(std::initializer_list<std::size_t> init) : MarkedSet(std::vector<std::size_t>(init)) {}
  explicit MarkedSet(std::vector<std::size_t> p) : positions(std::move(p)) {
    std::sort(positions.begin(), positions.end());
    positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
  }

  bool empty() const { return positions.empty(); }
  bool contains(std::size_t v) const { return std::binary_search(positions.begin(), positions.end(), v); }

  void check_range(std::size_t count, const char* subject) const {
    for (auto v : positions) {
      if (v >= count) {
        throw Error(ErrorCode::InvalidInput, "marked " + std::string(subject) + " " + std::to_string(v) + " out of range",
                    subject, v);
      }
    }
  }
};

/// Abstract-search coin C' = -I on marked vertices, Grover elsewhere, with its
/// factorisation C' = C R (C all-Grover; R = -G on marked, I elsewhere).
struct SearchCoin {
  CoinAssignment coins;
  CoinAssignment grover;
  CoinAssignment reflection;
  /// no vertex marked: the walk is the plain Grover walk
  bool marked_empty = false;
};

inline SearchCoin abstract_search_coin(const LabeledGraph& graph, const MarkedSet& marked) {
  marked.check_range(graph.vertex_count(), "vertex");
  SearchCoin out;
  out.marked_empty = marked.empty();
  out.grover = CoinAssignment::grover(graph);
  std::vector<Matrix> blocks, refl;
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
    const auto d = static_cast<Eigen::Index>(graph.degree(v));
    if (marked.contains(v)) {
      blocks.push_back(-Matrix::Identity(d, d));
      refl.push_back(-out.grover.block(v));
    } else {
      blocks.push_back(out.grover.block(v));
      refl.push_back(Matrix::Identity(d, d));
    }
  }
  out.coins = CoinAssignment(std::move(blocks));
  out.reflection = CoinAssignment(std::move(refl));
  return out;
}

/// Cuts the edges leaving the marked X vertices: their P rows become zero
/// and are flagged as sinks. Q and the edge list are untouched.
inline BipartiteWalkSpec mark_sinks(const BipartiteWalkSpec& spec, const MarkedSet& marked) {
  marked.check_range(spec.x_count, "x");
  BipartiteWalkSpec out = spec;
  if (out.sink.size() != out.x_count) out.sink.assign(out.x_count, false);
  for (auto x : marked.positions) {
    out.p.row(static_cast<Eigen::Index>(x)).setZero();
    out.sink[x] = true;
  }
  return out;
}

/// Uniform superposition over all 2|E| arcs.
inline WalkState coined_search_state(const LabeledGraph& graph) {
  const auto n = static_cast<Eigen::Index>(graph.arc_count());
  const double a = 1.0 / std::sqrt(static_cast<double>(n));
  return WalkState::coined(graph, Vector::Constant(n, Complex(a, 0.0)));
}

/// (1/sqrt|X|) sum_xy sqrt(p_xy) |x,y> from the sink-free weights.
inline WalkState szegedy_search_state(const BipartiteWalkSpec& presink) {
  Vector amps = Vector::Zero(static_cast<Eigen::Index>(presink.dimension()));
  const double norm = 1.0 / std::sqrt(static_cast<double>(presink.x_count));
  for (const auto& [x, y] : presink.edges) {
    amps(static_cast<Eigen::Index>(presink.index(x, y))) = std::sqrt(presink.p_at(x, y)) * norm;
  }
  return WalkState::szegedy(presink.x_count, presink.y_count, std::move(amps));
}

/// Uniform superposition over the staggered vertices, grouped by position.
inline WalkState staggered_search_state(std::size_t vertex_count, std::vector<std::size_t> groups) {
  const auto n = static_cast<Eigen::Index>(vertex_count);
  const double a = 1.0 / std::sqrt(static_cast<double>(n));
  return WalkState::staggered(vertex_count, Vector::Constant(n, Complex(a, 0.0)), std::move(groups));
}

struct TraceRow {
  std::size_t t = 0;
  double p_marked = 0.0;
  std::vector<double> p_per_marked;
  double p_max_vertex = 0.0;
};

struct ProbabilityTrace {
  std::vector<TraceRow> rows;
  std::size_t argmax_t = 0;
  double max_p = 0.0;
};

/// Marked-position probability for t = 0..steps. The best measurement time is
/// the first step attaining the maximum over the horizon.
inline ProbabilityTrace success_probability_trace(const Matrix& u, const WalkState& psi0, const MarkedSet& marked,
                                                  std::size_t steps) {
  if (static_cast<std::size_t>(u.rows()) != psi0.dimension() || !is_square(u)) {
    throw Error(ErrorCode::DimensionMismatch, "operator and state dimensions differ");
  }
  marked.check_range(psi0.position_count, "position");
  ProbabilityTrace out;
  Vector v = psi0.amplitudes;
  WalkState s = psi0;
  for (std::size_t t = 0; t <= steps; ++t) {
    s.amplitudes = v;
    const auto probs = vertex_probabilities(s);
    TraceRow row;
    row.t = t;
    for (auto m : marked.positions) {
      row.p_per_marked.push_back(probs[m]);
      row.p_marked += probs[m];
    }
    row.p_max_vertex = probs.empty() ? 0.0 : *std::max_element(probs.begin(), probs.end());
    if (t == 0 || row.p_marked > out.max_p) {
      out.max_p = row.p_marked;
      out.argmax_t = t;
    }
    out.rows.push_back(std::move(row));
    if (t < steps) v = u * v;
  }
  return out;
}

/// Szegedy form of a coined walk through the staggered bridge. Coin blocks
/// that are partial reflections leave arcs outside every alpha polygon; at
/// each vertex those arcs are completed into one extra clique whose polygon
/// (uniform weights) becomes a sink of X.
struct CoinedToSzegedy {
  CoinedToStaggered staggered;
  /// staggered graph plus the completion cliques
  LabeledGraph completed_graph;
  Tessellation completed_alpha;
  /// bipartite walk before the sinks are cut
  BipartiteWalkSpec presink;
  BipartiteWalkSpec spec;
  /// arc index of the coined walk -> (x, y)
  Bijection map;
  std::vector<std::size_t> sinks;
};

inline CoinedToSzegedy coined_to_szegedy(const LabeledGraph& graph, const CoinAssignment& coins,
                                         const ConversionOptions& opt = {}) {
  CoinedToSzegedy out;
  out.staggered = coined_to_staggered(graph, coins, opt);
  const auto& st = out.staggered;
  const auto n = st.graph.vertex_count();

  std::vector<bool> covered(n, false);
  for (const auto& poly : st.alpha.polygons) {
    for (auto v : poly.support) covered[v] = true;
  }
  std::vector<Edge> edges = st.graph.edges();
  std::vector<std::pair<Polygon, bool>> polys;  // (polygon, is completion)
  for (const auto& poly : st.alpha.polygons) polys.emplace_back(poly, false);
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
    std::vector<std::size_t> open;
    for (std::size_t j = 0; j < graph.degree(v); ++j) {
      const auto a = graph.arc_offset(v) + j;
      if (!covered[a]) open.push_back(a);
    }
    if (open.empty()) continue;
    for (std::size_t i = 0; i < open.size(); ++i) {
      for (std::size_t k = i + 1; k < open.size(); ++k) edges.push_back({open[i], open[k]});
    }
    polys.emplace_back(Polygon::uniform(open), true);
  }
  std::stable_sort(polys.begin(), polys.end(),
                   [](const auto& a, const auto& b) { return a.first.min_vertex() < b.first.min_vertex(); });
  std::vector<Polygon> alpha;
  for (std::size_t x = 0; x < polys.size(); ++x) {
    if (polys[x].second) out.sinks.push_back(x);
    alpha.push_back(polys[x].first);
  }
  out.completed_graph = LabeledGraph::from_edges(n, std::move(edges));
  out.completed_alpha = tessellation_of(reflection_from_polygons(n, std::move(alpha), opt.tol), out.completed_graph);
  auto sz = staggered_to_szegedy(out.completed_graph, out.completed_alpha, st.beta, opt.tol);
  out.presink = std::move(sz.spec);
  out.map = std::move(sz.map);
  out.spec = mark_sinks(out.presink, MarkedSet(out.sinks));
  return out;
}

/// Abstract search (-I on marked vertices, Grover elsewhere) cast into
/// Szegedy's framework with the marked vertices as sinks of X.
inline CoinedToSzegedy coined_search_to_szegedy(const LabeledGraph& graph, const MarkedSet& marked,
                                                double tol = kDefaultTolerance) {
  const auto coin = abstract_search_coin(graph, marked);
  return coined_to_szegedy(graph, coin.coins, {.allow_partial = true, .tol = tol});
}

}  // namespace qwalk
