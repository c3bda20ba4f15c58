#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qwalk/errors.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/linalg.hpp"
#include "qwalk/reflection.hpp"
#include "qwalk/walks.hpp"

namespace qwalk {

struct EquivalenceReport {
  double max_abs_diff = 0.0;
  std::vector<std::size_t> basis_map;
  std::size_t idle_dimension = 0;
  double tolerance = kDefaultTolerance;
  bool verdict = false;
};

/// Embeds `a` into the basis of `b` through `map` (a-index -> b-index) and
/// compares: the image block must equal `a` and `b` must act as the identity
/// on the complement (the idle subspace).
inline EquivalenceReport verify_equivalence(const Matrix& a, const Matrix& b, std::span<const std::size_t> map,
                                            double tol = kDefaultTolerance) {
  if (!is_square(a) || !is_square(b)) throw Error(ErrorCode::DimensionMismatch, "operators must be square");
  const auto na = static_cast<std::size_t>(a.rows());
  const auto nb = static_cast<std::size_t>(b.rows());
  if (map.size() != na) throw Error(ErrorCode::DimensionMismatch, "map must cover every basis state of the first operator");
  if (nb < na) throw Error(ErrorCode::DimensionMismatch, "second operator is smaller than the first");
  std::vector<bool> hit(nb, false);
  for (std::size_t i = 0; i < na; ++i) {
    if (map[i] >= nb) throw Error(ErrorCode::NotInjective, "map target out of range", "index", i);
    if (hit[map[i]]) throw Error(ErrorCode::NotInjective, "map is not injective", "index", i);
    hit[map[i]] = true;
  }
  Matrix expected = Matrix::Identity(static_cast<Eigen::Index>(nb), static_cast<Eigen::Index>(nb));
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < na; ++j) {
      expected(static_cast<Eigen::Index>(map[i]), static_cast<Eigen::Index>(map[j])) =
          a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  EquivalenceReport r;
  r.max_abs_diff = max_abs(b - expected);
  r.basis_map.assign(map.begin(), map.end());
  r.idle_dimension = nb - na;
  r.tolerance = tol;
  r.verdict = r.max_abs_diff <= tol;
  return r;
}

inline std::vector<std::size_t> identity_map(std::size_t n) {
  std::vector<std::size_t> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = i;
  return m;
}

struct ConversionOptions {
  /// accept coin blocks that are partial reflections (search coins)
  bool allow_partial = false;
  double tol = kDefaultTolerance;
};

/// Staggered form of a coined walk. Vertex i of `graph` is arc i of the coined
/// graph, so the two walks share a basis.
struct CoinedToStaggered {
  LabeledGraph graph;
  Tessellation alpha;
  Tessellation beta;
  /// coined vertex each expanded vertex came from
  std::vector<std::size_t> position;
  /// coined vertex each alpha polygon came from
  std::vector<std::size_t> alpha_source;
};

/// Replaces every vertex by the graph its coin block induces, takes the
/// embedded coin polygons as alpha and the shift's matched pairs as beta.
inline CoinedToStaggered coined_to_staggered(const LabeledGraph& graph, const CoinAssignment& coins,
                                             const ConversionOptions& opt = {}) {
  coins.validate(graph);
  std::vector<std::vector<std::vector<std::size_t>>> cells(graph.vertex_count());
  std::vector<Polygon> alpha;
  CoinedToStaggered out;
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
    const auto d = graph.degree(v);
    if (d == 0) continue;
    auto cls = classify_reflection(coins.block(v), opt.tol);
    if (auto* bad = std::get_if<NotReflection>(&cls)) {
      throw Error(ErrorCode::CoinNotOrthogonalReflection,
                  "coin at vertex " + std::to_string(v) + " is not an orthogonal reflection: " + bad->reason, "vertex",
                  v);
    }
    const auto& refl = std::get<ReflectionOperator>(cls);
    if (refl.kind() == ReflectionKind::Partial && !opt.allow_partial) {
      throw Error(ErrorCode::CoinNotOrthogonalReflection,
                  "coin at vertex " + std::to_string(v) + " is only a partial reflection", "vertex", v);
    }
    std::vector<bool> in_polygon(d, false);
    for (const auto& poly : refl.polygons()) {
      cells[v].push_back(poly.support);
      Polygon embedded;
      for (std::size_t k = 0; k < poly.size(); ++k) {
        in_polygon[poly.support[k]] = true;
        embedded.support.push_back(graph.arc_offset(v) + poly.support[k]);
        embedded.coefficients.push_back(poly.coefficients[k]);
      }
      alpha.push_back(std::move(embedded));
      out.alpha_source.push_back(v);
    }
    for (std::size_t j = 0; j < d; ++j) {
      if (!in_polygon[j]) cells[v].push_back({j});
    }
  }
  out.graph = expand_vertices_to_cliques(graph, cells);
  for (std::size_t a = 0; a < graph.arc_count(); ++a) out.position.push_back(graph.arc_tail(a));
  const auto n = graph.arc_count();
  out.alpha = tessellation_of(reflection_from_polygons(n, std::move(alpha), opt.tol), out.graph);
  out.beta = tessellation_of(shift_operator(graph), out.graph);
  return out;
}

/// Extended Szegedy data of a staggered walk together with the vertex ->
/// bipartite-edge bijection.
struct StaggeredToSzegedy {
  BipartiteWalkSpec spec;
  Bijection map;
};

/// X = alpha polygons, Y = beta polygons, one bipartite edge per vertex (the
/// unique vertex in the intersection of its two polygons). Weights are the
/// squared moduli of the polygon coefficients; phases their arguments, with
/// the first support entry of each polygon at phase 0.
inline StaggeredToSzegedy staggered_to_szegedy(const LabeledGraph& graph, const Tessellation& alpha,
                                               const Tessellation& beta, double tol = kDefaultTolerance) {
  const auto n = graph.vertex_count();
  if (alpha.vertex_count != n || beta.vertex_count != n) {
    throw Error(ErrorCode::DimensionMismatch, "tessellations and graph differ in size");
  }
  auto a_refl = reflection_from_polygons(n, alpha.polygons, tol);
  auto b_refl = reflection_from_polygons(n, beta.polygons, tol);
  const auto ta = tessellation_of(a_refl, graph);
  const auto tb = tessellation_of(b_refl, graph);
  const auto oa = ta.owner();
  const auto ob = tb.owner();
  for (std::size_t v = 0; v < n; ++v) {
    if (oa[v] == Tessellation::npos || ob[v] == Tessellation::npos) {
      throw Error(ErrorCode::CoverageViolation, "vertex " + std::to_string(v) + " is missing from a tessellation",
                  "vertex", v);
    }
  }
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const auto& edge = graph.edge(e);
    const bool in_a = oa[edge.u] == oa[edge.v];
    const bool in_b = ob[edge.u] == ob[edge.v];
    if (in_a && in_b) {
      throw Error(ErrorCode::EdgeInBothTessellations,
                  "edge " + std::to_string(e) + " lies in both tessellations; no Szegedy form exists", "edge", e);
    }
    if (!in_a && !in_b) {
      throw Error(ErrorCode::CoverageViolation, "edge " + std::to_string(e) + " is covered by no polygon", "edge", e);
    }
  }

  StaggeredToSzegedy out;
  auto& s = out.spec;
  s.x_count = ta.polygons.size();
  s.y_count = tb.polygons.size();
  const auto m = static_cast<Eigen::Index>(s.x_count);
  const auto k = static_cast<Eigen::Index>(s.y_count);
  s.p = RealMatrix::Zero(m, k);
  s.q = RealMatrix::Zero(k, m);
  s.theta = RealMatrix::Zero(m, k);
  s.theta_prime = RealMatrix::Zero(m, k);
  s.sink.assign(s.x_count, false);

  std::vector<EdgePair> forward(n);
  std::map<EdgePair, std::size_t> seen;
  for (std::size_t v = 0; v < n; ++v) {
    const EdgePair xy{oa[v], ob[v]};
    if (auto [it, fresh] = seen.emplace(xy, v); !fresh) {
      throw Error(ErrorCode::PolygonIntersection,
                  "alpha polygon " + std::to_string(xy.first) + " and beta polygon " + std::to_string(xy.second) +
                      " share more than one vertex (" + std::to_string(it->second) + ", " + std::to_string(v) + ")",
                  "vertex", v);
    }
    forward[v] = xy;
    const auto ca = ta.polygons[xy.first].coefficient_of(v);
    const auto cb = tb.polygons[xy.second].coefficient_of(v);
    const auto xi = static_cast<Eigen::Index>(xy.first);
    const auto yi = static_cast<Eigen::Index>(xy.second);
    s.p(xi, yi) = std::norm(ca);
    s.q(yi, xi) = std::norm(cb);
    s.theta(xi, yi) = std::arg(ca);
    s.theta_prime(xi, yi) = std::arg(cb);
  }
  for (const auto& [xy, v] : seen) s.edges.push_back(xy);
  out.map = Bijection(std::move(forward), s.y_count);
  return out;
}

/// Staggered form of a Szegedy walk on the line graph. Sinks have no alpha
/// polygon, so alpha is partial whenever sinks exist.
struct SzegedyToStaggered {
  LabeledGraph line;
  Bijection map;
  Tessellation alpha;
  Tessellation beta;
  /// x of each alpha polygon
  std::vector<std::size_t> alpha_x;
};

inline SzegedyToStaggered szegedy_to_staggered(const BipartiteWalkSpec& spec, double tol = kDefaultTolerance) {
  spec.validate(tol);
  auto [line, f] = line_graph(spec);
  SzegedyToStaggered out{std::move(line), std::move(f), {}, {}, {}};
  const auto n = out.line.vertex_count();
  std::vector<std::vector<std::pair<std::size_t, Complex>>> a(spec.x_count), b(spec.y_count);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [x, y] = out.map[i];
    if (!spec.is_sink(x) && spec.p_at(x, y) > 0.0) {
      a[x].emplace_back(i, std::polar(std::sqrt(spec.p_at(x, y)), spec.theta_at(x, y)));
    }
    if (spec.q_at(y, x) > 0.0) b[y].emplace_back(i, std::polar(std::sqrt(spec.q_at(y, x)), spec.theta_prime_at(x, y)));
  }
  std::vector<Polygon> alpha, beta;
  for (std::size_t x = 0; x < spec.x_count; ++x) {
    if (a[x].empty()) continue;
    alpha.push_back(Polygon::from_entries(std::move(a[x])));
    out.alpha_x.push_back(x);
  }
  for (std::size_t y = 0; y < spec.y_count; ++y) {
    if (!b[y].empty()) beta.push_back(Polygon::from_entries(std::move(b[y])));
  }
  out.alpha = tessellation_of(reflection_from_polygons(n, std::move(alpha), tol), out.line);
  out.beta = tessellation_of(reflection_from_polygons(n, std::move(beta), tol), out.line);
  return out;
}

/// Coined walk on the |X|-multigraph equivalent to a Szegedy walk with
/// deg(y) = 2 and q in {0, 1/2}.
struct SzegedyToCoined {
  LabeledGraph graph;
  CoinAssignment coins;
  /// single coin C = 2|c><c| - I when every x has the same nonzero
  /// p-sequence (standard coined walk on a regular multigraph)
  std::optional<Matrix> regular_coin;
  /// arc index -> Szegedy product-basis index x * |Y| + y
  std::vector<std::size_t> basis_map;
  /// multigraph vertex of each x
  std::vector<std::size_t> x_to_vertex;
  LabeledGraph line;
  Bijection line_map;
};

namespace detail {

inline void check_coined_hypotheses(const BipartiteWalkSpec& spec, double tol) {
  const auto dy = spec.y_degrees();
  for (std::size_t y = 0; y < spec.y_count; ++y) {
    if (dy[y] != 2) {
      throw Error(ErrorCode::HypothesisViolated,
                  "y vertex " + std::to_string(y) + " has degree " + std::to_string(dy[y]) + " (degree 2 required)",
                  "y", y);
    }
    for (std::size_t x = 0; x < spec.x_count; ++x) {
      const double q = spec.q_at(y, x);
      if (q != 0.0 && std::abs(q - 0.5) > tol) {
        throw Error(ErrorCode::HypothesisViolated,
                    "q[" + std::to_string(y) + "][" + std::to_string(x) + "] is neither 0 nor 1/2", "y", y);
      }
    }
  }
  for (std::size_t k = 0; k < spec.edges.size(); ++k) {
    const auto [x, y] = spec.edges[k];
    if (std::abs(spec.theta_prime_at(x, y)) > tol) {
      throw Error(ErrorCode::HypothesisViolated, "nonzero Y-side phase on edge " + std::to_string(k), "edge", k);
    }
  }
  const auto dx = spec.x_degrees();
  for (std::size_t x = 0; x < spec.x_count; ++x) {
    if (dx[x] == 0) throw Error(ErrorCode::HypothesisViolated, "x vertex " + std::to_string(x) + " is isolated", "x", x);
  }
}

}  // namespace detail

/// Builds L(Gamma), contracts each alpha clique {f(x, y) : y ~ x} to the
/// vertex x, and reads the coin block C_x = 2 M_x - I off the alpha_x
/// projector. Arc labels at x follow ascending y. Sink rows (all-zero p)
/// become -I blocks.
inline SzegedyToCoined szegedy_to_coined(const BipartiteWalkSpec& spec, double tol = kDefaultTolerance) {
  spec.validate(tol);
  detail::check_coined_hypotheses(spec, tol);
  auto [line, f] = line_graph(spec);

  Tessellation cliques;
  cliques.vertex_count = line.vertex_count();
  {
    std::vector<std::vector<std::size_t>> support(spec.x_count);
    for (std::size_t i = 0; i < f.size(); ++i) support[f[i].first].push_back(i);
    for (auto& s : support) cliques.polygons.push_back(Polygon::uniform(std::move(s)));
  }
  auto contraction = contract_cliques_to_multigraph(line, cliques);
  if (contraction.vertex_to_arc.empty()) {
    throw Error(ErrorCode::HypothesisViolated, "line-graph vertices do not pair up through Y");
  }

  SzegedyToCoined out;
  out.x_to_vertex = contraction.polygon_to_vertex;
  std::vector<std::size_t> arc_to_line(line.vertex_count());
  for (std::size_t i = 0; i < line.vertex_count(); ++i) arc_to_line[contraction.vertex_to_arc[i]] = i;
  for (auto i : arc_to_line) out.basis_map.push_back(spec.index(f[i].first, f[i].second));

  const auto& g = contraction.graph;
  std::vector<Matrix> blocks(g.vertex_count());
  std::vector<std::optional<Vector>> amplitudes(g.vertex_count());
  for (std::size_t x = 0; x < spec.x_count; ++x) {
    const auto v = out.x_to_vertex[x];
    const auto d = static_cast<Eigen::Index>(g.degree(v));
    if (spec.is_sink(x)) {
      blocks[v] = -Matrix::Identity(d, d);
      continue;
    }
    Vector a(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto [ex, y] = f[arc_to_line[g.arc_offset(v) + static_cast<std::size_t>(j)]];
      a(j) = std::polar(std::sqrt(spec.p_at(ex, y)), spec.theta_at(ex, y));
    }
    blocks[v] = 2.0 * a * a.adjoint() - Matrix::Identity(d, d);
    amplitudes[v] = std::move(a);
  }
  out.coins = CoinAssignment(std::move(blocks));

  bool regular = g.vertex_count() > 0 && amplitudes[0].has_value();
  for (std::size_t v = 1; v < g.vertex_count() && regular; ++v) {
    regular = amplitudes[v] && amplitudes[v]->size() == amplitudes[0]->size() &&
              (*amplitudes[v] - *amplitudes[0]).cwiseAbs().maxCoeff() <= tol;
  }
  if (regular) out.regular_coin = out.coins.block(0);

  out.graph = g;
  out.line = std::move(line);
  out.line_map = std::move(f);
  return out;
}

/// Szegedy search (sinks in X) to coined search: convert the sink-free walk,
/// then put -I on every vertex that came from a sink.
inline SzegedyToCoined szegedy_search_to_coined(const BipartiteWalkSpec& spec, double tol = kDefaultTolerance) {
  spec.validate(tol);
  BipartiteWalkSpec presink = spec;
  const auto dx = spec.x_degrees();
  for (std::size_t x = 0; x < spec.x_count; ++x) {
    if (!spec.is_sink(x) || dx[x] == 0) continue;
    presink.sink[x] = false;
    for (const auto& [ex, y] : spec.edges) {
      if (ex == x) presink.p(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = 1.0 / static_cast<double>(dx[x]);
    }
  }
  auto out = szegedy_to_coined(presink, tol);
  bool any_sink = false;
  for (std::size_t x = 0; x < spec.x_count; ++x) {
    if (!spec.is_sink(x)) continue;
    any_sink = true;
    auto& block = out.coins.block(out.x_to_vertex[x]);
    block = -Matrix::Identity(block.rows(), block.cols());
  }
  if (any_sink) out.regular_coin.reset();
  return out;
}

}  // namespace qwalk
