#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/errors.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/linalg.hpp"
#include "qwalk/reflection.hpp"

namespace qwalk {

/// Per-vertex coin blocks; C' is their direct sum in vertex order.
class CoinAssignment {
 public:
  CoinAssignment() = default;
  explicit CoinAssignment(std::vector<Matrix> blocks) : blocks_(std::move(blocks)) {}

  /// Same d x d coin at every vertex of a d-regular graph (I (x) C).
  static CoinAssignment uniform(const LabeledGraph& graph, const Matrix& coin) {
    if (!graph.is_regular()) throw Error(ErrorCode::InvalidInput, "a single coin needs a regular graph");
    return CoinAssignment(std::vector<Matrix>(graph.vertex_count(), coin));
  }

  /// Grover(d_v) at every vertex; isolated vertices get an empty block.
  static CoinAssignment grover(const LabeledGraph& graph) {
    std::vector<Matrix> blocks;
    for (std::size_t v = 0; v < graph.vertex_count(); ++v) {
      const auto d = graph.degree(v);
      blocks.push_back(d == 0 ? Matrix(0, 0) : grover_coin(d).matrix());
    }
    return CoinAssignment(std::move(blocks));
  }

  std::size_t size() const { return blocks_.size(); }
  const std::vector<Matrix>& blocks() const { return blocks_; }
  const Matrix& block(std::size_t v) const { return blocks_.at(v); }
  Matrix& block(std::size_t v) { return blocks_.at(v); }

  Matrix direct_sum() const { return qwalk::direct_sum(blocks_); }

  void validate(const LabeledGraph& graph, double tol = kUnitarityTolerance) const {
    if (blocks_.size() != graph.vertex_count()) {
      throw Error(ErrorCode::DimensionMismatch, "need one coin block per vertex");
    }
    for (std::size_t v = 0; v < blocks_.size(); ++v) {
      const auto& b = blocks_[v];
      if (static_cast<std::size_t>(b.rows()) != graph.degree(v) || !is_square(b)) {
        throw Error(ErrorCode::DimensionMismatch,
                    "coin block at vertex " + std::to_string(v) + " does not match its degree", "vertex", v);
      }
      if (!is_unitary(b, tol)) {
        throw Error(ErrorCode::NotUnitary, "coin block at vertex " + std::to_string(v) + " is not unitary", "vertex",
                    v);
      }
    }
  }

 private:
  std::vector<Matrix> blocks_;
};

enum class BasisKind { Coined, Szegedy, Staggered };

inline const char* to_string(BasisKind k) {
  switch (k) {
    case BasisKind::Coined: return "coined";
    case BasisKind::Szegedy: return "szegedy";
    case BasisKind::Staggered: return "staggered";
  }
  return "unknown";
}

/// Amplitudes over a model's computational basis. `labels[i]` is (v, j) for
/// coined, (x, y) for Szegedy and (vertex, position) for staggered bases;
/// `position[i]` is the classical position that basis state is counted under.
struct WalkState {
  Vector amplitudes;
  BasisKind kind = BasisKind::Coined;
  std::vector<EdgePair> labels;
  std::vector<std::size_t> position;
  std::size_t position_count = 0;

  std::size_t dimension() const { return static_cast<std::size_t>(amplitudes.size()); }
  double norm() const { return amplitudes.norm(); }

  static WalkState coined(const LabeledGraph& graph, Vector amplitudes) {
    WalkState s;
    s.kind = BasisKind::Coined;
    s.position_count = graph.vertex_count();
    for (std::size_t a = 0; a < graph.arc_count(); ++a) {
      s.labels.push_back(graph.arc(a));
      s.position.push_back(graph.arc_tail(a));
    }
    s.amplitudes = std::move(amplitudes);
    s.check_size();
    return s;
  }

  static WalkState szegedy(std::size_t x_count, std::size_t y_count, Vector amplitudes) {
    WalkState s;
    s.kind = BasisKind::Szegedy;
    s.position_count = x_count;
    for (std::size_t x = 0; x < x_count; ++x) {
      for (std::size_t y = 0; y < y_count; ++y) {
        s.labels.emplace_back(x, y);
        s.position.push_back(x);
      }
    }
    s.amplitudes = std::move(amplitudes);
    s.check_size();
    return s;
  }

  /// Staggered basis; `groups` optionally maps each vertex to a coarser
  /// position (e.g. the coined vertex an expanded clique came from).
  static WalkState staggered(std::size_t vertex_count, Vector amplitudes,
                             std::optional<std::vector<std::size_t>> groups = std::nullopt) {
    WalkState s;
    s.kind = BasisKind::Staggered;
    if (groups) {
      if (groups->size() != vertex_count) throw Error(ErrorCode::DimensionMismatch, "one group per vertex required");
      s.position = *groups;
      for (auto g : s.position) s.position_count = std::max(s.position_count, g + 1);
    } else {
      for (std::size_t v = 0; v < vertex_count; ++v) s.position.push_back(v);
      s.position_count = vertex_count;
    }
    for (std::size_t v = 0; v < vertex_count; ++v) s.labels.emplace_back(v, s.position[v]);
    s.amplitudes = std::move(amplitudes);
    s.check_size();
    return s;
  }

  WalkState with_amplitudes(Vector amps) const {
    WalkState s = *this;
    s.amplitudes = std::move(amps);
    s.check_size();
    return s;
  }

 private:
  void check_size() const {
    if (static_cast<std::size_t>(amplitudes.size()) != labels.size()) {
      throw Error(ErrorCode::DimensionMismatch, "amplitude count differs from basis size");
    }
  }
};

/// Flip-flop shift S|v,j> = |v',j'>, a permutation with S^2 = I. Its
/// (+1)-polygons are the matched arc pairs, ordered by smaller arc index.
inline ReflectionOperator shift_operator(const LabeledGraph& graph) {
  const auto n = static_cast<Eigen::Index>(graph.arc_count());
  Matrix s = Matrix::Zero(n, n);
  std::vector<Polygon> polys;
  for (std::size_t a = 0; a < graph.arc_count(); ++a) {
    const auto b = graph.mate(a);
    s(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = 1.0;
    if (a < b) polys.push_back(Polygon::uniform({a, b}));
  }
  return ReflectionBuilder::make(std::move(s), std::move(polys), ReflectionKind::Orthogonal);
}

/// U = S C' in the vertex-major arc basis.
inline Matrix coined_evolution(const LabeledGraph& graph, const CoinAssignment& coins) {
  coins.validate(graph);
  return shift_operator(graph).matrix() * coins.direct_sum();
}

/// phi_x for every non-sink x (in x order) and psi_y for every y, as sparse
/// vectors over the x-major product basis |x,y> -> x * |Y| + y.
struct SzegedyVectors {
  std::vector<std::size_t> phi_owner;
  std::vector<Polygon> phi;
  std::vector<Polygon> psi;

  std::vector<Vector> dense_phi(std::size_t dim) const {
    std::vector<Vector> out;
    for (const auto& p : phi) out.push_back(p.dense(dim));
    return out;
  }
  std::vector<Vector> dense_psi(std::size_t dim) const {
    std::vector<Vector> out;
    for (const auto& p : psi) out.push_back(p.dense(dim));
    return out;
  }
};

inline SzegedyVectors szegedy_vectors(const BipartiteWalkSpec& spec, double tol = kDefaultTolerance) {
  spec.validate(tol);
  SzegedyVectors out;
  auto edges = spec.edges;
  std::sort(edges.begin(), edges.end());
  for (std::size_t x = 0; x < spec.x_count; ++x) {
    if (spec.is_sink(x)) continue;
    std::vector<std::pair<std::size_t, Complex>> entries;
    for (const auto& [ex, y] : edges) {
      if (ex != x || spec.p_at(x, y) == 0.0) continue;
      entries.emplace_back(spec.index(x, y), std::polar(std::sqrt(spec.p_at(x, y)), spec.theta_at(x, y)));
    }
    out.phi_owner.push_back(x);
    out.phi.push_back(Polygon::from_entries(std::move(entries)));
  }
  for (std::size_t y = 0; y < spec.y_count; ++y) {
    std::vector<std::pair<std::size_t, Complex>> entries;
    for (const auto& [x, ey] : edges) {
      if (ey != y || spec.q_at(y, x) == 0.0) continue;
      entries.emplace_back(spec.index(x, y), std::polar(std::sqrt(spec.q_at(y, x)), spec.theta_prime_at(x, y)));
    }
    out.psi.push_back(Polygon::from_entries(std::move(entries)));
  }
  return out;
}

/// R0 = 2 sum_x |phi_x><phi_x| - I and R1 = 2 sum_y |psi_y><psi_y| - I.
inline std::pair<ReflectionOperator, ReflectionOperator> szegedy_reflections(const BipartiteWalkSpec& spec,
                                                                             double tol = kDefaultTolerance) {
  auto vecs = szegedy_vectors(spec, tol);
  const auto dim = spec.dimension();
  return {reflection_from_polygons(dim, std::move(vecs.phi), tol),
          reflection_from_polygons(dim, std::move(vecs.psi), tol)};
}

/// W = R1 R0 on the |X||Y|-dimensional product space. Non-edge basis states
/// are fixed points (both reflections send them to their negative).
inline Matrix szegedy_evolution(const BipartiteWalkSpec& spec, double tol = kDefaultTolerance) {
  auto [r0, r1] = szegedy_reflections(spec, tol);
  return r1.matrix() * r0.matrix();
}

enum class StaggeredDefinition {
  Standard,     // both orthogonal; the two tessellations cover every edge
  Generalized,  // one partial reflection; the polygons cover every vertex
};

struct StaggeredEvolution {
  Matrix matrix;
  StaggeredDefinition definition = StaggeredDefinition::Standard;
  Tessellation t0;
  Tessellation t1;
};

/// U = U1 U0 after checking both reflections tessellate `graph` and the
/// coverage condition that applies to their kinds.
inline StaggeredEvolution staggered_evolution(const ReflectionOperator& u0, const ReflectionOperator& u1,
                                              const LabeledGraph& graph) {
  if (u0.dimension() != u1.dimension()) throw Error(ErrorCode::DimensionMismatch, "reflections differ in size");
  StaggeredEvolution out;
  out.t0 = tessellation_of(u0, graph);
  out.t1 = tessellation_of(u1, graph);
  const bool p0 = u0.kind() == ReflectionKind::Partial;
  const bool p1 = u1.kind() == ReflectionKind::Partial;
  if (p0 && p1) {
    throw Error(ErrorCode::CoverageViolation, "at most one of the two reflections may be partial");
  }
  if (!p0 && !p1) {
    std::vector<bool> covered(graph.edge_count(), false);
    for (auto e : out.t0.covered_edges) covered[e] = true;
    for (auto e : out.t1.covered_edges) covered[e] = true;
    std::string missing;
    std::optional<std::size_t> first;
    for (std::size_t e = 0; e < covered.size(); ++e) {
      if (covered[e]) continue;
      if (!first) first = e;
      missing += (missing.empty() ? "" : ",") + std::to_string(e);
    }
    if (first) throw Error(ErrorCode::CoverageViolation, "edges not covered by either tessellation: " + missing, "edge", first);
    out.definition = StaggeredDefinition::Standard;
  } else {
    std::vector<bool> covered(graph.vertex_count(), false);
    for (const auto* t : {&out.t0, &out.t1}) {
      for (const auto& poly : t->polygons) {
        for (auto v : poly.support) covered[v] = true;
      }
    }
    for (std::size_t v = 0; v < covered.size(); ++v) {
      if (!covered[v]) throw Error(ErrorCode::CoverageViolation, "vertex not covered by any polygon", "vertex", v);
    }
    out.definition = StaggeredDefinition::Generalized;
  }
  out.matrix = u1.matrix() * u0.matrix();
  return out;
}

inline WalkState evolve(const Matrix& u, const WalkState& psi0, std::size_t steps) {
  if (static_cast<std::size_t>(u.rows()) != psi0.dimension() || !is_square(u)) {
    throw Error(ErrorCode::DimensionMismatch, "operator and state dimensions differ");
  }
  Vector v = psi0.amplitudes;
  for (std::size_t t = 0; t < steps; ++t) v = u * v;
  return psi0.with_amplitudes(std::move(v));
}

/// Probability of each classical position (coined vertex, Szegedy x, or
/// staggered group).
inline std::vector<double> vertex_probabilities(const WalkState& state) {
  std::vector<double> out(state.position_count, 0.0);
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    out[state.position[i]] += std::norm(state.amplitudes(static_cast<Eigen::Index>(i)));
  }
  return out;
}

/// Position distribution for t = 0..steps.
inline std::vector<std::vector<double>> probability_trace(const Matrix& u, const WalkState& psi0, std::size_t steps) {
  if (static_cast<std::size_t>(u.rows()) != psi0.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "operator and state dimensions differ");
  }
  std::vector<std::vector<double>> rows;
  WalkState s = psi0;
  for (std::size_t t = 0; t <= steps; ++t) {
    rows.push_back(vertex_probabilities(s));
    if (t < steps) s.amplitudes = u * s.amplitudes;
  }
  return rows;
}

}  // namespace qwalk
