#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qwalk/errors.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/linalg.hpp"
#include "qwalk/polygon.hpp"

namespace qwalk {

enum class ReflectionKind { Orthogonal, Partial };

inline const char* to_string(ReflectionKind k) {
  return k == ReflectionKind::Orthogonal ? "orthogonal" : "partial";
}

/// Hermitian involution U = 2 sum_k |w_k><w_k| - I whose (+1)-eigenbasis
/// {w_k} has pairwise disjoint supports. Orthogonal when the supports cover
/// every index, Partial otherwise. Only built through the factories below.
class ReflectionOperator {
 public:
  const Matrix& matrix() const { return matrix_; }
  const std::vector<Polygon>& polygons() const { return polygons_; }
  ReflectionKind kind() const { return kind_; }
  std::size_t dimension() const { return static_cast<std::size_t>(matrix_.rows()); }

 private:
  ReflectionOperator(Matrix m, std::vector<Polygon> polys, ReflectionKind k)
      : matrix_(std::move(m)), polygons_(std::move(polys)), kind_(k) {}

  friend ReflectionOperator reflection_from_polygons(std::size_t, std::vector<Polygon>, double);
  friend struct ReflectionBuilder;

  Matrix matrix_;
  std::vector<Polygon> polygons_;
  ReflectionKind kind_;
};

namespace detail {

// first support entry made real positive
inline void normalize_phase(Polygon& p) {
  if (p.coefficients.empty()) return;
  const auto first = p.coefficients.front();
  const auto mag = std::abs(first);
  if (mag == 0.0) return;
  const auto rot = std::conj(first) / mag;
  for (auto& c : p.coefficients) c *= rot;
  p.coefficients.front() = Complex(std::abs(first), 0.0);
}

}  // namespace detail

/// 2 sum |w><w| - I for polygons with disjoint supports and unit norm.
inline ReflectionOperator reflection_from_polygons(std::size_t n, std::vector<Polygon> polygons,
                                                   double tol = kDefaultTolerance) {
  std::vector<int> used(n, 0);
  std::size_t covered = 0;
  for (std::size_t k = 0; k < polygons.size(); ++k) {
    auto& poly = polygons[k];
    if (poly.support.empty() || poly.support.size() != poly.coefficients.size()) {
      throw Error(ErrorCode::InvalidInput, "malformed polygon", "polygon", k);
    }
    for (std::size_t i = 0; i < poly.support.size(); ++i) {
      const auto v = poly.support[i];
      if (v >= n) throw Error(ErrorCode::InvalidInput, "polygon index out of range", "polygon", k);
      if (i > 0 && poly.support[i - 1] >= v) {
        throw Error(ErrorCode::InvalidInput, "polygon support must be strictly increasing", "polygon", k);
      }
      if (used[v]++ != 0) {
        throw Error(ErrorCode::OverlappingPolygons, "polygon supports overlap at index " + std::to_string(v),
                    "polygon", k);
      }
      if (std::abs(poly.coefficients[i]) <= tol) {
        throw Error(ErrorCode::InvalidInput, "zero coefficient inside a polygon support", "polygon", k);
      }
    }
    if (std::abs(poly.norm() - 1.0) > tol) {
      throw Error(ErrorCode::NonUnitPolygon, "polygon vector is not unit norm", "polygon", k);
    }
    detail::normalize_phase(poly);
    covered += poly.size();
  }
  const auto dim = static_cast<Eigen::Index>(n);
  Matrix m = -Matrix::Identity(dim, dim);
  for (const auto& poly : polygons) {
    for (std::size_t a = 0; a < poly.size(); ++a) {
      for (std::size_t b = 0; b < poly.size(); ++b) {
        m(static_cast<Eigen::Index>(poly.support[a]), static_cast<Eigen::Index>(poly.support[b])) +=
            2.0 * poly.coefficients[a] * std::conj(poly.coefficients[b]);
      }
    }
  }
  const auto kind = covered == n ? ReflectionKind::Orthogonal : ReflectionKind::Partial;
  return ReflectionOperator(std::move(m), std::move(polygons), kind);
}

/// Dense-vector form; the support of each vector is its entries above `tol`.
inline ReflectionOperator reflection_from_vectors(std::size_t n, std::span<const Vector> vectors,
                                                  double tol = kDefaultTolerance) {
  std::vector<Polygon> polys;
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    if (static_cast<std::size_t>(vectors[k].size()) != n) {
      throw Error(ErrorCode::DimensionMismatch, "vector length differs from dimension", "polygon", k);
    }
    Polygon p;
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = vectors[k](static_cast<Eigen::Index>(i));
      if (std::abs(c) > tol) {
        p.support.push_back(i);
        p.coefficients.push_back(c);
      }
    }
    if (p.support.empty()) throw Error(ErrorCode::NonUnitPolygon, "zero vector", "polygon", k);
    polys.push_back(std::move(p));
  }
  return reflection_from_polygons(n, std::move(polys), tol);
}

struct ReflectionBuilder {
  static ReflectionOperator make(Matrix m, std::vector<Polygon> p, ReflectionKind k) {
    return ReflectionOperator(std::move(m), std::move(p), k);
  }
};

/// Grover diffusion 2|u><u| - I with u uniform over d directions. Entries are
/// written directly (2/d - 1 and 2/d) so small cases are exact.
inline ReflectionOperator grover_coin(std::size_t d) {
  if (d == 0) throw Error(ErrorCode::InvalidInput, "Grover coin needs dimension >= 1");
  const auto n = static_cast<Eigen::Index>(d);
  const double off = 2.0 / static_cast<double>(d);
  Matrix m = Matrix::Constant(n, n, Complex(off, 0.0));
  m.diagonal().setConstant(Complex(off - 1.0, 0.0));
  std::vector<std::size_t> all(d);
  for (std::size_t i = 0; i < d; ++i) all[i] = i;
  return ReflectionBuilder::make(std::move(m), {Polygon::uniform(std::move(all))}, ReflectionKind::Orthogonal);
}

inline ReflectionOperator minus_identity(std::size_t n) { return reflection_from_polygons(n, {}); }

inline ReflectionOperator identity_reflection(std::size_t n) {
  std::vector<Polygon> polys;
  for (std::size_t i = 0; i < n; ++i) polys.push_back(Polygon::uniform({i}));
  return reflection_from_polygons(n, std::move(polys));
}

struct NotReflection {
  std::string reason;
};

using Classification = std::variant<ReflectionOperator, NotReflection>;

/// Recovers the disjoint-support (+1)-eigenbasis of a Hermitian involution.
///
/// The projector P = (U + I) / 2 is split into connected components of its
/// nonzero pattern. A component must be a rank-1 block, tested through the
/// 2x2 minors against the largest diagonal entry; its column through that
/// pivot, scaled by 1/sqrt(pivot), is the polygon vector. Components where P
/// vanishes contribute no polygon.
inline Classification classify_reflection(const Matrix& u, double tol = kDefaultTolerance) {
  if (!is_square(u)) return NotReflection{"matrix is not square"};
  if (!is_hermitian(u, tol)) return NotReflection{"matrix is not Hermitian"};
  if (!is_involution(u, tol)) return NotReflection{"matrix does not square to the identity"};

  const auto n = static_cast<std::size_t>(u.rows());
  const Matrix proj = (u + Matrix::Identity(u.rows(), u.cols())) * 0.5;
  auto at = [&](std::size_t i, std::size_t j) {
    return proj(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };

  std::vector<std::size_t> comp(n, n);
  std::vector<Polygon> polygons;
  std::size_t covered = 0;
  for (std::size_t start = 0; start < n; ++start) {
    if (comp[start] != n) continue;
    std::vector<std::size_t> members{start};
    comp[start] = start;
    for (std::size_t head = 0; head < members.size(); ++head) {
      const auto i = members[head];
      for (std::size_t j = 0; j < n; ++j) {
        if (comp[j] == n && std::abs(at(i, j)) > tol) {
          comp[j] = start;
          members.push_back(j);
        }
      }
    }
    std::sort(members.begin(), members.end());

    std::size_t pivot = members.front();
    for (auto i : members) {
      if (at(i, i).real() > at(pivot, pivot).real()) pivot = i;
    }
    const double pivot_value = at(pivot, pivot).real();
    if (pivot_value <= tol) {
      if (members.size() > 1) return NotReflection{"projector block with vanishing diagonal"};
      continue;
    }
    for (auto i : members) {
      for (auto j : members) {
        const auto minor = at(i, j) * at(pivot, pivot) - at(i, pivot) * at(pivot, j);
        if (std::abs(minor) > tol) {
          return NotReflection{"(+1)-eigenspace has no basis with disjoint supports (block rank >= 2 at index " +
                               std::to_string(members.front()) + ")"};
        }
      }
    }
    Polygon poly;
    const double scale = 1.0 / std::sqrt(pivot_value);
    for (auto i : members) {
      const auto c = at(i, pivot) * scale;
      if (std::abs(c) <= tol) return NotReflection{"polygon vector has a zero entry on its support"};
      poly.support.push_back(i);
      poly.coefficients.push_back(c);
    }
    if (std::abs(poly.norm() - 1.0) > std::sqrt(tol)) {
      return NotReflection{"projector block is not a unit-trace rank-1 projector"};
    }
    detail::normalize_phase(poly);
    covered += poly.size();
    polygons.push_back(std::move(poly));
  }
  const auto kind = covered == n ? ReflectionKind::Orthogonal : ReflectionKind::Partial;
  return ReflectionBuilder::make(u, std::move(polygons), kind);
}

/// Throwing wrapper used where a reflection is a hard requirement.
inline ReflectionOperator require_reflection(const Matrix& u, double tol = kDefaultTolerance) {
  auto c = classify_reflection(u, tol);
  if (auto* bad = std::get_if<NotReflection>(&c)) throw Error(ErrorCode::NotReflection, bad->reason);
  return std::get<ReflectionOperator>(std::move(c));
}

/// Validates that every polygon of `refl` is a clique of `graph` and reports
/// the edges lying inside a polygon.
inline Tessellation tessellation_of(const ReflectionOperator& refl, const LabeledGraph& graph) {
  if (refl.dimension() != graph.vertex_count()) {
    throw Error(ErrorCode::DimensionMismatch, "reflection dimension differs from vertex count");
  }
  Tessellation t;
  t.vertex_count = graph.vertex_count();
  t.polygons = refl.polygons();
  for (std::size_t k = 0; k < t.polygons.size(); ++k) {
    const auto& s = t.polygons[k].support;
    for (std::size_t a = 0; a < s.size(); ++a) {
      for (std::size_t b = a + 1; b < s.size(); ++b) {
        if (!graph.adjacent(s[a], s[b])) {
          throw Error(ErrorCode::NotClique,
                      "polygon " + std::to_string(k) + " is not a clique: vertices " + std::to_string(s[a]) +
                          " and " + std::to_string(s[b]) + " are not adjacent",
                      "polygon", k);
        }
      }
    }
  }
  const auto owner = t.owner();
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const auto& edge = graph.edge(e);
    if (owner[edge.u] != Tessellation::npos && owner[edge.u] == owner[edge.v]) t.covered_edges.push_back(e);
  }
  return t;
}

/// Graph Gamma_U induced by the polygons: each support becomes a clique.
inline LabeledGraph induced_graph(const ReflectionOperator& refl) {
  std::vector<Edge> edges;
  for (const auto& poly : refl.polygons()) {
    for (std::size_t a = 0; a < poly.size(); ++a) {
      for (std::size_t b = a + 1; b < poly.size(); ++b) edges.push_back({poly.support[a], poly.support[b]});
    }
  }
  return LabeledGraph::from_edges(refl.dimension(), std::move(edges));
}

}  // namespace qwalk
