#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "qwalk/linalg.hpp"

namespace qwalk {

/// Sparse unit vector over a vertex basis. `support` is strictly increasing and
/// `coefficients[k]` is the amplitude on vertex `support[k]`.
struct Polygon {
  std::vector<std::size_t> support;
  std::vector<Complex> coefficients;

  std::size_t size() const { return support.size(); }
  std::size_t min_vertex() const { return support.front(); }

  bool contains(std::size_t vertex) const {
    return std::binary_search(support.begin(), support.end(), vertex);
  }

  Complex coefficient_of(std::size_t vertex) const {
    auto it = std::lower_bound(support.begin(), support.end(), vertex);
    if (it == support.end() || *it != vertex) return {0.0, 0.0};
    return coefficients[static_cast<std::size_t>(it - support.begin())];
  }

  double norm() const {
    double s = 0.0;
    for (const auto& c : coefficients) s += std::norm(c);
    return std::sqrt(s);
  }

  Vector dense(std::size_t dimension) const {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(dimension));
    for (std::size_t k = 0; k < support.size(); ++k) {
      v(static_cast<Eigen::Index>(support[k])) = coefficients[k];
    }
    return v;
  }

  /// Equal-weight polygon over `vertices` (need not be sorted).
  static Polygon uniform(std::vector<std::size_t> vertices) {
    std::sort(vertices.begin(), vertices.end());
    Polygon p;
    const double a = 1.0 / std::sqrt(static_cast<double>(vertices.size()));
    p.coefficients.assign(vertices.size(), Complex(a, 0.0));
    p.support = std::move(vertices);
    return p;
  }

  /// Polygon from (vertex, amplitude) entries; sorts by vertex.
  static Polygon from_entries(std::vector<std::pair<std::size_t, Complex>> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Polygon p;
    for (const auto& [vertex, amp] : entries) {
      p.support.push_back(vertex);
      p.coefficients.push_back(amp);
    }
    return p;
  }
};

/// Family of polygons with pairwise disjoint supports over `vertex_count`
/// vertices, together with the ids of the target-graph edges it covers.
struct Tessellation {
  std::size_t vertex_count = 0;
  std::vector<Polygon> polygons;
  std::vector<std::size_t> covered_edges;

  /// polygon index for each vertex, or npos when the vertex is uncovered
  std::vector<std::size_t> owner() const {
    std::vector<std::size_t> out(vertex_count, npos);
    for (std::size_t k = 0; k < polygons.size(); ++k) {
      for (auto vtx : polygons[k].support) out[vtx] = k;
    }
    return out;
  }

  bool covers_all_vertices() const {
    std::size_t covered = 0;
    for (const auto& p : polygons) covered += p.size();
    return covered == vertex_count;
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

}  // namespace qwalk
