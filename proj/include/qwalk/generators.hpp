#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "qwalk/errors.hpp"
#include "qwalk/graph.hpp"

namespace qwalk::generators {

inline LabeledGraph path(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t v = 0; v + 1 < n; ++v) e.push_back({v, v + 1});
  return LabeledGraph::from_edges(n, std::move(e));
}

inline LabeledGraph cycle(std::size_t n) {
  if (n < 3) throw Error(ErrorCode::InvalidInput, "cycle needs at least 3 vertices");
  std::vector<Edge> e;
  for (std::size_t v = 0; v < n; ++v) e.push_back({v, (v + 1) % n});
  return LabeledGraph::from_edges(n, std::move(e));
}

inline LabeledGraph complete(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) e.push_back({a, b});
  }
  return LabeledGraph::from_edges(n, std::move(e));
}

/// rows x cols lattice with periodic boundaries; vertex r * cols + c. Each
/// vertex contributes its right edge, then its down edge.
inline LabeledGraph torus(std::size_t rows, std::size_t cols) {
  if (rows < 3 || cols < 3) throw Error(ErrorCode::InvalidInput, "torus sides must be at least 3 to stay simple");
  std::vector<Edge> e;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const auto v = r * cols + c;
      e.push_back({v, r * cols + (c + 1) % cols});
      e.push_back({v, ((r + 1) % rows) * cols + c});
    }
  }
  return LabeledGraph::from_edges(rows * cols, std::move(e));
}

/// Triangle 1-2-3 with a pendant vertex 0 on 1 (degrees 1, 3, 2, 2).
inline LabeledGraph paw() { return LabeledGraph::from_edges(4, {{0, 1}, {1, 2}, {1, 3}, {2, 3}}); }

/// Random simple d-regular graph by the pairing model with rejection.
inline LabeledGraph random_regular(std::size_t n, std::size_t d, std::uint64_t seed) {
  if ((n * d) % 2 != 0 || d >= n) throw Error(ErrorCode::InvalidInput, "no simple d-regular graph with these sizes");
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<std::size_t> stubs;
    for (std::size_t v = 0; v < n; ++v) stubs.insert(stubs.end(), d, v);
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::vector<Edge> e;
    bool ok = true;
    for (std::size_t i = 0; i < stubs.size() && ok; i += 2) {
      const Edge cand{std::min(stubs[i], stubs[i + 1]), std::max(stubs[i], stubs[i + 1])};
      ok = !cand.is_loop() && std::find(e.begin(), e.end(), cand) == e.end();
      e.push_back(cand);
    }
    if (!ok) continue;
    std::sort(e.begin(), e.end(), [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
    return LabeledGraph::from_edges(n, std::move(e));
  }
  throw Error(ErrorCode::InvalidInput, "pairing model did not produce a simple graph");
}

/// Bipartite walk satisfying the coined-conversion hypotheses: every y has
/// degree 2 with q = 1/2, the x side is connected, p is random positive.
/// Parallel y's between the same pair of x's are allowed.
inline BipartiteWalkSpec random_degree_two_bipartite(std::size_t x_count, std::size_t y_count, std::uint64_t seed) {
  if (x_count < 2 || y_count + 1 < x_count) {
    throw Error(ErrorCode::InvalidInput, "need at least |X| - 1 y vertices to connect X");
  }
  std::mt19937_64 rng(seed);
  std::vector<std::pair<std::size_t, std::size_t>> joins;  // (x1, x2) per y
  for (std::size_t x = 1; x < x_count; ++x) {
    std::uniform_int_distribution<std::size_t> pick(0, x - 1);
    joins.emplace_back(pick(rng), x);
  }
  std::uniform_int_distribution<std::size_t> any(0, x_count - 1);
  while (joins.size() < y_count) {
    const auto a = any(rng);
    const auto b = any(rng);
    if (a != b) joins.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::shuffle(joins.begin(), joins.end(), rng);

  std::vector<EdgePair> edges;
  for (std::size_t y = 0; y < joins.size(); ++y) {
    edges.emplace_back(joins[y].first, y);
    edges.emplace_back(joins[y].second, y);
  }
  auto spec = BipartiteWalkSpec::uniform(x_count, y_count, edges);
  std::uniform_real_distribution<double> weight(0.1, 1.0);
  for (std::size_t x = 0; x < x_count; ++x) {
    double total = 0.0;
    for (const auto& [ex, y] : edges) {
      if (ex != x) continue;
      const double w = weight(rng);
      spec.p(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = w;
      total += w;
    }
    spec.p.row(static_cast<Eigen::Index>(x)) /= total;
  }
  return spec;
}

}  // namespace qwalk::generators
