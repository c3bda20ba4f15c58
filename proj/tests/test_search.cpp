#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace qwalk;

namespace {

// Marked probability of abstract search on the 3x3 torus, vertex 4 marked,
// from an independent dense simulation.
constexpr double kReference[] = {0.1111111111111111, 0.1111111111111111, 0.4444444444444444,
                                 0.25, 0.5625, 0.04340277777777778};
constexpr double kReferenceAt30 = 0.6711532662595885;

struct ThreeTraces {
  ProbabilityTrace coined, staggered, szegedy;
};

ThreeTraces torus_traces(std::size_t steps) {
  const auto g = generators::torus(3, 3);
  const MarkedSet marked{4};
  const auto coin = abstract_search_coin(g, marked);
  ThreeTraces out;
  out.coined = success_probability_trace(coined_evolution(g, coin.coins), coined_search_state(g), marked, steps);

  const auto st = coined_to_staggered(g, coin.coins, {.allow_partial = true});
  const auto n = st.graph.vertex_count();
  const auto u = staggered_evolution(reflection_from_polygons(n, st.alpha.polygons),
                                     reflection_from_polygons(n, st.beta.polygons), st.graph);
  EXPECT_EQ(u.definition, StaggeredDefinition::Generalized);
  out.staggered = success_probability_trace(u.matrix, staggered_search_state(n, st.position), marked, steps);

  const auto cs = coined_search_to_szegedy(g, marked);
  out.szegedy = success_probability_trace(szegedy_evolution(cs.spec), szegedy_search_state(cs.presink),
                                          MarkedSet(cs.sinks), steps);
  return out;
}

}  // namespace

TEST(Search, CoinedTraceMatchesReference) {
  const auto t = torus_traces(30);
  for (std::size_t k = 0; k < 6; ++k) EXPECT_NEAR(t.coined.rows[k].p_marked, kReference[k], 1e-12) << k;
  EXPECT_NEAR(t.coined.rows[30].p_marked, kReferenceAt30, 1e-12);
  EXPECT_EQ(t.coined.argmax_t, 30u);
  EXPECT_EQ(t.coined.rows[0].p_marked, 1.0 / 9.0);
}

TEST(Search, ThreeModelsAgreeEntrywise) {
  const auto t = torus_traces(50);
  ASSERT_EQ(t.coined.rows.size(), 51u);
  for (std::size_t k = 0; k <= 50; ++k) {
    EXPECT_NEAR(t.staggered.rows[k].p_marked, t.coined.rows[k].p_marked, 1e-10) << k;
    EXPECT_NEAR(t.szegedy.rows[k].p_marked, t.coined.rows[k].p_marked, 1e-10) << k;
  }
  EXPECT_EQ(t.szegedy.argmax_t, t.coined.argmax_t);
}

TEST(Search, SzegedySideHasOneSinkAndPartialR0) {
  const auto g = generators::torus(3, 3);
  const auto cs = coined_search_to_szegedy(g, MarkedSet{4});
  ASSERT_EQ(cs.sinks.size(), 1u);
  EXPECT_EQ(cs.spec.x_count, 9u);
  EXPECT_EQ(cs.spec.y_count, 18u);
  EXPECT_TRUE(cs.spec.is_sink(cs.sinks[0]));
  const auto [r0, r1] = szegedy_reflections(cs.spec);
  EXPECT_EQ(r0.kind(), ReflectionKind::Partial);
  EXPECT_TRUE(is_unitary(szegedy_evolution(cs.spec), 1e-12));
  // completion clique: the four arcs of vertex 4 form the sink polygon
  EXPECT_EQ(cs.completed_graph.edge_count(), cs.staggered.graph.edge_count() + 6);
}

// Completion edges carry no polygon of the staggered walk: the generalized
// staggered operator on the uncompleted graph already equals W on the
// non-idle block.
TEST(Search, CompletionEdgesPlayNoRole) {
  const auto g = generators::torus(3, 3);
  const auto cs = coined_search_to_szegedy(g, MarkedSet{4});
  const auto& st = cs.staggered;
  const auto n = st.graph.vertex_count();
  const auto u = staggered_evolution(reflection_from_polygons(n, st.alpha.polygons),
                                     reflection_from_polygons(n, st.beta.polygons), st.graph);
  EXPECT_TRUE(verify_equivalence(u.matrix, szegedy_evolution(cs.spec), cs.map.basis_map(), 1e-12).verdict);
}

TEST(Search, SzegedySearchBackToCoined) {
  const auto g = generators::torus(3, 3);
  const auto cs = coined_search_to_szegedy(g, MarkedSet{4});
  const auto co = szegedy_search_to_coined(cs.spec);
  EXPECT_TRUE(oracle::isomorphic(co.graph, g));
  const auto v = co.x_to_vertex[cs.sinks[0]];
  EXPECT_EQ(max_abs_diff(co.coins.block(v), -Matrix::Identity(4, 4)), 0.0);
  for (std::size_t w = 0; w < co.graph.vertex_count(); ++w) {
    if (w != v) EXPECT_LE(max_abs_diff(co.coins.block(w), grover_coin(4).matrix()), 1e-12);
  }
  EXPECT_FALSE(co.regular_coin.has_value());
  EXPECT_TRUE(verify_equivalence(coined_evolution(co.graph, co.coins), szegedy_evolution(cs.spec), co.basis_map, 1e-12)
                  .verdict);
}

TEST(Search, NoMarkedVertexIsPlainGroverWalk) {
  const auto g = generators::cycle(5);
  const auto cs = coined_search_to_szegedy(g, MarkedSet{});
  EXPECT_TRUE(cs.sinks.empty());
  const auto u = coined_evolution(g, CoinAssignment::grover(g));
  EXPECT_TRUE(verify_equivalence(u, szegedy_evolution(cs.spec), cs.map.basis_map(), 1e-12).verdict);
}

TEST(Search, EveryVertexMarked) {
  const auto g = generators::cycle(4);
  MarkedSet all{0, 1, 2, 3};
  const auto coin = abstract_search_coin(g, all);
  const auto st = coined_to_staggered(g, coin.coins, {.allow_partial = true});
  EXPECT_TRUE(st.alpha.polygons.empty());
  const auto cs = coined_search_to_szegedy(g, all);
  EXPECT_EQ(cs.sinks.size(), 4u);
  for (std::size_t x = 0; x < cs.spec.x_count; ++x) EXPECT_TRUE(cs.spec.is_sink(x));
  EXPECT_TRUE(verify_equivalence(coined_evolution(g, coin.coins), szegedy_evolution(cs.spec), cs.map.basis_map(), 1e-12)
                  .verdict);
}

TEST(Search, CoinFactorisation) {
  const auto g = generators::torus(3, 3);
  const auto c = abstract_search_coin(g, MarkedSet{4, 7});
  for (std::size_t v = 0; v < 9; ++v) {
    EXPECT_LE(max_abs_diff(c.grover.block(v) * c.reflection.block(v), c.coins.block(v)), 1e-15);
  }
  EXPECT_THROW(abstract_search_coin(g, MarkedSet{9}), Error);
}

TEST(Search, SinkMarkingZeroesRows) {
  const auto s = generators::random_degree_two_bipartite(4, 5, 3);
  const auto m = mark_sinks(s, MarkedSet{1});
  EXPECT_TRUE(m.is_sink(1));
  EXPECT_EQ(m.p.row(1).sum(), 0.0);
  EXPECT_NO_THROW(m.validate());
  EXPECT_THROW(mark_sinks(s, MarkedSet{4}), Error);
}

TEST(Search, TraceRowsCarryPerMarkedAndMaxVertex) {
  const auto g = generators::torus(3, 3);
  const MarkedSet marked{0, 4};
  const auto c = abstract_search_coin(g, marked);
  const auto t = success_probability_trace(coined_evolution(g, c.coins), coined_search_state(g), marked, 5);
  for (const auto& r : t.rows) {
    ASSERT_EQ(r.p_per_marked.size(), 2u);
    EXPECT_NEAR(r.p_per_marked[0] + r.p_per_marked[1], r.p_marked, 1e-15);
    EXPECT_GE(r.p_max_vertex, r.p_per_marked[0]);
  }
}
