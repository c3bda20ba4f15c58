// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "oracles.hpp"

using namespace qwalk;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::vector<LabeledGraph> corpus() {
  return {generators::path(4), generators::cycle(6), generators::complete(5), generators::torus(3, 3),
          generators::paw()};
}

CoinAssignment corpus_coins(const LabeledGraph& g, bool hadamard_on_degree_two) {
  auto c = CoinAssignment::grover(g);
  for (std::size_t v = 0; v < g.vertex_count() && hadamard_on_degree_two; ++v) {
    if (g.degree(v) == 2) c.block(v) = hadamard_gate();
  }
  return c;
}

void criterion1(Outcome& o) {
  const auto t0 = Clock::now();
  const auto g = generators::paw();
  const CoinAssignment coins(
      std::vector<Matrix>{grover_coin(1).matrix(), grover_coin(3).matrix(), hadamard_gate(), hadamard_gate()});
  Matrix s = Matrix::Zero(8, 8);
  for (auto [a, b] : std::vector<std::pair<int, int>>{{0, 1}, {2, 4}, {3, 6}, {5, 7}}) {
    s(a, b) = 1.0;
    s(b, a) = 1.0;
  }
  const Matrix u = s * coins.direct_sum();
  o.require(max_abs_diff(u, coined_evolution(g, coins)) <= 1e-12, "library S C' differs from printed S");

  const double r2 = std::sqrt(2.0), h0 = std::sqrt(2.0 + r2) / 2.0, h1 = std::sqrt(2.0 - r2) / 2.0;
  const double third = 1.0 / std::sqrt(3.0);
  const std::vector<Polygon> alpha{Polygon::uniform({0}), Polygon::from_entries({{1, third}, {2, third}, {3, third}}),
                                   Polygon::from_entries({{4, h0}, {5, h1}}),
                                   Polygon::from_entries({{6, h0}, {7, h1}})};
  const std::vector<Polygon> beta{Polygon::uniform({0, 1}), Polygon::uniform({2, 4}), Polygon::uniform({3, 6}),
                                  Polygon::uniform({5, 7})};
  const auto u0 = reflection_from_polygons(8, alpha);
  const auto u1 = reflection_from_polygons(8, beta);
  const auto gprime = expand_vertices_to_cliques(g, {{{0}}, {{0, 1, 2}}, {{0, 1}}, {{0, 1}}});
  const auto st = staggered_evolution(u0, u1, gprime);
  const double d_st = max_abs_diff(u, st.matrix);
  o.require(d_st <= 1e-12, "staggered U1 U0");

  // Szegedy on the 4 x 4 bipartite graph through the printed bijection
  const std::vector<EdgePair> f{{0, 0}, {1, 0}, {1, 1}, {1, 2}, {2, 1}, {2, 3}, {3, 2}, {3, 3}};
  auto spec = BipartiteWalkSpec::uniform(4, 4, f);
  for (std::size_t i = 0; i < 8; ++i) {
    const auto [x, y] = f[i];
    spec.p(x, y) = std::norm(alpha[x].coefficient_of(i));
    spec.q(y, x) = std::norm(beta[y].coefficient_of(i));
  }
  const auto w = szegedy_evolution(spec);
  const auto rep = verify_equivalence(u, w, Bijection(f, 4).basis_map(), 1e-12);
  o.require(rep.verdict, "Szegedy W non-idle block");
  o.require(max_abs_diff(w, oracle::szegedy_w(spec)) <= 1e-12, "W against direct formula");
  const double secs = seconds_since(t0);
  o.require(secs < 1.0, "runtime");
  o.detail << " staggered_diff=" << d_st << " szegedy_diff=" << rep.max_abs_diff << " idle=" << rep.idle_dimension
           << " time=" << secs << "s";
}

void criterion2(Outcome& o) {
  double worst = 0.0;
  for (std::size_t d = 1; d <= 8; ++d) {
    const auto g = grover_coin(d).matrix();
    const auto n = static_cast<Eigen::Index>(d);
    worst = std::max(worst, max_abs_diff(g * g, Matrix::Identity(n, n)));
    auto c = classify_reflection(g);
    const auto* r = std::get_if<ReflectionOperator>(&c);
    o.require(r && r->polygons().size() == 1 && r->polygons()[0].size() == d, "Grover(" + std::to_string(d) + ")");
  }
  o.require(worst <= 1e-12, "Grover squares to I");
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto m = static_cast<Eigen::Index>(n);
    auto c = classify_reflection(-Matrix::Identity(m, m));
    const auto* r = std::get_if<ReflectionOperator>(&c);
    o.require(r && r->kind() == ReflectionKind::Partial && r->polygons().empty(), "-I_" + std::to_string(n));
  }
  Matrix fig(5, 5);
  fig << -1, 2, 2, 0, 0, 2, -1, 2, 0, 0, 2, 2, -1, 0, 0, 0, 0, 0, 0, 3, 0, 0, 0, 3, 0;
  fig /= 3.0;
  auto c = classify_reflection(fig);
  const auto* r = std::get_if<ReflectionOperator>(&c);
  o.require(r && r->polygons().size() == 2 && r->polygons()[0].support == std::vector<std::size_t>{0, 1, 2} &&
                r->polygons()[1].support == std::vector<std::size_t>{3, 4},
            "5x5 example supports");
  o.detail << " max|G^2-I|=" << worst;
}

void criterion3(Outcome& o) {
  double worst = 0.0;
  for (const auto& g : corpus()) {
    const auto coins = corpus_coins(g, g.vertex_count() == 4 && !g.is_regular());
    const auto st = coined_to_staggered(g, coins);
    const auto n = st.graph.vertex_count();
    const auto u = staggered_evolution(reflection_from_polygons(n, st.alpha.polygons),
                                       reflection_from_polygons(n, st.beta.polygons), st.graph);
    worst = std::max(worst, max_abs_diff(u.matrix, coined_evolution(g, coins)));
  }
  o.require(worst <= 1e-12, "coined vs staggered");
  const auto k5 = generators::complete(5);
  bool rejected = false;
  try {
    coined_to_staggered(k5, CoinAssignment::uniform(k5, fourier_matrix(4)));
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::CoinNotOrthogonalReflection;
  }
  o.require(rejected, "Fourier coin rejected");
  o.detail << " max_diff=" << worst;
}

void criterion4(Outcome& o) {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto spec = generators::random_degree_two_bipartite(3 + seed % 5, 3 + seed % 5 + seed % 4, 1000 + seed);
    const auto co = szegedy_to_coined(spec);
    worst = std::max(worst, verify_equivalence(coined_evolution(co.graph, co.coins), szegedy_evolution(spec),
                                               co.basis_map, 1e-12)
                                .max_abs_diff);
  }
  o.require(worst <= 1e-12, "round trip");
  auto bad = BipartiteWalkSpec::uniform(3, 2, {{0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}});
  bool rejected = false;
  try {
    szegedy_to_coined(bad);
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::HypothesisViolated && e.index() == std::optional<std::size_t>(0);
  }
  o.require(rejected, "degree-3 y rejected");
  o.detail << " max_diff=" << worst;
}

void criterion5(Outcome& o) {
  const auto t0 = Clock::now();
  const auto g = generators::torus(3, 3);
  const MarkedSet marked{4};
  const auto coin = abstract_search_coin(g, marked);
  const auto tc = success_probability_trace(coined_evolution(g, coin.coins), coined_search_state(g), marked, 50);
  const auto st = coined_to_staggered(g, coin.coins, {.allow_partial = true});
  const auto n = st.graph.vertex_count();
  const auto us = staggered_evolution(reflection_from_polygons(n, st.alpha.polygons),
                                      reflection_from_polygons(n, st.beta.polygons), st.graph);
  const auto ts = success_probability_trace(us.matrix, staggered_search_state(n, st.position), marked, 50);
  const auto cs = coined_search_to_szegedy(g, marked);
  const auto tz = success_probability_trace(szegedy_evolution(cs.spec), szegedy_search_state(cs.presink),
                                            MarkedSet(cs.sinks), 50);
  double worst = 0.0;
  for (std::size_t t = 0; t <= 50; ++t) {
    worst = std::max(worst, std::abs(ts.rows[t].p_marked - tc.rows[t].p_marked));
    worst = std::max(worst, std::abs(tz.rows[t].p_marked - tc.rows[t].p_marked));
  }
  o.require(worst <= 1e-10, "traces agree");
  o.require(us.definition == StaggeredDefinition::Generalized, "staggered side is generalized");
  for (const auto* t : {&tc, &ts, &tz}) o.require(t->rows[0].p_marked == 1.0 / 9.0, "p(0) == 1/9");
  o.require(tc.max_p > 1.0 / 9.0, "growth");
  const double secs = seconds_since(t0);
  o.require(secs < 5.0, "runtime");
  o.detail << " max_diff=" << worst << " p0=" << tc.rows[0].p_marked << " max_p=" << tc.max_p
           << " at t=" << tc.argmax_t << " time=" << secs << "s";
}

void criterion6(Outcome& o) {
  for (const auto& g : corpus()) {
    const auto s = shift_operator(g).matrix();
    const auto n = static_cast<Eigen::Index>(g.arc_count());
    o.require(max_abs_diff(s * s, Matrix::Identity(n, n)) == 0.0, "S^2 = I");
    auto c = classify_reflection(s);
    const auto* r = std::get_if<ReflectionOperator>(&c);
    bool matching = r && r->polygons().size() == g.edge_count() && r->kind() == ReflectionKind::Orthogonal;
    for (std::size_t k = 0; matching && k < r->polygons().size(); ++k) matching = r->polygons()[k].size() == 2;
    o.require(matching, "perfect matching");
  }
  std::size_t fixed = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto spec = generators::random_degree_two_bipartite(5, 8, seed);
    const auto w = szegedy_evolution(spec);
    const auto mask = spec.edge_mask();
    for (std::size_t x = 0; x < spec.x_count; ++x) {
      for (std::size_t y = 0; y < spec.y_count; ++y) {
        if (mask[x][y]) continue;
        const auto i = static_cast<Eigen::Index>(spec.index(x, y));
        Vector e = Vector::Zero(w.rows());
        e(i) = 1.0;
        o.require(w.col(i) == e, "non-edge column");
        ++fixed;
      }
    }
  }
  const auto g = generators::torus(3, 3);
  const auto u = coined_evolution(g, CoinAssignment::grover(g));
  Vector v = coined_search_state(g).amplitudes;
  double drift = 0.0;
  for (int t = 0; t < 10000; ++t) {
    v = u * v;
    drift = std::max(drift, std::abs(v.norm() - 1.0));
  }
  o.require(drift <= 1e-10, "norm conservation");
  o.detail << " non_edge_columns=" << fixed << " norm_drift=" << drift;
}

void criterion7(Outcome& o) {
  const auto base = fs::temp_directory_path() / "qwalk_acceptance_demo";
  fs::remove_all(base);
  std::vector<fs::path> dirs{base / "a", base / "b"};
  for (const auto& d : dirs) {
    const auto cmd = std::string(QWALK_CLI_PATH) + " demo --out-dir " + d.string() + " > " + (base / "log").string();
    fs::create_directories(base);
    o.require(std::system(cmd.c_str()) == 0, "demo exit status");
  }
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    const auto other = dirs[1] / entry.path().filename();
    o.require(fs::exists(other) && oracle::slurp(entry.path().string()) == oracle::slurp(other.string()),
              entry.path().filename().string());
    ++files;
  }
  o.require(files > 0 && files == static_cast<std::size_t>(std::distance(fs::directory_iterator(dirs[1]),
                                                                          fs::directory_iterator{})),
            "same file set");
  o.detail << " files=" << files;
  fs::remove_all(base);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"1 worked-example exactness", criterion1}, {"2 reflection algebra", criterion2},
      {"3 coined to staggered corpus", criterion3}, {"4 Szegedy to coined round trip", criterion4},
      {"5 search equivalence", criterion5},        {"6 structural invariants", criterion6},
      {"7 determinism", criterion7}};
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      run(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << name << ":" << o.detail.str() << std::endl;
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
