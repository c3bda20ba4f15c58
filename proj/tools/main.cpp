// qwalk command-line front end.
#include <cstdlib>
#include <filesystem>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qwalk/io.hpp"
#include "qwalk/qwalk.hpp"

namespace {

using namespace qwalk;
using io::json;

double tolerance_from_env(double fallback) {
  const char* env = std::getenv("QWALK_TOL");
  if (env == nullptr || *env == '\0') return fallback;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(v > 0.0)) throw Error(ErrorCode::InvalidInput, "QWALK_TOL must be a positive number");
  return v;
}

void warn_loops(const io::Model& m) {
  const LabeledGraph* g = nullptr;
  if (const auto* c = std::get_if<io::CoinedModel>(&m)) g = &c->graph;
  if (const auto* s = std::get_if<io::StaggeredModel>(&m)) g = &s->graph;
  if (g != nullptr && g->has_loops()) std::cerr << json{{"warning", "graph has loops"}}.dump() << "\n";
}

io::Model load_model(const std::string& path) {
  auto m = io::model_from_json(io::read_json_file(path));
  warn_loops(m);
  return m;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    io::write_text_file(out, text);
  }
}

io::StaggeredModel staggered_model(const LabeledGraph& g, const Tessellation& a, const Tessellation& b, double tol,
                                   std::optional<std::vector<std::size_t>> positions = std::nullopt) {
  const auto n = g.vertex_count();
  return {g, reflection_from_polygons(n, a.polygons, tol), reflection_from_polygons(n, b.polygons, tol),
          std::move(positions)};
}

Tessellation tess(const io::StaggeredModel& s, bool first) {
  return tessellation_of(first ? s.u0 : s.u1, s.graph);
}

// ---- convert ------------------------------------------------------------------

struct Converted {
  io::Model model;
  json map;
  EquivalenceReport report;
};

std::vector<std::size_t> invert(const std::vector<std::size_t>& f, std::size_t size) {
  std::vector<std::size_t> inv(size, static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < f.size(); ++i) inv[f[i]] = i;
  return inv;
}

Converted convert(const io::Model& in, const std::string& to, bool allow_partial, double tol) {
  const auto u_in = io::evolution_operator(in, tol);
  if (const auto* c = std::get_if<io::CoinedModel>(&in)) {
    if (to == "staggered") {
      auto st = coined_to_staggered(c->graph, c->coins, {.allow_partial = allow_partial, .tol = tol});
      io::Model out = staggered_model(st.graph, st.alpha, st.beta, tol, st.position);
      const auto map = identity_map(st.graph.vertex_count());
      return {out, io::index_map_to_json(map), verify_equivalence(u_in, io::evolution_operator(out, tol), map, tol)};
    }
    if (to == "szegedy") {
      auto sz = coined_to_szegedy(c->graph, c->coins, {.allow_partial = allow_partial, .tol = tol});
      io::Model out = sz.spec;
      return {out, io::bijection_to_json(sz.map),
              verify_equivalence(u_in, io::evolution_operator(out, tol), sz.map.basis_map(), tol)};
    }
  } else if (const auto* s = std::get_if<io::StaggeredModel>(&in)) {
    if (to == "szegedy" || to == "coined") {
      auto sz = staggered_to_szegedy(s->graph, tess(*s, true), tess(*s, false), tol);
      if (to == "szegedy") {
        io::Model out = sz.spec;
        return {out, io::bijection_to_json(sz.map),
                verify_equivalence(u_in, io::evolution_operator(out, tol), sz.map.basis_map(), tol)};
      }
      auto co = szegedy_search_to_coined(sz.spec, tol);
      io::Model out = io::CoinedModel{co.graph, co.coins};
      // arc -> staggered vertex, through the shared Szegedy basis
      const auto inv = invert(sz.map.basis_map(), sz.spec.dimension());
      std::vector<std::size_t> map;
      for (auto idx : co.basis_map) map.push_back(inv[idx]);
      return {out, io::index_map_to_json(map), verify_equivalence(io::evolution_operator(out, tol), u_in, map, tol)};
    }
  } else {
    const auto& spec = std::get<BipartiteWalkSpec>(in);
    if (to == "staggered") {
      auto st = szegedy_to_staggered(spec, tol);
      io::Model out = staggered_model(st.line, st.alpha, st.beta, tol);
      return {out, io::bijection_to_json(st.map),
              verify_equivalence(io::evolution_operator(out, tol), u_in, st.map.basis_map(), tol)};
    }
    if (to == "coined") {
      auto co = szegedy_search_to_coined(spec, tol);
      io::Model out = io::CoinedModel{co.graph, co.coins};
      return {out, io::index_map_to_json(co.basis_map),
              verify_equivalence(io::evolution_operator(out, tol), u_in, co.basis_map, tol)};
    }
  }
  throw Error(ErrorCode::InvalidInput,
              std::string("no conversion from ") + io::model_name(in) + " to " + to);
}

// ---- search -------------------------------------------------------------------

struct SearchRun {
  ProbabilityTrace trace;
  json model;
};

SearchRun run_search(const std::string& model, const json& input, const MarkedSet& marked, std::size_t steps,
                     double tol) {
  if (input.contains("x")) {
    if (model != "szegedy") throw Error(ErrorCode::InvalidInput, "bipartite input only supports --model szegedy");
    const auto presink = io::bipartite_from_json(input);
    const auto spec = mark_sinks(presink, marked);
    const auto w = szegedy_evolution(spec, tol);
    return {success_probability_trace(w, szegedy_search_state(presink), marked, steps), io::bipartite_to_json(spec)};
  }
  const auto graph = io::graph_from_json(input);
  if (graph.has_loops()) std::cerr << json{{"warning", "graph has loops"}}.dump() << "\n";
  marked.check_range(graph.vertex_count(), "vertex");
  if (model == "coined") {
    const auto coin = abstract_search_coin(graph, marked);
    const auto u = coined_evolution(graph, coin.coins);
    return {success_probability_trace(u, coined_search_state(graph), marked, steps),
            io::model_to_json(io::CoinedModel{graph, coin.coins})};
  }
  if (model == "staggered") {
    const auto coin = abstract_search_coin(graph, marked);
    const auto st = coined_to_staggered(graph, coin.coins, {.allow_partial = true, .tol = tol});
    auto sm = staggered_model(st.graph, st.alpha, st.beta, tol, st.position);
    const auto u = staggered_evolution(sm.u0, sm.u1, sm.graph).matrix;
    const auto psi0 = staggered_search_state(st.graph.vertex_count(), st.position);
    return {success_probability_trace(u, psi0, marked, steps), io::model_to_json(sm)};
  }
  if (model == "szegedy") {
    const auto cs = coined_search_to_szegedy(graph, marked, tol);
    const auto w = szegedy_evolution(cs.spec, tol);
    return {success_probability_trace(w, szegedy_search_state(cs.presink), MarkedSet(cs.sinks), steps),
            io::bipartite_to_json(cs.spec)};
  }
  throw Error(ErrorCode::InvalidInput, "unknown model \"" + model + "\"");
}

// ---- demo ---------------------------------------------------------------------

void demo(const std::filesystem::path& dir, double tol) {
  std::filesystem::create_directories(dir);
  auto path = [&](const char* name) { return (dir / name).string(); };

  // non-regular four-vertex example: coins [1], Grover(3), H, H
  const auto g = generators::paw();
  const CoinAssignment coins(
      std::vector<Matrix>{grover_coin(1).matrix(), grover_coin(3).matrix(), hadamard_gate(), hadamard_gate()});
  const io::Model coined = io::CoinedModel{g, coins};
  const auto u = io::evolution_operator(coined, tol);
  io::write_json_file(path("example_coined.json"), io::model_to_json(coined));
  io::write_json_file(path("example_coined_operator.json"), io::matrix_to_json(u));

  const auto st = coined_to_staggered(g, coins, {.tol = tol});
  const io::Model staggered = staggered_model(st.graph, st.alpha, st.beta, tol, st.position);
  io::write_json_file(path("example_staggered.json"), io::model_to_json(staggered));

  const auto sz = staggered_to_szegedy(st.graph, st.alpha, st.beta, tol);
  const io::Model szegedy = sz.spec;
  const auto w = io::evolution_operator(szegedy, tol);
  io::write_json_file(path("example_szegedy.json"), io::model_to_json(szegedy));
  io::write_json_file(path("example_szegedy_operator.json"), io::matrix_to_json(w));
  io::write_json_file(path("example_map.json"), io::bijection_to_json(sz.map));
  const auto report = verify_equivalence(u, w, sz.map.basis_map(), tol);
  io::write_json_file(path("example_report.json"), io::report_to_json(report));

  // abstract search on the 3x3 torus with vertex 4 marked, in all three models
  const auto torus = generators::torus(3, 3);
  const MarkedSet marked{4};
  const auto torus_json = io::graph_to_json(torus);
  io::write_json_file(path("search_graph.json"), torus_json);
  json summary{{"schema", io::kSchemaVersion}, {"marked", marked.positions}, {"steps", 50}};
  std::vector<ProbabilityTrace> traces;
  for (const char* model : {"coined", "staggered", "szegedy"}) {
    auto run = run_search(model, torus_json, marked, 50, tol);
    io::write_text_file(path((std::string("search_trace_") + model + ".csv").c_str()), io::trace_csv(run.trace));
    io::write_json_file(path((std::string("search_") + model + ".json").c_str()), run.model);
    summary["models"][model] = {{"argmax_t", run.trace.argmax_t}, {"max_p", run.trace.max_p}};
    traces.push_back(std::move(run.trace));
  }
  double diff = 0.0;
  for (std::size_t t = 0; t < traces[0].rows.size(); ++t) {
    for (std::size_t k = 1; k < traces.size(); ++k) {
      diff = std::max(diff, std::abs(traces[k].rows[t].p_marked - traces[0].rows[t].p_marked));
    }
  }
  summary["max_trace_diff"] = diff;
  summary["verdict"] = diff <= tol;
  io::write_json_file(path("search_summary.json"), summary);
  std::cout << io::report_to_json(report).dump() << "\n" << summary.dump() << "\n";
}


struct GenerateOptions {
  std::string family;
  std::size_t n = 4, d = 3, rows = 3, cols = 3, x = 4, y = 6;
  std::uint64_t seed = 1;
  std::string coin = "grover";
};

io::Model generate(const GenerateOptions& g) {
  if (g.family == "random-bipartite") return generators::random_degree_two_bipartite(g.x, g.y, g.seed);
  LabeledGraph graph;
  if (g.family == "path") graph = generators::path(g.n);
  else if (g.family == "cycle") graph = generators::cycle(g.n);
  else if (g.family == "complete") graph = generators::complete(g.n);
  else if (g.family == "torus") graph = generators::torus(g.rows, g.cols);
  else if (g.family == "paw") graph = generators::paw();
  else if (g.family == "random-regular") graph = generators::random_regular(g.n, g.d, g.seed);
  else throw Error(ErrorCode::InvalidInput, "unknown family \"" + g.family + "\"");
  std::vector<Matrix> blocks;
  for (std::size_t v = 0; v < graph.vertex_count(); ++v) blocks.push_back(io::named_coin(g.coin, graph.degree(v)));
  return io::CoinedModel{graph, CoinAssignment(std::move(blocks))};
}

int fail(int code, const json& err) {
  std::cerr << err.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build, convert and compare coined, Szegedy and staggered quantum walks."};
  app.require_subcommand(1);
  double tol = kDefaultTolerance;
  app.add_option("--tol", tol, "numerical tolerance (QWALK_TOL overrides the default)")->check(CLI::PositiveNumber);

  std::string in, out, a_path, b_path, map_path, from, to, model = "coined", graph_path, out_dir = "demo_out";
  std::string map_out;
  std::size_t steps = 10;
  std::vector<std::size_t> marked;
  bool allow_partial = false;

  GenerateOptions gen;
  auto* build = app.add_subcommand("build", "validate a model, or generate one, and write it in normal form");
  auto* build_in = build->add_option("--in", in);
  auto* build_gen = build->add_option("--generate", gen.family,
                                      "path, cycle, complete, torus, paw, random-regular or random-bipartite");
  build_in->excludes(build_gen);
  build->add_option("--n", gen.n, "vertex count");
  build->add_option("--d", gen.d, "degree of random-regular graphs");
  build->add_option("--rows", gen.rows);
  build->add_option("--cols", gen.cols);
  build->add_option("--x", gen.x, "|X| of random-bipartite specs");
  build->add_option("--y", gen.y, "|Y| of random-bipartite specs");
  build->add_option("--seed", gen.seed);
  build->add_option("--coin", gen.coin, "coin name for generated graphs");
  build->add_option("--out", out);

  auto* dump = app.add_subcommand("dump-operator", "write the evolution operator as JSON");
  dump->alias("dump");
  dump->add_option("--in", in)->required();
  dump->add_option("--out", out);

  auto* ev = app.add_subcommand("evolve", "position probabilities from the uniform initial state");
  ev->add_option("--in", in)->required();
  ev->add_option("--steps", steps);
  ev->add_option("--out", out);

  auto* conv = app.add_subcommand("convert", "convert a walk to another model and verify the result");
  const std::vector<std::string> models{"coined", "szegedy", "staggered"};
  conv->add_option("--from", from)->required()->check(CLI::IsMember(models));
  conv->add_option("--to", to)->required()->check(CLI::IsMember(models));
  conv->add_option("--in", in)->required();
  conv->add_option("--out", out)->required();
  conv->add_option("--map-out", map_out, "where to write the basis map");
  conv->add_flag("--allow-partial", allow_partial, "accept partial-reflection coins");

  auto* ver = app.add_subcommand("verify", "compare two operators through a basis map");
  ver->add_option("--a", a_path)->required();
  ver->add_option("--b", b_path)->required();
  ver->add_option("--map", map_path);

  auto* se = app.add_subcommand("search", "marked-vertex probability trace of abstract search");
  se->add_option("--model", model)->check(CLI::IsMember(models));
  se->add_option("--graph", graph_path)->required();
  se->add_option("--marked", marked)->required();
  se->add_option("--steps", steps);
  se->add_option("--out", out);

  auto* dm = app.add_subcommand("demo", "run the worked example and the torus search end to end");
  dm->add_option("--out-dir", out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.count("--tol") == 0) tol = tolerance_from_env(tol);
    if (*build) {
      if (in.empty() && gen.family.empty()) throw Error(ErrorCode::InvalidInput, "build needs --in or --generate");
      const auto m = in.empty() ? generate(gen) : load_model(in);
      (void)io::evolution_operator(m, tol);
      emit(out, io::model_to_json(m).dump(2) + "\n");
    } else if (*dump) {
      const auto m = load_model(in);
      json j{{"schema", io::kSchemaVersion}, {"model", io::model_name(m)}};
      j["matrix"] = io::matrix_to_json(io::evolution_operator(m, tol));
      emit(out, j.dump(2) + "\n");
    } else if (*ev) {
      const auto m = load_model(in);
      const auto u = io::evolution_operator(m, tol);
      std::optional<WalkState> psi0;
      if (const auto* c = std::get_if<io::CoinedModel>(&m)) psi0 = coined_search_state(c->graph);
      if (const auto* s = std::get_if<io::StaggeredModel>(&m)) {
        const auto n = s->graph.vertex_count();
        psi0 = staggered_search_state(n, s->positions.value_or(identity_map(n)));
      }
      if (const auto* z = std::get_if<BipartiteWalkSpec>(&m)) psi0 = szegedy_search_state(*z);
      emit(out, io::probability_csv(probability_trace(u, *psi0, steps)));
    } else if (*conv) {
      const auto m = load_model(in);
      if (from != io::model_name(m)) {
        throw Error(ErrorCode::InvalidInput, "input is a " + std::string(io::model_name(m)) + " model, not " + from);
      }
      auto c = convert(m, to, allow_partial, tol);
      io::write_json_file(out, io::model_to_json(c.model));
      if (!map_out.empty()) io::write_json_file(map_out, c.map);
      std::cout << io::report_to_json(c.report).dump() << "\n";
      if (!c.report.verdict) return fail(1, {{"error", "NotEquivalent"}, {"max_abs_diff", c.report.max_abs_diff}});
    } else if (*ver) {
      const auto a = load_model(a_path);
      const auto b = load_model(b_path);
      const auto ua = io::evolution_operator(a, tol);
      const auto ub = io::evolution_operator(b, tol);
      std::optional<std::size_t> y;
      if (const auto* z = std::get_if<BipartiteWalkSpec>(&b)) y = z->y_count;
      const auto map = map_path.empty() ? identity_map(static_cast<std::size_t>(ua.rows()))
                                        : io::basis_map_from_json(io::read_json_file(map_path), y);
      const auto r = verify_equivalence(ua, ub, map, tol);
      std::cout << io::report_to_json(r).dump() << "\n";
      if (!r.verdict) return fail(1, {{"error", "NotEquivalent"}, {"max_abs_diff", r.max_abs_diff}});
    } else if (*se) {
      const auto run = run_search(model, io::read_json_file(graph_path), MarkedSet(marked), steps, tol);
      emit(out, io::trace_csv(run.trace));
    } else if (*dm) {
      demo(out_dir, tol);
    }
  } catch (const IoError& e) {
    return fail(2, {{"error", "IoError"}, {"message", e.what()}});
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(2, {{"error", "IoError"}, {"message", e.what()}});
  } catch (const Error& e) {
    json err{{"error", to_string(e.code())}, {"message", e.what()}};
    if (!e.subject().empty()) err["subject"] = e.subject();
    if (e.index()) err["index"] = *e.index();
    return fail(1, err);
  }
  return 0;
}
