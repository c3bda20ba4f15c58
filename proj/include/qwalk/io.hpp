#pragma once

#include <charconv>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qwalk/converters.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/linalg.hpp"
#include "qwalk/reflection.hpp"
#include "qwalk/search.hpp"
#include "qwalk/walks.hpp"

// JSON and CSV formats. Every JSON document carries "schema": 1.
namespace qwalk::io {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidInput, path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

inline void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

/// Shortest round-trip decimal form.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return std::to_string(v);
  return std::string(buf, end);
}

namespace detail {

template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorCode::InvalidInput, std::string("missing field \"") + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("field \"") + key + "\": " + e.what());
  }
}

inline void check_schema(const json& j) {
  if (j.contains("schema") && j.at("schema") != kSchemaVersion) {
    throw Error(ErrorCode::InvalidInput, "unsupported schema version");
  }
}

inline Complex complex_from(const json& c) {
  if (c.is_number()) return {c.get<double>(), 0.0};
  if (c.is_array() && c.size() == 2) return {c[0].get<double>(), c[1].get<double>()};
  throw Error(ErrorCode::InvalidInput, "complex numbers are [re, im] pairs");
}

}  // namespace detail

inline json complex_to_json(Complex c) { return json::array({c.real(), c.imag()}); }

// ---- matrices and vectors ------------------------------------------------

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidInput, "matrix must be an array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  const auto cols = n == 0 ? 0 : static_cast<Eigen::Index>(j[0].size());
  Matrix m(n, cols);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::InvalidInput, "ragged matrix");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = detail::complex_from(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

inline json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

// ---- graphs ----------------------------------------------------------------

inline LabeledGraph graph_from_json(const json& j) {
  detail::check_schema(j);
  const auto n = detail::field<std::size_t>(j, "vertices");
  std::vector<Edge> edges;
  for (const auto& e : detail::field<json>(j, "edges")) {
    if (!e.is_array() || e.size() != 2) throw Error(ErrorCode::InvalidInput, "edges are [u, v] pairs");
    edges.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>()});
  }
  return LabeledGraph::from_edges(n, std::move(edges));
}

inline json graph_to_json(const LabeledGraph& g) {
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back(json::array({e.u, e.v}));
  return json{{"schema", kSchemaVersion}, {"vertices", g.vertex_count()}, {"edges", std::move(edges)}};
}

/// Bipartite schema. Omitted p (or q) on every edge of a vertex means uniform
/// weights over that vertex's edges; omitted phases are 0. Listed sinks get an
/// all-zero P row whatever p says.
inline BipartiteWalkSpec bipartite_from_json(const json& j) {
  detail::check_schema(j);
  const auto m = detail::field<std::size_t>(j, "x");
  const auto n = detail::field<std::size_t>(j, "y");
  struct Row {
    std::size_t x, y;
    std::optional<double> p, q;
    double theta, theta_prime;
  };
  std::vector<Row> rows;
  for (const auto& e : detail::field<json>(j, "edges")) {
    Row r{detail::field<std::size_t>(e, "x"), detail::field<std::size_t>(e, "y"), std::nullopt, std::nullopt,
          e.value("theta", 0.0), e.value("theta_prime", 0.0)};
    if (e.contains("p")) r.p = e.at("p").get<double>();
    if (e.contains("q")) r.q = e.at("q").get<double>();
    rows.push_back(r);
  }
  std::vector<EdgePair> pairs;
  for (const auto& r : rows) pairs.emplace_back(r.x, r.y);
  auto spec = BipartiteWalkSpec::uniform(m, n, pairs);
  std::vector<int> p_given(m, -1), q_given(n, -1);  // -1 unseen, 0 omitted, 1 given
  auto note = [](int& slot, bool given, const char* what, std::size_t idx) {
    const int g = given ? 1 : 0;
    if (slot != -1 && slot != g) {
      throw Error(ErrorCode::InvalidInput,
                  std::string("mix of given and omitted ") + what + " weights at vertex " + std::to_string(idx), what,
                  idx);
    }
    slot = g;
  };
  for (const auto& r : rows) {
    note(p_given[r.x], r.p.has_value(), "x", r.x);
    note(q_given[r.y], r.q.has_value(), "y", r.y);
    const auto xi = static_cast<Eigen::Index>(r.x);
    const auto yi = static_cast<Eigen::Index>(r.y);
    if (r.p) spec.p(xi, yi) = *r.p;
    if (r.q) spec.q(yi, xi) = *r.q;
    spec.theta(xi, yi) = r.theta;
    spec.theta_prime(xi, yi) = r.theta_prime;
  }
  if (j.contains("sinks")) {
    std::vector<std::size_t> sinks = j.at("sinks").get<std::vector<std::size_t>>();
    spec = mark_sinks(spec, MarkedSet(std::move(sinks)));
  }
  return spec;
}

inline json bipartite_to_json(const BipartiteWalkSpec& s) {
  auto edges = s.edges;
  std::sort(edges.begin(), edges.end());
  json out_edges = json::array();
  for (const auto& [x, y] : edges) {
    json e{{"x", x}, {"y", y}, {"p", s.p_at(x, y)}, {"q", s.q_at(y, x)}};
    if (s.theta_at(x, y) != 0.0) e["theta"] = s.theta_at(x, y);
    if (s.theta_prime_at(x, y) != 0.0) e["theta_prime"] = s.theta_prime_at(x, y);
    out_edges.push_back(std::move(e));
  }
  json sinks = json::array();
  for (std::size_t x = 0; x < s.x_count; ++x) {
    if (s.is_sink(x)) sinks.push_back(x);
  }
  return json{{"schema", kSchemaVersion}, {"model", "szegedy"}, {"x", s.x_count},
              {"y", s.y_count},           {"edges", std::move(out_edges)}, {"sinks", std::move(sinks)}};
}

// ---- polygons ---------------------------------------------------------------

inline json polygon_to_json(const Polygon& p) {
  json c = json::array();
  for (const auto& v : p.coefficients) c.push_back(complex_to_json(v));
  return json{{"support", p.support}, {"coefficients", std::move(c)}};
}

/// Coefficients may be omitted for an equal-weight polygon.
inline Polygon polygon_from_json(const json& j) {
  auto support = detail::field<std::vector<std::size_t>>(j, "support");
  if (!j.contains("coefficients")) return Polygon::uniform(std::move(support));
  const auto& c = j.at("coefficients");
  if (!c.is_array() || c.size() != support.size()) {
    throw Error(ErrorCode::InvalidInput, "one coefficient per support vertex required");
  }
  std::vector<std::pair<std::size_t, Complex>> entries;
  for (std::size_t k = 0; k < support.size(); ++k) entries.emplace_back(support[k], detail::complex_from(c[k]));
  return Polygon::from_entries(std::move(entries));
}

inline json polygons_to_json(const std::vector<Polygon>& polys) {
  json out = json::array();
  for (const auto& p : polys) out.push_back(polygon_to_json(p));
  return out;
}

inline std::vector<Polygon> polygons_from_json(const json& j) {
  std::vector<Polygon> out;
  for (const auto& p : j) out.push_back(polygon_from_json(p));
  return out;
}

// ---- walk models ------------------------------------------------------------

struct CoinedModel {
  LabeledGraph graph;
  CoinAssignment coins;
};

struct StaggeredModel {
  LabeledGraph graph;
  ReflectionOperator u0;
  ReflectionOperator u1;
  /// classical position of each vertex (defaults to the vertex itself)
  std::optional<std::vector<std::size_t>> positions;
};

using Model = std::variant<CoinedModel, StaggeredModel, BipartiteWalkSpec>;

inline const char* model_name(const Model& m) {
  switch (m.index()) {
    case 0: return "coined";
    case 1: return "staggered";
    default: return "szegedy";
  }
}

/// Named coin of dimension d: grover, hadamard (d = 2), identity,
/// minus_identity, fourier.
inline Matrix named_coin(const std::string& name, std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  if (name == "grover") return d == 0 ? Matrix(0, 0) : grover_coin(d).matrix();
  if (name == "identity") return Matrix::Identity(n, n);
  if (name == "minus_identity") return -Matrix::Identity(n, n);
  if (name == "fourier") return fourier_matrix(d);
  if (name == "hadamard") {
    if (d != 2) throw Error(ErrorCode::InvalidInput, "the Hadamard coin needs degree 2");
    return hadamard_gate();
  }
  throw Error(ErrorCode::InvalidInput, "unknown coin \"" + name + "\"");
}

inline CoinAssignment coins_from_json(const json& j, const LabeledGraph& g) {
  std::vector<Matrix> blocks;
  if (j.contains("coins")) {
    const auto& list = j.at("coins");
    if (!list.is_array() || list.size() != g.vertex_count()) {
      throw Error(ErrorCode::InvalidInput, "\"coins\" needs one entry per vertex");
    }
    for (std::size_t v = 0; v < g.vertex_count(); ++v) {
      const auto& c = list[v];
      blocks.push_back(c.is_string() ? named_coin(c.get<std::string>(), g.degree(v)) : matrix_from_json(c));
    }
  } else {
    const auto name = j.value("coin", std::string("grover"));
    for (std::size_t v = 0; v < g.vertex_count(); ++v) blocks.push_back(named_coin(name, g.degree(v)));
  }
  return CoinAssignment(std::move(blocks));
}

inline json coins_to_json(const CoinAssignment& c) {
  json out = json::array();
  for (const auto& b : c.blocks()) out.push_back(matrix_to_json(b));
  return out;
}

inline Model model_from_json(const json& j) {
  detail::check_schema(j);
  std::string kind = j.value("model", std::string());
  if (kind.empty()) kind = j.contains("x") ? "szegedy" : (j.contains("alpha") ? "staggered" : "coined");
  if (kind == "szegedy") return bipartite_from_json(j);
  auto graph = graph_from_json(j);
  if (kind == "coined") {
    auto coins = coins_from_json(j, graph);
    return CoinedModel{std::move(graph), std::move(coins)};
  }
  if (kind == "staggered") {
    const auto n = graph.vertex_count();
    auto u0 = reflection_from_polygons(n, polygons_from_json(detail::field<json>(j, "alpha")));
    auto u1 = reflection_from_polygons(n, polygons_from_json(detail::field<json>(j, "beta")));
    std::optional<std::vector<std::size_t>> positions;
    if (j.contains("positions")) positions = j.at("positions").get<std::vector<std::size_t>>();
    return StaggeredModel{std::move(graph), std::move(u0), std::move(u1), std::move(positions)};
  }
  throw Error(ErrorCode::InvalidInput, "unknown model \"" + kind + "\"");
}

inline json model_to_json(const Model& m) {
  if (const auto* c = std::get_if<CoinedModel>(&m)) {
    auto j = graph_to_json(c->graph);
    j["model"] = "coined";
    j["coins"] = coins_to_json(c->coins);
    return j;
  }
  if (const auto* s = std::get_if<StaggeredModel>(&m)) {
    auto j = graph_to_json(s->graph);
    j["model"] = "staggered";
    j["alpha"] = polygons_to_json(s->u0.polygons());
    j["beta"] = polygons_to_json(s->u1.polygons());
    if (s->positions) j["positions"] = *s->positions;
    return j;
  }
  return bipartite_to_json(std::get<BipartiteWalkSpec>(m));
}

/// Evolution operator of any model (validating it on the way).
inline Matrix evolution_operator(const Model& m, double tol = kDefaultTolerance) {
  if (const auto* c = std::get_if<CoinedModel>(&m)) return coined_evolution(c->graph, c->coins);
  if (const auto* s = std::get_if<StaggeredModel>(&m)) return staggered_evolution(s->u0, s->u1, s->graph).matrix;
  return szegedy_evolution(std::get<BipartiteWalkSpec>(m), tol);
}

// ---- states, reports, traces -----------------------------------------------

inline json state_to_json(const WalkState& s) {
  json basis = json::array();
  for (const auto& [a, b] : s.labels) basis.push_back(json::array({a, b}));
  return json{{"schema", kSchemaVersion},
              {"model", to_string(s.kind)},
              {"basis", std::move(basis)},
              {"amplitudes", vector_to_json(s.amplitudes)}};
}

inline json report_to_json(const EquivalenceReport& r) {
  return json{{"schema", kSchemaVersion},
              {"max_abs_diff", r.max_abs_diff},
              {"idle_dimension", r.idle_dimension},
              {"tolerance", r.tolerance},
              {"verdict", r.verdict}};
}

/// Basis map file: {"map": [i, ...]} with target indices, or
/// {"map": [[x, y], ...], "y": |Y|} with Szegedy pairs.
inline std::vector<std::size_t> basis_map_from_json(const json& j, std::optional<std::size_t> y_count = std::nullopt) {
  detail::check_schema(j);
  const auto& list = detail::field<json>(j, "map");
  std::vector<std::size_t> out;
  for (const auto& item : list) {
    if (item.is_number_unsigned()) {
      out.push_back(item.get<std::size_t>());
    } else if (item.is_array() && item.size() == 2) {
      const auto n = j.contains("y") ? j.at("y").get<std::size_t>() : y_count.value_or(0);
      if (n == 0) throw Error(ErrorCode::InvalidInput, "pair maps need the y count");
      out.push_back(item[0].get<std::size_t>() * n + item[1].get<std::size_t>());
    } else {
      throw Error(ErrorCode::InvalidInput, "map entries are indices or [x, y] pairs");
    }
  }
  return out;
}

inline json bijection_to_json(const Bijection& b) {
  json pairs = json::array();
  for (const auto& [x, y] : b.forward()) pairs.push_back(json::array({x, y}));
  return json{{"schema", kSchemaVersion}, {"y", b.y_count()}, {"map", std::move(pairs)}};
}

inline json index_map_to_json(const std::vector<std::size_t>& m) {
  return json{{"schema", kSchemaVersion}, {"map", m}};
}

/// CSV with header t,prob_v0,prob_v1,...
inline std::string probability_csv(const std::vector<std::vector<double>>& rows) {
  std::ostringstream out;
  out << "t";
  const auto width = rows.empty() ? 0 : rows.front().size();
  for (std::size_t v = 0; v < width; ++v) out << ",prob_v" << v;
  out << "\n";
  for (std::size_t t = 0; t < rows.size(); ++t) {
    out << t;
    for (double p : rows[t]) out << "," << format_double(p);
    out << "\n";
  }
  return out.str();
}

/// CSV with header t,p_marked,p_max_vertex,argmax_flag; the flag is 1 on the
/// row holding the best measurement time.
inline std::string trace_csv(const ProbabilityTrace& trace) {
  std::ostringstream out;
  out << "t,p_marked,p_max_vertex,argmax_flag\n";
  for (const auto& row : trace.rows) {
    out << row.t << "," << format_double(row.p_marked) << "," << format_double(row.p_max_vertex) << ","
        << (row.t == trace.argmax_t ? 1 : 0) << "\n";
  }
  return out.str();
}

}  // namespace qwalk::io
