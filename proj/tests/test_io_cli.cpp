#include <gtest/gtest.h>

#include <sys/wait.h>

#include <filesystem>

#include "oracles.hpp"
#include "qwalk/io.hpp"

using namespace qwalk;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

fs::path scratch(const std::string& name) {
  auto dir = fs::path(::testing::TempDir()) / ("qwalk_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Run cli(const fs::path& dir, const std::string& args) {
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  const auto cmd = std::string(QWALK_CLI_PATH) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, oracle::slurp(out.string()), oracle::slurp(err.string())};
}

void write(const fs::path& p, const io::json& j) { io::write_json_file(p.string(), j); }

}  // namespace

TEST(Io, GraphRoundTrip) {
  const auto g = generators::paw();
  const auto j = io::graph_to_json(g);
  EXPECT_EQ(j.at("schema"), 1);
  const auto back = io::graph_from_json(j);
  EXPECT_EQ(back.edge_count(), 4u);
  EXPECT_EQ(back.mate(3), 6u);
}

TEST(Io, BipartiteDefaultsAndSinks) {
  const auto j = io::json::parse(R"({"schema":1,"x":2,"y":2,
    "edges":[{"x":0,"y":0},{"x":0,"y":1},{"x":1,"y":1,"theta":0.5}],"sinks":[1]})");
  const auto s = io::bipartite_from_json(j);
  EXPECT_EQ(s.p_at(0, 1), 0.5);
  EXPECT_EQ(s.q_at(1, 0), 0.5);
  EXPECT_EQ(s.q_at(0, 0), 1.0);
  EXPECT_TRUE(s.is_sink(1));
  EXPECT_EQ(s.p_at(1, 1), 0.0);
  EXPECT_EQ(s.theta_at(1, 1), 0.5);
  const auto again = io::bipartite_from_json(io::bipartite_to_json(s));
  EXPECT_EQ(again.p, s.p);
  EXPECT_EQ(again.q, s.q);
  EXPECT_EQ(again.sink, s.sink);
}

TEST(Io, MixedGivenAndOmittedWeightsRejected) {
  const auto j = io::json::parse(R"({"x":1,"y":2,"edges":[{"x":0,"y":0,"p":1},{"x":0,"y":1}]})");
  EXPECT_THROW(io::bipartite_from_json(j), Error);
  EXPECT_THROW(io::graph_from_json(io::json::parse(R"({"schema":2,"vertices":1,"edges":[]})")), Error);
}

TEST(Io, MatrixRoundTripIsExact) {
  const auto m = fourier_matrix(3);
  const auto back = io::matrix_from_json(io::json::parse(io::matrix_to_json(m).dump()));
  EXPECT_EQ(back, m);
}

TEST(Io, ModelDispatch) {
  auto j = io::graph_to_json(generators::cycle(4));
  j["coin"] = "hadamard";
  auto m = io::model_from_json(j);
  ASSERT_TRUE(std::holds_alternative<io::CoinedModel>(m));
  EXPECT_LE(max_abs_diff(std::get<io::CoinedModel>(m).coins.block(3), hadamard_gate()), 0.0);
  j["coin"] = "spinor";
  EXPECT_THROW(io::model_from_json(j), Error);
  const auto back = io::model_from_json(io::model_to_json(io::model_from_json(io::json::parse(
      R"({"model":"staggered","vertices":3,"edges":[[0,1],[1,2]],
          "alpha":[{"support":[0,1]},{"support":[2]}],"beta":[{"support":[0]},{"support":[1,2]}]})"))));
  EXPECT_TRUE(std::holds_alternative<io::StaggeredModel>(back));
  EXPECT_EQ(io::evolution_operator(back).rows(), 3);
}

TEST(Io, TraceCsvFormat) {
  ProbabilityTrace t;
  t.rows.push_back({0, 0.25, {0.25}, 0.5});
  t.rows.push_back({1, 0.5, {0.5}, 0.5});
  t.argmax_t = 1;
  t.max_p = 0.5;
  EXPECT_EQ(io::trace_csv(t), "t,p_marked,p_max_vertex,argmax_flag\n0,0.25,0.5,0\n1,0.5,0.5,1\n");
  EXPECT_EQ(io::probability_csv({{1.0, 0.0}}), "t,prob_v0,prob_v1\n0,1,0\n");
  EXPECT_EQ(io::format_double(0.1), "0.1");
}

TEST(Cli, VerifyWorkedExamplePair) {
  const auto dir = scratch("verify");
  ASSERT_EQ(cli(dir, "demo --out-dir " + (dir / "demo").string()).code, 0);
  const auto r = cli(dir, "verify --a " + (dir / "demo/example_coined.json").string() + " --b " +
                              (dir / "demo/example_szegedy.json").string() + " --map " +
                              (dir / "demo/example_map.json").string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = io::json::parse(r.out);
  EXPECT_LE(report.at("max_abs_diff").get<double>(), 1e-12);
  EXPECT_EQ(report.at("idle_dimension"), 8);
  EXPECT_EQ(report.at("verdict"), true);
}

TEST(Cli, DegreeThreeYRejectedWithExitOne) {
  const auto dir = scratch("degree3");
  write(dir / "spec.json", io::json::parse(R"({"schema":1,"model":"szegedy","x":3,"y":2,
    "edges":[{"x":0,"y":1},{"x":1,"y":1},{"x":0,"y":0},{"x":1,"y":0},{"x":2,"y":0}]})"));
  const auto r = cli(dir, "convert --from szegedy --to coined --in " + (dir / "spec.json").string() + " --out " +
                              (dir / "out.json").string());
  EXPECT_EQ(r.code, 1);
  const auto err = io::json::parse(r.err);
  EXPECT_EQ(err.at("error"), "HypothesisViolated");
  EXPECT_EQ(err.at("subject"), "y");
  EXPECT_EQ(err.at("index"), 0);
}

TEST(Cli, ConversionsRoundTrip) {
  const auto dir = scratch("convert");
  auto model = io::graph_to_json(generators::complete(4));
  model["model"] = "coined";
  write(dir / "coined.json", model);
  const auto d = dir.string();
  auto r = cli(dir, "convert --from coined --to staggered --in " + d + "/coined.json --out " + d + "/st.json");
  ASSERT_EQ(r.code, 0) << r.err;
  r = cli(dir, "convert --from staggered --to szegedy --in " + d + "/st.json --out " + d + "/sz.json --map-out " + d +
                   "/map.json");
  ASSERT_EQ(r.code, 0) << r.err;
  r = cli(dir, "verify --a " + d + "/st.json --b " + d + "/sz.json --map " + d + "/map.json");
  EXPECT_EQ(r.code, 0) << r.err;
  r = cli(dir, "convert --from szegedy --to coined --in " + d + "/sz.json --out " + d + "/back.json");
  EXPECT_EQ(r.code, 0) << r.err;
  r = cli(dir, "convert --from staggered --to coined --in " + d + "/st.json --out " + d + "/back2.json");
  EXPECT_EQ(r.code, 0) << r.err;
  r = cli(dir, "convert --from szegedy --to staggered --in " + d + "/sz.json --out " + d + "/st2.json");
  EXPECT_EQ(r.code, 0) << r.err;
  r = cli(dir, "convert --from coined --to szegedy --in " + d + "/coined.json --out " + d + "/sz2.json");
  EXPECT_EQ(r.code, 0) << r.err;
  r = cli(dir, "convert --from szegedy --to coined --in " + d + "/coined.json --out " + d + "/x.json");
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, FourierCoinRejected) {
  const auto dir = scratch("fourier");
  auto model = io::graph_to_json(generators::complete(5));
  model["coin"] = "fourier";
  write(dir / "k5.json", model);
  const auto r = cli(dir, "convert --from coined --to staggered --in " + (dir / "k5.json").string() + " --out " +
                              (dir / "o.json").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(io::json::parse(r.err).at("error"), "CoinNotOrthogonalReflection");
}

TEST(Cli, SearchTraceHasStepsPlusOneRows) {
  const auto dir = scratch("search");
  write(dir / "torus.json", io::graph_to_json(generators::torus(3, 3)));
  for (const char* model : {"coined", "staggered", "szegedy"}) {
    const auto out = dir / (std::string(model) + ".csv");
    const auto r = cli(dir, std::string("search --model ") + model + " --graph " + (dir / "torus.json").string() +
                                " --marked 4 --steps 50 --out " + out.string());
    ASSERT_EQ(r.code, 0) << r.err;
    const auto text = oracle::slurp(out.string());
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 52);
    EXPECT_EQ(text.rfind("t,p_marked,p_max_vertex,argmax_flag\n0,0.1111111111111111,", 0), 0u) << model;
  }
}

TEST(Cli, DumpEvolveAndBuild) {
  const auto dir = scratch("dump");
  write(dir / "c.json", io::graph_to_json(generators::cycle(3)));
  const auto d = dir.string();
  auto r = cli(dir, "dump --in " + d + "/c.json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = io::json::parse(r.out);
  EXPECT_EQ(io::matrix_from_json(j.at("matrix")).rows(), 6);
  r = cli(dir, "evolve --in " + d + "/c.json --steps 3");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("t,prob_v0,prob_v1,prob_v2\n", 0), 0u);
  r = cli(dir, "build --in " + d + "/c.json --out " + d + "/b.json");
  EXPECT_EQ(r.code, 0);
  const auto a = cli(dir, "build --generate random-bipartite --x 5 --y 7 --seed 3");
  const auto b = cli(dir, "build --generate random-bipartite --x 5 --y 7 --seed 3");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, cli(dir, "build --generate random-bipartite --x 5 --y 7 --seed 4").out);
  EXPECT_EQ(cli(dir, "build --generate torus --rows 3 --cols 4").code, 0);
  EXPECT_EQ(cli(dir, "build --generate moebius").code, 1);
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("codes");
  EXPECT_EQ(cli(dir, "dump --in " + (dir / "missing.json").string()).code, 2);
  io::write_text_file((dir / "bad.json").string(), "{ not json");
  EXPECT_EQ(cli(dir, "dump --in " + (dir / "bad.json").string()).code, 1);
  EXPECT_EQ(cli(dir, "frobnicate").code, 1);
  write(dir / "c.json", io::graph_to_json(generators::cycle(3)));
  setenv("QWALK_TOL", "abc", 1);
  EXPECT_EQ(cli(dir, "dump --in " + (dir / "c.json").string()).code, 1);
  setenv("QWALK_TOL", "1e-9", 1);
  EXPECT_EQ(cli(dir, "dump --in " + (dir / "c.json").string()).code, 0);
  unsetenv("QWALK_TOL");
}

TEST(Cli, LoopsAreFlagged) {
  const auto dir = scratch("loops");
  write(dir / "l.json", io::json::parse(R"({"vertices":2,"edges":[[0,0],[0,1]]})"));
  const auto r = cli(dir, "dump --in " + (dir / "l.json").string() + " --out " + (dir / "o.json").string());
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("loops"), std::string::npos);
}
