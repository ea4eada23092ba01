#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dsq/dsquare.hpp"
#include "dsq/error.hpp"
#include "dsq/graph_io.hpp"
#include "dsq/pipeline.hpp"
#include "dsq/rotation_graph.hpp"

using namespace dsq;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "dsqtool-tests";
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string make_file(const std::string& name, const std::string& content) {
  fs::path p = scratch_dir() / name;
  std::ofstream f(p);
  f << content;
  return p.string();
}

struct ToolRun {
  int code = -1;
  std::string out;
};

ToolRun run_tool(const std::string& args) {
  std::string cmd = std::string("\"") + DSQTOOL_PATH + "\" " + args + " 2>/dev/null";
  ToolRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.out += buf;
  int status = pclose(pipe);
  if (WIFEXITED(status)) r.code = WEXITSTATUS(status);
  return r;
}

const char* kTriangle = "ug 3\n0 1\n1 2\n0 2\n";
const char* kTwoTriangles = "ug 6\n0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n";

}  // namespace

TEST_CASE("rotation graph text round trip") {
  Prng rng(9);
  RotationGraph g = random_involution_graph(6, 3, rng);
  std::ostringstream os;
  emit_rotation_graph(os, g);
  std::istringstream is(os.str());
  RotationGraph back = parse_rotation_graph(is);
  CHECK(back.n == g.n);
  CHECK(back.d == g.d);
  CHECK(back.to == g.to);
  CHECK(back.in_label == g.in_label);
  CHECK(back.undirected);  // recomputed from the parsed map
}

TEST_CASE("rotation parser skips comments and blanks") {
  std::istringstream is(
      "# tiny loop\n"
      "\n"
      "rotg 1 1   # header\n"
      "  0 0 0 0\n");
  RotationGraph g = parse_rotation_graph(is);
  CHECK(g.n == 1);
  CHECK(g.rot(0, 0) == RotStep{0, 0});
  CHECK(g.undirected);
}

TEST_CASE("rotation parser cites line numbers") {
  auto fails_with = [](const std::string& text, const std::string& needle) {
    std::istringstream is(text);
    try {
      parse_rotation_graph(is);
      FAIL("expected a ParseError for: ", text);
    } catch (const Error& e) {
      INFO(e.what());
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  fails_with("xotg 1 1\n", "line 1");
  fails_with("rotg 0 1\n", "line 1");
  fails_with("rotg 1 1\n0 0 0\n", "line 2: bad edge line");
  fails_with("# preamble\nrotg 1 1\n0 0 0 0 9\n", "line 3: trailing tokens");
  fails_with("rotg 1 1\n0 0 5 0\n", "line 2: edge line out of range");
  fails_with("rotg 1 2\n0 0 0 0\n0 0 0 1\n", "line 3: slot (0,0) given twice");
  fails_with("rotg 2 1\n0 0 1 0\n", "expected 2 edge lines, got 1");
  std::istringstream empty("  \n# nothing\n");
  CHECK_THROWS_WITH_AS(parse_rotation_graph(empty), doctest::Contains("missing header"),
                       Error);
  std::istringstream huge("rotg 100000 100\n");
  CHECK_THROWS_WITH_AS(parse_rotation_graph(huge), doctest::Contains("SlotBound"), Error);
}

TEST_CASE("undirected edge list parsing") {
  std::istringstream is("ug 3\n0 1\n1 2\n2 2\n");
  UndirectedGraph g = parse_undirected(is);
  CHECK(g.n == 3);
  REQUIRE(g.edges.size() == 3);
  CHECK(g.edges[2] == std::pair<std::uint32_t, std::uint32_t>{2, 2});

  std::ostringstream os;
  emit_undirected(os, g);
  std::istringstream round(os.str());
  UndirectedGraph back = parse_undirected(round);
  CHECK(back.n == g.n);
  CHECK(back.edges == g.edges);

  std::istringstream bad("ug 2\n0 1\n0 7\n");
  CHECK_THROWS_WITH_AS(parse_undirected(bad), doctest::Contains("line 3"), Error);
  std::istringstream junk("ug 2\nzero one\n");
  CHECK_THROWS_WITH_AS(parse_undirected(junk), doctest::Contains("line 2"), Error);
  std::istringstream zero("ug 0\n");
  CHECK_THROWS_AS(parse_undirected(zero), Error);
}

TEST_CASE("loaders raise IoError for missing paths") {
  CHECK_THROWS_WITH_AS(load_rotation_graph("/nonexistent/g.rotg"),
                       doctest::Contains("IoError"), Error);
  CHECK_THROWS_AS(load_undirected("/nonexistent/g.ug"), Error);
}

TEST_CASE("matrix and vector json codecs") {
  RatMat m(2, 3);
  m.at(0, 0) = Rat(1, 3);
  m.at(1, 2) = Rat(-7, 2);
  RatMat back = matrix_from_json(matrix_to_json(m));
  CHECK(back == m);

  RatVec v{Rat(0), Rat(5, 4)};
  CHECK(vector_from_json(vector_to_json(v)) == v);

  Json ragged = Json::array({Json::array({"1", "2"}), Json::array({"3"})});
  CHECK_THROWS_WITH_AS(matrix_from_json(ragged), doctest::Contains("ragged"), Error);
  CHECK_THROWS_AS(matrix_from_json(Json::array()), Error);
  CHECK_THROWS_AS(vector_from_json(Json::object()), Error);
}

TEST_CASE("tool: ustcon verdicts and exit codes") {
  std::string tri = make_file("triangle.ug", kTriangle);
  ToolRun yes = run_tool("ustcon " + tri + " 0 2");
  REQUIRE(yes.code == 0);
  Json jy = Json::parse(yes.out);
  CHECK(jy["connected"] == true);
  CHECK(jy["level"] == 6);
  CHECK(jy["params"]["variant"] == "star16");
  CHECK(jy["ledger"]["steps"] == 64);

  std::string two = make_file("two.ug", kTwoTriangles);
  ToolRun no = run_tool("ustcon " + two + " 0 4");
  REQUIRE(no.code == 1);
  CHECK(Json::parse(no.out)["connected"] == false);
}

TEST_CASE("tool: malformed input exits 2 and cites the line") {
  std::string bad = make_file("bad.ug", "ug 3\n0 1\n0 1 junk\n");
  ToolRun r = run_tool("ustcon " + bad + " 0 2");
  CHECK(r.code == 2);
  Json j = Json::parse(r.out);
  CHECK(j["error"] == "ParseError");
  CHECK(std::string(j["detail"]).find("line 3") != std::string::npos);

  ToolRun missing = run_tool("ustcon /no/such/file.ug 0 1");
  CHECK(missing.code == 2);
  CHECK(Json::parse(missing.out)["error"] == "IoError");
}

TEST_CASE("tool: dsquare with the degeneration check") {
  RotationGraph x = from_undirected(cycle_graph(4));
  std::ostringstream xo, go;
  emit_rotation_graph(xo, x);
  emit_rotation_graph(go, complete_with_loops(2));
  std::string xf = make_file("c4.rotg", xo.str());
  std::string gf = make_file("k2l.rotg", go.str());
  std::string outf = (scratch_dir() / "prod.rotg").string();

  ToolRun r = run_tool("dsquare " + xf + " " + gf + " --check -o " + outf);
  REQUIRE(r.code == 0);
  RotationGraph prod = load_rotation_graph(outf);
  RotationGraph expect = dsquare(x, complete_with_loops(2));
  CHECK(prod.to == expect.to);
  CHECK(prod.in_label == expect.in_label);
  CHECK(prod.to == power(x, 2).to);

  // re-emitting the parsed product is byte-identical
  std::ostringstream again;
  emit_rotation_graph(again, prod);
  std::ifstream f(outf);
  std::stringstream disk;
  disk << f.rdbuf();
  CHECK(again.str() == disk.str());

  ToolRun mismatch = run_tool("dsquare " + xf + " " + xf);
  CHECK(mismatch.code == 2);
  CHECK(Json::parse(mismatch.out)["error"] == "DimensionMismatch");
}

TEST_CASE("tool: verify runs selected suites") {
  ToolRun r = run_tool("verify --suite sedrakyan --suite mixing-bound-function --seed 5");
  REQUIRE(r.code == 0);
  Json j = Json::parse(r.out);
  CHECK(j["ok"] == true);
  CHECK(j["seed"] == 5);
  REQUIRE(j["checks"].size() == 2);
  CHECK(j["checks"][0]["check"] == "sedrakyan");
  CHECK(j["checks"][0]["ok"] == true);
  CHECK(j["checks"][1]["check"] == "mixing-bound-function");

  ToolRun unknown = run_tool("verify --suite no-such-suite");
  CHECK(unknown.code == 2);
  CHECK(Json::parse(unknown.out)["error"] == "UnknownSuite");

  ToolRun list = run_tool("verify --list");
  CHECK(list.code == 0);
  CHECK(list.out.find("sedrakyan\n") != std::string::npos);
  CHECK(list.out.find("ustcon-oracle\n") != std::string::npos);
  CHECK(list.out.find("pipeline-gap-recurrence\n") != std::string::npos);
}

TEST_CASE("tool: schedule tables") {
  ToolRun faithful = run_tool("schedule 2");
  REQUIRE(faithful.code == 0);
  Json jf = Json::parse(faithful.out);
  CHECK(jf["mode"] == "faithful");  // schedule defaults to the symbolic table
  CHECK(jf["m0"] == 100);
  CHECK(jf["ell"] == 10);
  CHECK(jf["degree_bound_holds"] == true);
  CHECK(jf["tail_gap_bound_holds"] == true);
  CHECK(jf["rows"][0]["x_degree"] == "Q");

  ToolRun six = run_tool("schedule 6");
  CHECK(Json::parse(six.out)["m0"] == 300);

  ToolRun desk = run_tool("schedule 6 --mode desk");
  REQUIRE(desk.code == 0);
  Json jd = Json::parse(desk.out);
  CHECK(jd["mode"] == "desk");
  CHECK(jd["q"] == 1);
  REQUIRE(jd["rows"].size() == 6);
  CHECK(jd["rows"][0]["x_degree"] == "16");
  CHECK(jd["rows"][1]["x_degree"] == "256");

  ToolRun bad = run_tool("schedule 6 --mode sideways");
  CHECK(bad.code == 2);
  CHECK(Json::parse(bad.out)["error"] == "BadFlag");
}

TEST_CASE("tool: params file sits between defaults and flags") {
  std::string tri = make_file("triangle2.ug", kTriangle);
  std::string pf = make_file("params.json",
                             "{\"seed\": 123, \"q\": 1, \"variant\": \"classic4\"}");

  ToolRun from_file = run_tool("ustcon " + tri + " 0 1 --params-file " + pf);
  REQUIRE(from_file.code == 0);
  Json j1 = Json::parse(from_file.out);
  CHECK(j1["params"]["variant"] == "classic4");
  CHECK(j1["params"]["q"] == 1);
  CHECK(j1["seed"] == 123);

  ToolRun overridden =
      run_tool("ustcon " + tri + " 0 1 --params-file " + pf + " --seed 999");
  REQUIRE(overridden.code == 0);
  Json j2 = Json::parse(overridden.out);
  CHECK(j2["seed"] == 999);                       // flag wins
  CHECK(j2["params"]["variant"] == "classic4");   // file value survives
}
