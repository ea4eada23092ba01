#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsq/dsquare.hpp"
#include "dsq/error.hpp"
#include "dsq/graph_io.hpp"
#include "dsq/pipeline.hpp"
#include "dsq/verify_suites.hpp"

using namespace dsq;

namespace {

struct ParamFlags {
  std::string variant = "star16";
  std::string mode = "desk";
  std::string family = "complete";
  std::string params_file;
  std::uint32_t q = 0;
  std::uint32_t m0 = 4;
  std::uint32_t ell = 2;
  std::uint64_t seed = kDefaultSeed;
  double tol = 1e-9;

  CLI::Option* o_variant = nullptr;
  CLI::Option* o_mode = nullptr;
  CLI::Option* o_family = nullptr;
  CLI::Option* o_q = nullptr;
  CLI::Option* o_m0 = nullptr;
  CLI::Option* o_ell = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_tol = nullptr;

  void attach(CLI::App* cmd) {
    o_variant = cmd->add_option("--variant", variant, "stage-one variant: classic4 | star16");
    o_mode = cmd->add_option("--mode", mode, "desk | faithful");
    o_family = cmd->add_option("--family", family, "aux family: complete | searched");
    cmd->add_option("--params-file", params_file, "JSON file with parameter defaults");
    o_q = cmd->add_option("--q", q, "base power for X1 (0 = variant default)");
    o_m0 = cmd->add_option("--m0", m0, "base level count");
    o_ell = cmd->add_option("--ell", ell, "tail level count");
    o_seed = cmd->add_option("--seed", seed, "PRNG seed (echoed in output)");
    o_tol = cmd->add_option("--tol", tol, "numeric tolerance for certified brackets");
  }

  // precedence: subcommand defaults < params file < flags typed on the line
  PipelineParams build() const {
    PipelineParams p;
    p.variant = parse_variant(variant);
    p.mode = parse_mode(mode);
    p.family = parse_family(family);
    p.q = q;
    p.m0 = m0;
    p.ell = ell;
    p.seed = seed;
    p.tol = tol;
    if (!params_file.empty()) {
      std::ifstream f(params_file);
      if (!f) throw Error("IoError", "cannot open '" + params_file + "'");
      Json j = Json::parse(f, nullptr, true, true);
      p.q = j.value("q", p.q);
      p.m0 = j.value("m0", p.m0);
      p.ell = j.value("ell", p.ell);
      p.seed = j.value("seed", p.seed);
      p.tol = j.value("tol", p.tol);
      if (j.contains("variant")) p.variant = parse_variant(j["variant"].get<std::string>());
      if (j.contains("mode")) p.mode = parse_mode(j["mode"].get<std::string>());
      if (j.contains("family")) p.family = parse_family(j["family"].get<std::string>());
      if (j.contains("mu_target")) p.mu_target = parse_rat(j["mu_target"].get<std::string>());
      if (j.contains("search_attempts")) p.search_attempts = j["search_attempts"].get<std::uint32_t>();
      if (j.contains("search_bound")) p.search_bound = j["search_bound"].get<std::uint32_t>();
      if (j.contains("auto_levels")) p.auto_levels = j["auto_levels"].get<bool>();
    }
    if (o_variant && o_variant->count()) p.variant = parse_variant(variant);
    if (o_mode && o_mode->count()) p.mode = parse_mode(mode);
    if (o_family && o_family->count()) p.family = parse_family(family);
    if (o_q && o_q->count()) p.q = q;
    if (o_m0 && o_m0->count()) p.m0 = m0;
    if (o_ell && o_ell->count()) p.ell = ell;
    if (o_seed && o_seed->count()) p.seed = seed;
    if (o_tol && o_tol->count()) p.tol = tol;
    return p;
  }

  static StageOneVariant parse_variant(const std::string& s) {
    if (s == "classic4") return StageOneVariant::classic4;
    if (s == "star16") return StageOneVariant::star16;
    throw Error("BadFlag", "unknown variant '" + s + "'");
  }
  static PipelineMode parse_mode(const std::string& s) {
    if (s == "desk") return PipelineMode::desk;
    if (s == "faithful") return PipelineMode::faithful;
    throw Error("BadFlag", "unknown mode '" + s + "'");
  }
  static AuxFamily parse_family(const std::string& s) {
    if (s == "complete") return AuxFamily::complete;
    if (s == "searched") return AuxFamily::searched;
    throw Error("BadFlag", "unknown family '" + s + "'");
  }
};

void write_json(const Json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw Error("IoError", "cannot open '" + out_path + "' for writing");
  f << j.dump(2) << '\n';
}

int cmd_ustcon(const std::string& file, std::uint32_t s, std::uint32_t t,
               const ParamFlags& flags, const std::string& out_path) {
  UndirectedGraph y = load_undirected(file);
  PipelineParams params = flags.build();
  UstconVerdict v = ustcon(y, s, t, params);
  write_json(v.to_json(params), out_path);
  std::cerr << "ustcon " << s << " -> " << t << ": "
            << (v.connected ? "connected" : "not connected") << " (level " << v.level
            << ", peak_bits " << v.ledger.peak_bits << ", steps " << v.ledger.steps << ")\n";
  return v.connected ? 0 : 1;
}

int cmd_dsquare(const std::string& file_x, const std::string& file_g,
                const std::string& out_path, bool check) {
  RotationGraph x = load_rotation_graph(file_x);
  RotationGraph g = load_rotation_graph(file_g);
  RotationGraph h = dsquare(x, g);

  if (check) {
    auto vr = validate(h);
    if (!vr.ok) throw Error("ImproperLabeling", "product failed validation");
    // against a complete-with-loops aux the product must be the plain square
    bool complete = true;
    for (std::uint32_t v = 0; v < g.n && complete; ++v)
      for (std::uint32_t i = 0; i < g.d; ++i)
        if (g.rot(v, i) != RotStep{i, v}) {
          complete = false;
          break;
        }
    if (complete && g.n == g.d) {
      auto hc = adjacency_counts(h);
      auto xc = adjacency_counts(x);
      std::vector<std::vector<std::uint64_t>> sq(x.n, std::vector<std::uint64_t>(x.n, 0));
      for (std::uint32_t u = 0; u < x.n; ++u)
        for (std::uint32_t k = 0; k < x.n; ++k)
          for (std::uint32_t w = 0; w < x.n; ++w)
            sq[u][w] += std::uint64_t(xc[u][k]) * xc[k][w];
      for (std::uint32_t u = 0; u < x.n; ++u)
        for (std::uint32_t w = 0; w < x.n; ++w)
          if (sq[u][w] != hc[u][w])
            throw Error("CheckFailed", "square degeneration mismatch at (" +
                                           std::to_string(u) + "," + std::to_string(w) + ")");
      std::cerr << "check: complete aux, counts equal the squared adjacency\n";
    } else {
      std::cerr << "check: validation passed\n";
    }
  }

  if (out_path.empty()) {
    emit_rotation_graph(std::cout, h);
  } else {
    std::ofstream f(out_path);
    if (!f) throw Error("IoError", "cannot open '" + out_path + "' for writing");
    emit_rotation_graph(f, h);
  }
  std::cerr << "dsquare: " << h.n << " vertices, degree " << h.d
            << (h.undirected ? ", undirected" : "") << '\n';
  return 0;
}

int cmd_verify(const std::vector<std::string>& suites, std::uint64_t seed, double tol,
               const std::string& out_path) {
  std::vector<Report> reports = run_suites(suites, seed, tol);
  Json arr = Json::array();
  bool all_ok = true;
  for (const auto& r : reports) {
    arr.push_back(r.to_json());
    all_ok = all_ok && r.ok;
    std::ostringstream line;
    line << (r.ok ? "  ok  " : " FAIL ") << r.check;
    std::cerr << line.str() << '\n';
  }
  Json out;
  out["ok"] = all_ok;
  out["seed"] = seed;
  out["tol"] = tol;
  out["checks"] = arr;
  write_json(out, out_path);
  std::cerr << (all_ok ? "verify: all checks passed" : "verify: FAILURES above") << '\n';
  return all_ok ? 0 : 1;
}

int cmd_schedule(std::uint64_t n, const ParamFlags& flags, const std::string& out_path) {
  PipelineParams params = flags.build();
  PipelineSchedule s = compute_schedule(params, Int(static_cast<unsigned long>(n)));
  write_json(s.to_json(), out_path);
  std::cerr << "schedule: mode "
            << (s.mode == PipelineMode::faithful ? "faithful" : "desk") << ", N " << n
            << ", m0 " << s.m0 << ", ell " << s.ell << ", m1 " << s.m1 << '\n';
  for (const auto& r : s.rows)
    std::cerr << "  level " << r.level.get_str() << ": deg(X) " << r.x_degree_str()
              << ", aux " << r.g_vertices_str() << " vertices, degree " << r.g_degree_str()
              << (r.g_bound.empty() ? "" : ", mixing <= " + r.g_bound) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"derandomized-squaring connectivity toolkit"};
  app.require_subcommand(1);

  // ustcon
  auto* ust = app.add_subcommand("ustcon", "decide s-t connectivity via the edge lookup");
  std::string ust_file;
  std::uint32_t ust_s = 0, ust_t = 0;
  std::string ust_out;
  ParamFlags ust_flags;
  ust->add_option("file", ust_file, "undirected edge-list file")->required();
  ust->add_option("s", ust_s, "source vertex")->required();
  ust->add_option("t", ust_t, "target vertex")->required();
  ust->add_option("--out", ust_out, "write the JSON verdict here instead of stdout");
  ust_flags.attach(ust);

  // dsquare
  auto* dsq = app.add_subcommand("dsquare", "product of a base graph with an auxiliary");
  std::string dsq_x, dsq_g, dsq_out;
  bool dsq_check = false;
  dsq->add_option("X", dsq_x, "base rotation-map file")->required();
  dsq->add_option("G", dsq_g, "auxiliary rotation-map file")->required();
  dsq->add_option("--out,-o", dsq_out, "output file (stdout otherwise)");
  dsq->add_flag("--check", dsq_check, "validate the product; with a complete aux, compare to the plain square");

  // verify
  auto* ver = app.add_subcommand("verify", "run the inequality suites");
  std::vector<std::string> ver_suites;
  std::uint64_t ver_seed = kDefaultSeed;
  double ver_tol = 1e-9;
  std::string ver_out;
  bool ver_list = false;
  ver->add_option("--suite", ver_suites, "suite name (repeatable; default all)");
  ver->add_option("--seed", ver_seed, "PRNG seed");
  ver->add_option("--tol", ver_tol, "tolerance for bracketed comparisons");
  ver->add_option("--out", ver_out, "write the JSON report here instead of stdout");
  ver->add_flag("--list", ver_list, "list suite names and exit");

  // schedule
  auto* sch = app.add_subcommand("schedule", "level table for N vertices");
  std::uint64_t sch_n = 2;
  std::string sch_out;
  ParamFlags sch_flags;
  sch_flags.mode = "faithful";
  sch->add_option("N", sch_n, "input vertex count")->required();
  sch->add_option("--out", sch_out, "write the JSON table here instead of stdout");
  sch_flags.attach(sch);

  CLI11_PARSE(app, argc, argv);

  try {
    if (ust->parsed()) return cmd_ustcon(ust_file, ust_s, ust_t, ust_flags, ust_out);
    if (dsq->parsed()) return cmd_dsquare(dsq_x, dsq_g, dsq_out, dsq_check);
    if (ver->parsed()) {
      if (ver_list) {
        for (const auto& s : suite_registry()) std::cout << s.name << '\n';
        return 0;
      }
      return cmd_verify(ver_suites, ver_seed, ver_tol, ver_out);
    }
    if (sch->parsed()) return cmd_schedule(sch_n, sch_flags, sch_out);
  } catch (const Error& e) {
    Json err;
    err["error"] = e.code();
    err["detail"] = e.what();
    std::cout << err.dump(2) << '\n';
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
