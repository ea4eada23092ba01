#include "dsq/verify_suites.hpp"

#include <algorithm>
#include <functional>

#include "dsq/dsquare.hpp"
#include "dsq/error.hpp"
#include "dsq/expansion.hpp"
#include "dsq/pipeline.hpp"
#include "dsq/spectral.hpp"

namespace dsq {

namespace {

// Aggregates per-instance reports into one suite report.
struct Agg {
  Report out;
  std::uint64_t total = 0;
  std::uint64_t failed = 0;

  explicit Agg(const std::string& name, std::uint64_t seed, double tol) {
    out.check = name;
    out.ok = true;
    out.seed = seed;
    out.tol = tol;
  }
  void add(const Report& r) {
    ++total;
    if (!r.ok) {
      ++failed;
      out.ok = false;
      if (!out.details.contains("first_failure")) out.details["first_failure"] = r.to_json();
    }
  }
  void add(bool ok, const std::string& what) {
    ++total;
    if (!ok) {
      ++failed;
      out.ok = false;
      if (!out.details.contains("first_failure")) out.details["first_failure"] = what;
    }
  }
  Report finish() {
    out.details["instances"] = total;
    out.details["failed"] = failed;
    return out;
  }
};

RotationGraph disjoint_union(const RotationGraph& a, const RotationGraph& b) {
  if (a.d != b.d) throw Error("DimensionMismatch", "union needs equal degrees");
  RotationGraph g;
  g.n = a.n + b.n;
  g.d = a.d;
  g.to = a.to;
  g.in_label = a.in_label;
  for (std::size_t s = 0; s < b.to.size(); ++s) {
    g.to.push_back(b.to[s] + a.n);
    g.in_label.push_back(b.in_label[s]);
  }
  g.undirected = a.undirected && b.undirected;
  return g;
}

UndirectedGraph random_simple_graph(std::uint32_t n, std::uint32_t percent, Prng& rng) {
  UndirectedGraph y;
  y.n = n;
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v)
      if (rand_below(rng, 100) < percent) y.edges.push_back({u, v});
  return y;
}

struct Dsu {
  std::vector<std::uint32_t> p;
  explicit Dsu(std::uint32_t n) : p(n) {
    for (std::uint32_t i = 0; i < n; ++i) p[i] = i;
  }
  std::uint32_t find(std::uint32_t x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) { p[find(a)] = find(b); }
};

// ------------------------------------------------------------------ suites

Report suite_connected_expansion(std::uint64_t seed, double tol) {
  Agg agg("connected-expansion", seed, tol);
  Prng rng(seed);
  std::vector<RotationGraph> instances;
  instances.push_back(from_undirected(cycle_graph(5)));
  instances.push_back(from_undirected(complete_graph(4)));
  instances.push_back(complete_with_loops(6));
  for (int i = 0; i < 8; ++i) {
    std::uint32_t n = 4 + rand_below(rng, 7);
    std::uint32_t d = 2 + rand_below(rng, 3);
    instances.push_back(random_involution_graph(n, d, rng));
  }
  instances.push_back(disjoint_union(from_undirected(cycle_graph(4)),
                                     from_undirected(cycle_graph(5))));
  for (const auto& g : instances) agg.add(check_connected_expansion_bound(g));
  return agg.finish();
}

Report suite_directed_connectivity_mixing(std::uint64_t seed, double tol) {
  Agg agg("directed-connectivity-mixing", seed, tol);
  Prng rng(seed);
  agg.add(check_directed_mixing_bound(add_self_loops(from_undirected(cycle_graph(5)), 1), tol));
  agg.add(check_directed_mixing_bound(complete_with_loops(5), tol));
  for (int i = 0; i < 6; ++i) {
    std::uint32_t n = 3 + rand_below(rng, 6);
    std::uint32_t d = 2 + rand_below(rng, 3);
    agg.add(check_directed_mixing_bound(add_self_loops(random_rotation_graph(n, d, rng), 1), tol));
  }
  return agg.finish();
}

Report suite_norm_contraction(std::uint64_t seed, double tol) {
  Agg agg("norm-contraction", seed, tol);
  Prng rng(seed);
  for (int i = 0; i < 10; ++i) {
    std::uint32_t n = 2 + rand_below(rng, 8);
    std::uint32_t d = 1 + rand_below(rng, 4);
    RotationGraph g = random_rotation_graph(n, d, rng);
    agg.add(check_norm_one(to_adjacency(g), 16, rng()));
  }
  agg.add(check_norm_one(RatMat::uniform(7), 16, seed));
  return agg.finish();
}

Report suite_sedrakyan(std::uint64_t seed, double tol) {
  Agg agg("sedrakyan", seed, tol);
  Prng rng(seed);
  for (int i = 0; i < 200; ++i) {
    std::size_t n = 1 + rand_below(rng, 8);
    RatVec u(n), v(n);
    for (std::size_t k = 0; k < n; ++k) {
      u[k] = Rat(static_cast<long>(rand_below(rng, 19)) - 9, 1 + rand_below(rng, 6));
      u[k].canonicalize();
      v[k] = Rat(1 + rand_below(rng, 12), 1 + rand_below(rng, 6));
      v[k].canonicalize();
    }
    SedrakyanResult s = sedrakyan_check(u, v);
    Rat sv(0);
    for (const Rat& x : v) sv += x;
    bool identity = s.certificate >= 0 && (s.lhs - s.rhs) * sv == s.certificate;
    agg.add(s.ok && identity, "sedrakyan instance " + std::to_string(i));
  }
  return agg.finish();
}

Report suite_averaging_decomposition(std::uint64_t seed, double tol) {
  Agg agg("averaging-decomposition", seed, tol);
  Prng rng(seed);
  agg.add(jd_decompose(RatMat::uniform(5), Rat(1, 3), 16, rng()).report);
  agg.add(jd_decompose(to_adjacency(complete_with_loops(4)), Rat(1, 2), 16, rng()).report);
  for (int i = 0; i < 6; ++i) {
    std::uint32_t n = 2 + rand_below(rng, 6);
    std::uint32_t d = 1 + rand_below(rng, 4);
    RotationGraph g = random_rotation_graph(n, d, rng);
    Rat eta = i % 2 ? Rat(1) : Rat(1, 2);
    agg.add(jd_decompose(to_adjacency(g), eta, 8, rng()).report);
  }
  return agg.finish();
}

Report suite_mixing_bound_function(std::uint64_t seed, double tol) {
  Report r = f_props_check(16);
  r.seed = seed;
  r.tol = tol;
  return r;
}

Report suite_dsquare_mixing_sweep(std::uint64_t seed, double tol) {
  Agg agg("dsquare-mixing-sweep", seed, tol);
  Prng rng(seed);
  for (int i = 0; i < 10; ++i) {
    std::uint32_t n = 3 + rand_below(rng, 6);
    std::uint32_t k = 2 + rand_below(rng, 3);
    std::uint32_t dd = 2 + rand_below(rng, 2);
    RotationGraph x = random_involution_graph(n, k, rng);
    RotationGraph g = random_involution_graph(k, dd, rng);
    agg.add(verify_dsquare_mixing(x, g, tol).report);
  }
  return agg.finish();
}

Report suite_five_step_identity(std::uint64_t seed, double tol) {
  Agg agg("five-step-identity", seed, tol);
  Prng rng(seed);
  agg.add(five_step_identity_check(from_undirected(cycle_graph(4)),
                                   complete_with_loops(2)));
  for (int i = 0; i < 8; ++i) {
    std::uint32_t n = 2 + rand_below(rng, 5);
    std::uint32_t k = 2 + rand_below(rng, 3);
    std::uint32_t dd = 1 + rand_below(rng, 3);
    RotationGraph x = random_involution_graph(n, k, rng);
    RotationGraph g = random_rotation_graph(k, dd, rng);
    agg.add(five_step_identity_check(x, g));
  }
  return agg.finish();
}

Report suite_sparse_cut_witness(std::uint64_t seed, double tol) {
  Agg agg("sparse-cut-witness", seed, tol);
  Prng rng(seed);
  std::vector<RotationGraph> instances;
  instances.push_back(from_undirected(cycle_graph(6)));
  instances.push_back(from_undirected(cycle_graph(8)));
  instances.push_back(disjoint_union(from_undirected(cycle_graph(4)),
                                     from_undirected(cycle_graph(4))));
  for (int i = 0; i < 5; ++i)
    instances.push_back(random_involution_graph(4 + rand_below(rng, 5),
                                                2 + rand_below(rng, 3), rng));
  for (const auto& g : instances) {
    ExpansionCertificate cert = edge_expansion_exact(g);
    if (cert.epsilon >= Rat(1, 2)) continue;  // no sparse cut to witness
    Rat alpha = (cert.epsilon + Rat(1, 2)) / 2;
    agg.add(cheeger_upper_witness(g, cert, alpha));
  }
  return agg.finish();
}

Report suite_loop_cheeger(std::uint64_t seed, double tol) {
  Agg agg("loop-cheeger", seed, tol);
  Prng rng(seed);
  for (int i = 0; i < 8; ++i) {
    std::uint32_t n = 2 * (2 + rand_below(rng, 5));
    std::uint32_t d = 4 + 2 * rand_below(rng, 2);
    UndirectedGraph y = random_regular_with_loops(n, d, d / 2, rng);
    agg.add(cheeger_mihail_check(from_undirected(y), tol));
  }
  return agg.finish();
}

Report suite_expander_implies_edges(std::uint64_t seed, double tol) {
  Agg agg("expander-implies-edges", seed, tol);
  for (std::uint32_t n = 2; n <= 6; ++n)
    agg.add(expander_edge_cover_check(complete_with_loops(n), tol));

  // desk pipeline on a single edge: the squared levels reach mixing < 1/N^2
  UndirectedGraph y;
  y.n = 2;
  y.edges.push_back({0, 1});
  PipelineParams pp;
  pp.variant = StageOneVariant::classic4;
  pp.seed = seed;
  StageOneResult so = stage_one(y, pp.variant);
  RotationGraph x = power(so.graph, 2);  // X1, degree 16
  RotationGraph aux = complete_with_loops(x.d);
  x = dsquare(x, aux);  // X2, degree 256, mixing 1/16 < 1/4
  agg.add(expander_edge_cover_check(x, tol));
  return agg.finish();
}

Report suite_pipeline_gap_recurrence(std::uint64_t seed, double tol) {
  Agg agg("pipeline-gap-recurrence", seed, tol);
  PipelineParams pp;
  pp.seed = seed;

  StageOneResult so = stage_one(path_graph(4), StageOneVariant::star16);
  agg.add(verify_level_recurrence(so.graph, pp, 3, tol));

  StageOneResult so2 = stage_one(cycle_graph(3), StageOneVariant::classic4);
  agg.add(verify_level_recurrence(power(so2.graph, 2), pp, 3, tol));

  // disconnected input: the ratio pins at 1 and the recurrence still holds
  RotationGraph two = disjoint_union(from_undirected(cycle_graph(3)),
                                     from_undirected(cycle_graph(3)));
  agg.add(verify_level_recurrence(add_self_loops(two, 2), pp, 3, tol));

  // searched auxiliary family: nonzero certified mu exercises the full bound
  PipelineParams sp = pp;
  sp.family = AuxFamily::searched;
  sp.search_attempts = 8;
  agg.add(verify_level_recurrence(so.graph, sp, 2, tol));
  return agg.finish();
}

Report suite_schedule_bounds(std::uint64_t seed, double tol) {
  Agg agg("schedule-bounds", seed, tol);
  PipelineParams fp;
  fp.mode = PipelineMode::faithful;

  PipelineSchedule s2 = compute_schedule(fp, 2);
  agg.add(s2.m0 == 100 && s2.ell == 10 && s2.degree_bound_ok && s2.tail_gap_ok, "N=2 constants");
  agg.add(faithful_row(s2, 1).x_degree_str() == "Q", "N=2 first row");
  agg.add(faithful_row(s2, 101).g_degree_str() == "Q^2" &&
              faithful_row(s2, 101).g_bound == "(1/100)^2",
          "N=2 first powered row");

  PipelineSchedule s6 = compute_schedule(fp, 6);
  agg.add(s6.m0 == 300 && s6.ell == 12 && s6.degree_bound_ok && s6.tail_gap_ok, "N=6 constants");
  agg.add(faithful_row(s6, 303).x_degree_str() == "Q^307", "N=6 row m0+3");

  PipelineSchedule sk = compute_schedule(fp, 1000);
  agg.add(sk.m0 == 1000 && sk.ell == 14 && sk.degree_bound_ok && sk.tail_gap_ok, "N=1000 constants");

  // desk table: degrees concrete and multiplicative across levels
  PipelineParams dp;
  dp.seed = seed;
  PipelineSchedule sd = compute_schedule(dp, 6);
  bool mult = true;
  for (std::size_t i = 0; i + 1 < sd.rows.size(); ++i)
    if (sd.rows[i + 1].x_degree != sd.rows[i].x_degree * sd.rows[i].g_degree) mult = false;
  agg.add(mult && !sd.rows.empty() && sd.rows[0].x_degree == 16, "desk recurrence");
  return agg.finish();
}

Report suite_universal_traversal(std::uint64_t seed, double tol) {
  Agg agg("universal-traversal", seed, tol);
  Prng rng(seed);
  PipelineParams pp;
  pp.seed = seed;
  pp.tol = tol;
  for (int i = 0; i < 6; ++i) {
    std::uint32_t n = 4 + rand_below(rng, 7);
    std::uint32_t d = 2 + rand_below(rng, 3);
    RotationGraph x1 = random_involution_graph(n, d, rng);
    agg.add(universal_traversal_check(x1, pp, rand_below(rng, n)));
  }
  for (int i = 0; i < 2; ++i) {
    RotationGraph a = random_involution_graph(3 + rand_below(rng, 3), 3, rng);
    RotationGraph b = random_involution_graph(3 + rand_below(rng, 3), 3, rng);
    RotationGraph x1 = disjoint_union(a, b);
    agg.add(universal_traversal_check(x1, pp, rand_below(rng, x1.n)));
  }
  return agg.finish();
}

Report suite_ustcon_oracle(std::uint64_t seed, double tol) {
  Agg agg("ustcon-oracle", seed, tol);
  Prng rng(seed);
  for (int i = 0; i < 25; ++i) {
    std::uint32_t n = 4 + rand_below(rng, 9);
    std::uint32_t percent = 10 + rand_below(rng, 50);
    UndirectedGraph y = random_simple_graph(n, percent, rng);
    Dsu dsu(n);
    for (const auto& [u, v] : y.edges) dsu.unite(u, v);
    PipelineParams pp;
    pp.seed = seed;
    pp.variant = i % 2 ? StageOneVariant::star16 : StageOneVariant::classic4;
    for (int pair = 0; pair < 4; ++pair) {
      std::uint32_t s = rand_below(rng, n);
      std::uint32_t t = rand_below(rng, n);
      UstconVerdict v = ustcon(y, s, t, pp);
      bool expect = dsu.find(s) == dsu.find(t);
      agg.add(v.connected == expect,
              "instance " + std::to_string(i) + " pair " + std::to_string(pair));
    }
  }
  return agg.finish();
}

using SuiteFn = std::function<Report(std::uint64_t, double)>;

const std::vector<std::pair<SuiteSpec, SuiteFn>>& table() {
  static const std::vector<std::pair<SuiteSpec, SuiteFn>> t = {
      {{"connected-expansion", "connectivity <-> expansion, eps >= 2/(dn)"},
       suite_connected_expansion},
      {{"directed-connectivity-mixing", "connected + loops => mixing <= 1 - 1/(d^4 n^2)"},
       suite_directed_connectivity_mixing},
      {{"norm-contraction", "stochastic matrices contract mean-free vectors"},
       suite_norm_contraction},
      {{"sedrakyan", "sum u^2/v >= (sum u)^2/sum v with exact certificate"},
       suite_sedrakyan},
      {{"averaging-decomposition", "M = (1-eta)J + eta C and M = J + eta D splits"},
       suite_averaging_decomposition},
      {{"mixing-bound-function", "f(lambda,mu) range, monotonicity, gap growth"},
       suite_mixing_bound_function},
      {{"dsquare-mixing-sweep", "measured product mixing within f(lambda,mu)"},
       suite_dsquare_mixing_sweep},
      {{"five-step-identity", "walk-matrix factorization of the product, exact"},
       suite_five_step_identity},
      {{"sparse-cut-witness", "sparse cut => witness vector with large image norm"},
       suite_sparse_cut_witness},
      {{"loop-cheeger", "lazy walks: gap >= eps^2/2"}, suite_loop_cheeger},
      {{"expander-implies-edges", "mixing < 1/n^2 => every pair adjacent"},
       suite_expander_implies_edges},
      {{"pipeline-gap-recurrence", "per-level mixing follows the f recurrence"},
       suite_pipeline_gap_recurrence},
      {{"schedule-bounds", "symbolic schedule rows + exact integer bounds"},
       suite_schedule_bounds},
      {{"universal-traversal", "touched set equals the BFS component"},
       suite_universal_traversal},
      {{"ustcon-oracle", "ustcon agrees with union-find on seeded instances"},
       suite_ustcon_oracle},
  };
  return t;
}

}  // namespace

const std::vector<SuiteSpec>& suite_registry() {
  static const std::vector<SuiteSpec> specs = [] {
    std::vector<SuiteSpec> v;
    for (const auto& [spec, fn] : table()) v.push_back(spec);
    return v;
  }();
  return specs;
}

Report run_suite(const std::string& name, std::uint64_t seed, double tol) {
  for (const auto& [spec, fn] : table())
    if (spec.name == name) return fn(seed, tol);
  throw Error("UnknownSuite", name);
}

std::vector<Report> run_suites(const std::vector<std::string>& selector,
                               std::uint64_t seed, double tol) {
  std::vector<Report> out;
  if (selector.empty()) {
    for (const auto& [spec, fn] : table()) out.push_back(fn(seed, tol));
    return out;
  }
  for (const auto& name : selector) out.push_back(run_suite(name, seed, tol));
  return out;
}

}  // namespace dsq
