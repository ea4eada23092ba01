#include "dsq/expansion.hpp"

#include <bit>
#include <queue>

#include "dsq/error.hpp"
#include "dsq/spectral.hpp"

namespace dsq {

namespace {

void require_enumerable(const RotationGraph& g, std::uint32_t enum_bound) {
  if (g.n > enum_bound || g.n >= 64)
    throw Error("EnumerationBound",
                "subset enumeration capped at " + std::to_string(enum_bound) + " vertices");
}

std::uint64_t cut_size(const RotationGraph& g, std::uint64_t mask) {
  std::uint64_t cut = 0;
  for (std::uint32_t v = 0; v < g.n; ++v) {
    if (!((mask >> v) & 1)) continue;
    for (std::uint32_t i = 0; i < g.d; ++i)
      if (!((mask >> g.out(v, i)) & 1)) ++cut;
  }
  return cut;
}

}  // namespace

ExpansionCertificate edge_expansion_exact(const RotationGraph& g, std::uint32_t enum_bound) {
  require_enumerable(g, enum_bound);
  if (g.n < 2) throw Error("BadShape", "expansion needs at least two vertices");
  ExpansionCertificate best;
  bool have = false;
  std::uint64_t best_cut = 0, best_size = 1;
  for (std::uint64_t mask = 1; mask + 1 < (1ull << g.n); ++mask) {
    std::uint32_t size = std::popcount(mask);
    if (2ull * size > g.n) continue;
    std::uint64_t cut = cut_size(g, mask);
    // compare cut/size < best_cut/best_size by cross-multiplication
    if (!have || cut * best_size < best_cut * size) {
      have = true;
      best_cut = cut;
      best_size = size;
      best.witness_mask = mask;
    }
  }
  best.cut = best_cut;
  best.epsilon = Rat(best_cut, std::uint64_t(g.d) * best_size);
  best.epsilon.canonicalize();
  for (std::uint32_t v = 0; v < g.n; ++v)
    if ((best.witness_mask >> v) & 1) best.witness_set.push_back(v);
  return best;
}

Rat edge_expansion_alt(const RotationGraph& g, std::uint32_t enum_bound) {
  require_enumerable(g, enum_bound);
  if (g.n < 2) throw Error("BadShape", "expansion needs at least two vertices");
  bool have = false;
  std::uint64_t bc = 0, bs = 1;
  for (std::uint64_t mask = 1; mask + 1 < (1ull << g.n); ++mask) {
    std::uint32_t size = std::popcount(mask);
    std::uint32_t small = std::min(size, g.n - size);
    std::uint64_t cut = cut_size(g, mask);
    if (!have || cut * bs < bc * small) {
      have = true;
      bc = cut;
      bs = small;
    }
  }
  Rat eps(bc, std::uint64_t(g.d) * bs);
  eps.canonicalize();
  return eps;
}

bool subset_connected(const RotationGraph& g, std::uint32_t enum_bound) {
  require_enumerable(g, enum_bound);
  if (g.n == 1) return true;
  for (std::uint64_t mask = 1; mask + 1 < (1ull << g.n); ++mask)
    if (cut_size(g, mask) == 0) return false;
  return true;
}

std::vector<std::uint32_t> reachable_from(const RotationGraph& g, std::uint32_t start) {
  std::vector<char> seen(g.n, 0);
  std::queue<std::uint32_t> q;
  q.push(start);
  seen[start] = 1;
  while (!q.empty()) {
    std::uint32_t v = q.front();
    q.pop();
    for (std::uint32_t i = 0; i < g.d; ++i) {
      std::uint32_t w = g.out(v, i);
      if (!seen[w]) {
        seen[w] = 1;
        q.push(w);
      }
    }
  }
  std::vector<std::uint32_t> out;
  for (std::uint32_t v = 0; v < g.n; ++v)
    if (seen[v]) out.push_back(v);
  return out;
}

bool path_connected(const RotationGraph& g) {
  for (std::uint32_t s = 0; s < g.n; ++s)
    if (reachable_from(g, s).size() != g.n) return false;
  return true;
}

Report check_connected_expansion_bound(const RotationGraph& g, std::uint32_t enum_bound) {
  Report r;
  r.check = "connected-expansion";
  bool conn_path = path_connected(g);
  bool conn_subset = subset_connected(g, enum_bound);
  ExpansionCertificate cert = edge_expansion_exact(g, enum_bound);
  Rat alt = edge_expansion_alt(g, enum_bound);

  bool dual_agree = cert.epsilon == alt;
  bool equiv = conn_path == conn_subset;
  bool positivity = (cert.epsilon > 0) == conn_subset;
  bool quantitative = true;
  if (conn_subset) {
    Rat bound(2, std::uint64_t(g.d) * g.n);
    bound.canonicalize();
    quantitative = cert.epsilon >= bound;
    r.details["bound"] = format_rat(bound);
  }
  r.ok = dual_agree && equiv && positivity && quantitative;
  r.details["connected"] = conn_path;
  r.details["epsilon"] = format_rat(cert.epsilon);
  r.details["cut"] = cert.cut;
  r.details["witness"] = cert.witness_set;
  r.details["enumerators_agree"] = dual_agree;
  return r;
}

Report cheeger_witness_for_set(const RotationGraph& g, std::uint64_t subset_mask,
                               const Rat& alpha) {
  Report r;
  r.check = "sparse-cut-witness";
  auto vr = validate(g);
  if (!vr.ok || !g.undirected)
    throw Error("NotUndirected", "witness construction needs a proper undirected graph");
  std::uint32_t size = std::popcount(subset_mask);
  if (size == 0 || 2ull * size > g.n)
    throw Error("BadSubset", "need 0 < |U| <= n/2");
  if (alpha <= 0 || alpha > Rat(1, 2)) throw Error("BadBound", "alpha must lie in (0, 1/2]");

  std::uint64_t cut = cut_size(g, subset_mask);
  Rat expansion(cut, std::uint64_t(g.d) * size);
  expansion.canonicalize();
  if (expansion >= alpha)
    throw Error("BadSubset", "subset does not witness expansion below alpha");

  std::uint32_t n = g.n;
  RatVec v(n);
  Rat shift(size, n);
  shift.canonicalize();
  for (std::uint32_t x = 0; x < n; ++x)
    v[x] = (((subset_mask >> x) & 1) ? Rat(1) : Rat(0)) - shift;

  Rat sum(0);
  for (const Rat& x : v) sum += x;
  bool mean_free = sum == 0;

  Rat nsq = norm_sq(v);
  bool norm_identity = nsq == Rat(size) * (Rat(n - size)) / n;

  RatMat m = to_adjacency(g);
  RatVec mv = matvec(m, v);
  Rat vmv = inner(v, mv);

  // sum over directed slots of (v_tail - v_head)^2 equals 2d(||v||^2 - <v,Mv>),
  // and under the shifted indicator it also equals 2*cut.
  Rat edge_diff(0);
  for (std::uint32_t x = 0; x < n; ++x)
    for (std::uint32_t i = 0; i < g.d; ++i) {
      Rat dfr = v[x] - v[g.out(x, i)];
      edge_diff += dfr * dfr;
    }
  bool diff_identity = edge_diff == 2 * Rat(g.d) * (nsq - vmv);
  bool diff_counts_cut = edge_diff == Rat(2) * Rat(cut);

  bool inner_bound = vmv > (1 - 2 * alpha) * nsq;
  bool cs = inner(mv, v) * inner(mv, v) <= norm_sq(mv) * nsq;
  Rat target = (1 - 2 * alpha) * (1 - 2 * alpha) * nsq;
  bool final_bound = norm_sq(mv) >= target;

  r.ok = mean_free && norm_identity && diff_identity && diff_counts_cut && inner_bound &&
         cs && final_bound;
  r.details["subset_size"] = size;
  r.details["cut"] = cut;
  r.details["expansion"] = format_rat(expansion);
  r.details["alpha"] = format_rat(alpha);
  r.details["norm_sq"] = format_rat(nsq);
  r.details["steps"] = {
      {"mean_free", mean_free},
      {"norm_identity", norm_identity},
      {"edge_difference_identity", diff_identity},
      {"edge_difference_counts_cut", diff_counts_cut},
      {"inner_product_bound", inner_bound},
      {"cauchy_schwarz", cs},
      {"norm_lower_bound", final_bound},
  };
  return r;
}

Report cheeger_upper_witness(const RotationGraph& g, const ExpansionCertificate& cert,
                             const Rat& alpha) {
  if (cert.epsilon >= alpha)
    throw Error("BadBound", "certificate does not place expansion below alpha");
  return cheeger_witness_for_set(g, cert.witness_mask, alpha);
}

Report cheeger_mihail_check(const RotationGraph& g, double tol, std::uint32_t enum_bound) {
  Report r;
  r.check = "loop-cheeger";
  r.tol = tol;
  if (!g.undirected) throw Error("NotUndirected", "needs an undirected graph");
  if (g.d % 2 != 0) throw Error("OddDegree", "needs even degree");
  for (std::uint32_t v = 0; v < g.n; ++v)
    if (g.self_loops(v) < g.d / 2)
      throw Error("SelfLoopDeficit", "vertex " + std::to_string(v) + " has fewer than d/2 loops");

  ExpansionCertificate cert = edge_expansion_exact(g, enum_bound);
  MixingEstimate est = mixing_ratio(to_adjacency(g), tol);
  Rat gap = 1 - Rat(est.upper);
  Rat rhs = cert.epsilon * cert.epsilon / 2 - Rat(tol);
  r.ok = gap >= rhs;
  r.details["epsilon"] = format_rat(cert.epsilon);
  r.details["lambda_upper"] = est.upper;
  r.details["gap"] = format_rat(gap);
  r.details["required"] = format_rat(rhs);
  return r;
}

Report check_directed_mixing_bound(const RotationGraph& g, double tol,
                                   std::uint32_t enum_bound) {
  Report r;
  r.check = "directed-connectivity-mixing";
  r.tol = tol;
  auto vr = validate(g);
  if (!vr.ok) throw Error("BadShape", "graph fails validation");
  auto counts = adjacency_counts(g);
  for (std::uint32_t v = 0; v < g.n; ++v)
    if (counts[v][v] == 0)
      throw Error("NoSelfLoop", "vertex " + std::to_string(v) + " lacks a self-loop");
  if (!path_connected(g)) throw Error("NotConnected", "graph must be connected");
  (void)enum_bound;

  MixingEstimate est = mixing_ratio(to_adjacency(g), tol);
  Int d4(g.d);
  d4 = d4 * d4 * d4 * d4;
  Rat bound = 1 - Rat(Int(1), d4 * g.n * g.n);
  r.ok = Rat(est.upper) <= bound + Rat(tol);

  // product graph with edge counts (C^T C): d^2-regular, loop count at v is
  // sum_u c(v->u)^2.
  Json loops = Json::array();
  std::uint64_t min_loops = ~0ull;
  for (std::uint32_t v = 0; v < g.n; ++v) {
    std::uint64_t l = 0;
    for (std::uint32_t u = 0; u < g.n; ++u)
      l += std::uint64_t(counts[u][v]) * counts[u][v];
    loops.push_back(l);
    min_loops = std::min(min_loops, l);
  }
  r.details["lambda_upper"] = est.upper;
  r.details["bound"] = format_rat(bound);
  r.details["product_loops"] = loops;
  r.details["product_degree"] = std::uint64_t(g.d) * g.d;
  r.details["product_min_loops"] = min_loops;
  return r;
}

}  // namespace dsq
