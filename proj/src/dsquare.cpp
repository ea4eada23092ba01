#include "dsq/dsquare.hpp"

#include <cstddef>
#include <string>

#include "dsq/error.hpp"
#include "dsq/graph_io.hpp"

namespace dsq {

namespace {

void require_proper(const RotationGraph& g, const char* who) {
  auto vr = validate(g);
  if (!vr.ok)
    throw Error("ImproperLabeling",
                std::string(who) + ": " + (vr.issues.empty() ? "invalid" : vr.issues[0].code));
}

bool is_involution(const RotationGraph& g) {
  for (std::uint32_t v = 0; v < g.n; ++v)
    for (std::uint32_t i = 0; i < g.d; ++i) {
      RotStep s = g.rot(v, i);
      if (g.rot(s.vertex, s.label) != RotStep{v, i}) return false;
    }
  return true;
}

}  // namespace

RotationGraph dsquare(const RotationGraph& x, const RotationGraph& g,
                      std::uint64_t max_slots) {
  require_proper(x, "dsquare base");
  require_proper(g, "dsquare aux");
  if (g.n != x.d)
    throw Error("DimensionMismatch", "aux graph must have one vertex per base label (" +
                                         std::to_string(x.d) + " != " + std::to_string(g.n) + ")");
  std::uint64_t slots = std::uint64_t(x.n) * x.d * g.d;
  if (slots > max_slots)
    throw Error("DegreeOverflow", "product would need " + std::to_string(slots) + " slots");

  RotationGraph out;
  out.n = x.n;
  out.d = x.d * g.d;
  out.to.resize(slots);
  out.in_label.resize(slots);
  const std::uint32_t k = x.d;

  for (std::uint32_t v = 0; v < x.n; ++v)
    for (std::uint32_t j = 0; j < g.d; ++j)
      for (std::uint32_t i = 0; i < k; ++i) {
        RotStep first = x.rot(v, i);                      // (w, i1)
        RotStep mid = g.rot(first.label, j);              // (k1, j1)
        RotStep second = x.rot(first.vertex, mid.vertex); // (u, k2)
        std::size_t s = out.slot(v, static_cast<std::uint32_t>(pack_ds_label(i, j, k)));
        out.to[s] = second.vertex;
        out.in_label[s] =
            static_cast<std::uint32_t>(pack_ds_label(second.label, mid.label, k));
      }

  out.undirected = is_involution(out);
  return out;
}

Rat f_bound(const Rat& lambda, const Rat& mu) { return mu + (1 - mu) * lambda * lambda; }

Report f_props_check(std::uint32_t grid) {
  if (grid == 0) throw Error("BadShape", "grid must be positive");
  Report r;
  r.check = "mixing-bound-function";
  r.ok = true;
  auto fail = [&](const char* what, const Rat& lam, const Rat& mu) {
    r.ok = false;
    if (!r.details.contains("counterexample")) {
      r.details["counterexample"] = {{"property", what},
                                     {"lambda", format_rat(lam)},
                                     {"mu", format_rat(mu)}};
    }
  };

  auto frac = [](unsigned long num, unsigned long den) {
    Rat x(num, den);
    x.canonicalize();
    return x;
  };
  for (std::uint32_t p = 0; p <= grid; ++p)
    for (std::uint32_t q = 0; q <= grid; ++q) {
      Rat lam = frac(p, grid), mu = frac(q, grid);
      Rat f = f_bound(lam, mu);
      if (f < 0 || f > 1) fail("range", lam, mu);
      if (q == 0 && f != lam * lam) fail("zero-mu-squares", lam, mu);
      if (p == grid && f != 1) fail("fixed-at-one", lam, mu);
      if (p == 0 && f != mu) fail("zero-lambda-gives-mu", lam, mu);
      if (p > 0 && f < f_bound(frac(p - 1, grid), mu)) fail("monotone-lambda", lam, mu);
      if (q > 0 && f < f_bound(lam, frac(q - 1, grid))) fail("monotone-mu", lam, mu);
    }

  // Gap growth: for gap = 1 - lambda <= 1/4 and mu <= 1/100,
  // 1 - f = (1 - mu)(1 + lambda) * gap >= (99/100)(7/4) * gap >= (3/2) * gap.
  std::uint32_t gap_points = 0;
  for (std::uint32_t p = 0; p <= grid; ++p)
    for (const Rat& mu : {Rat(0), Rat(1, 200), Rat(1, 100)}) {
      Rat gap = frac(p, 4 * grid);  // sweeps [0, 1/4]
      Rat lam = 1 - gap;
      if (1 - f_bound(lam, mu) < Rat(3, 2) * gap) fail("gap-growth", lam, mu);
      ++gap_points;
    }

  r.details["grid"] = grid;
  r.details["gap_points"] = gap_points;
  r.details["properties"] = {"range",          "zero-mu-squares", "fixed-at-one",
                             "zero-lambda-gives-mu", "monotone-lambda", "monotone-mu",
                             "gap-growth"};
  return r;
}

DsquareMixingReport verify_dsquare_mixing(const RotationGraph& x, const RotationGraph& g,
                                          double tol) {
  if (tol <= 0) throw Error("BadTolerance", "tol must be positive");
  DsquareMixingReport out;
  RotationGraph prod = dsquare(x, g);
  out.x = mixing_ratio(to_adjacency(x), tol);
  out.g = mixing_ratio(to_adjacency(g), tol);
  out.product = mixing_ratio(to_adjacency(prod), tol);

  Rat bound = f_bound(Rat(out.x.upper), Rat(out.g.upper));
  out.bound = upper_double(bound);
  bool ok = Rat(out.product.lower) <= bound + Rat(tol);

  Report& r = out.report;
  r.check = "dsquare-mixing";
  r.ok = ok;
  r.tol = tol;
  r.details["x_upper"] = out.x.upper;
  r.details["g_upper"] = out.g.upper;
  r.details["product_lower"] = out.product.lower;
  r.details["product_upper"] = out.product.upper;
  r.details["bound"] = out.bound;
  r.details["product_degree"] = prod.d;
  return out;
}

BackpropResult witness_backprop(const RotationGraph& x, const RotationGraph& g,
                                const RatVec& v, const Rat& lambda, const Rat& mu) {
  require_proper(x, "backprop base");
  require_proper(g, "backprop aux");
  if (v.size() != x.n) throw Error("DimensionMismatch", "witness length must match vertex count");
  if (lambda < 0 || lambda > 1 || mu < 0 || mu > 1)
    throw Error("BadBound", "lambda and mu must lie in [0,1]");

  // The split M = (1-mu) A^2 + mu * (norm <= 1) needs mu at least the
  // averaging threshold of the aux walk matrix.
  RatMat b = to_adjacency(g);
  Rat min_b = b.a[0];
  for (const auto& e : b.a) min_b = std::min(min_b, e);
  Rat mu_min = Rat(1) - Rat(g.n) * min_b;
  if (mu_min < 0) mu_min = 0;
  if (mu < mu_min)
    throw Error("BadBound", "mu below the feasible averaging threshold " + format_rat(mu_min));

  RatMat a = to_adjacency(x);
  RatMat m = to_adjacency(dsquare(x, g));
  Rat vsq = norm_sq(v);
  if (vsq == 0 || inner(v, RatVec(v.size(), Rat(1))) != 0)
    throw Error("NotAWitness", "need a nonzero mean-free vector");

  Rat f = f_bound(lambda, mu);
  RatVec mv = matvec(m, v);
  if (norm_sq(mv) <= f * f * vsq)
    throw Error("NotAWitness", "vector does not beat the product bound");

  // norm(Mv) <= (1-mu) norm(A^2 v) + mu norm(v), so the hypothesis forces
  // norm_sq(A^2 v) > lambda^4 norm_sq(v); split that over the two hops.
  RatVec av = matvec(a, v);
  RatVec aav = matvec(a, av);
  Rat lam_sq = lambda * lambda;
  if (norm_sq(aav) <= lam_sq * lam_sq * vsq)
    throw Error("NotAWitness", "two-step norm does not certify; bounds are inconsistent");

  BackpropResult res;
  if (norm_sq(av) > lam_sq * vsq) {
    res.u = v;
    res.branch = 0;
    res.ratio_sq = norm_sq(av) / vsq;
  } else {
    res.u = av;
    res.branch = 1;
    res.ratio_sq = norm_sq(aav) / norm_sq(av);
  }
  if (res.ratio_sq <= lam_sq)
    throw Error("NotAWitness", "no hop beats lambda; bounds are inconsistent");
  return res;
}

Report five_step_identity_check(const RotationGraph& x, const RotationGraph& g) {
  require_proper(x, "identity base");
  require_proper(g, "identity aux");
  if (g.n != x.d) throw Error("DimensionMismatch", "aux graph must match base degree");

  const std::size_t n = x.n, k = x.d, nk = n * k;
  RotationGraph prod = dsquare(x, g);
  RatMat m = to_adjacency(prod);
  RatMat a = to_adjacency(x);
  RatMat b = to_adjacency(g);

  // Rotation permutation on vertex/label pairs, column (v,i) -> row rot(v,i).
  RatMat rotp(nk, nk);
  for (std::uint32_t v = 0; v < x.n; ++v)
    for (std::uint32_t i = 0; i < x.d; ++i) {
      RotStep s = x.rot(v, i);
      rotp.at(std::size_t(s.vertex) * k + s.label, std::size_t(v) * k + i) = 1;
    }

  RatMat lift_m(nk, n);
  RatMat proj_m(n, nk);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t i = 0; i < k; ++i) {
      lift_m.at(v * k + i, v) = Rat(1, static_cast<unsigned long>(k));
      proj_m.at(v, v * k + i) = 1;
    }

  auto block_diag = [&](const RatMat& c) {
    RatMat out(nk, nk);
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) out.at(v * k + i, v * k + j) = c.at(i, j);
    return out;
  };

  RatMat five = matmul(proj_m, matmul(rotp, matmul(block_diag(b), matmul(rotp, lift_m))));

  Report r;
  r.check = "five-step-identity";
  bool factor_ok = (five == m);

  Rat min_b = b.a[0];
  for (const auto& e : b.a) min_b = std::min(min_b, e);
  Rat mu = Rat(1) - Rat(g.n) * min_b;
  if (mu < 0) mu = 0;

  RatMat a2 = matmul(a, a);
  bool split_ok;
  if (mu == 0) {
    // min entry 1/K with unit column sums forces B uniform: plain squaring.
    split_ok = (m == a2);
  } else {
    RatMat c(k, k);
    Rat base = (1 - mu) / Rat(static_cast<unsigned long>(k));
    for (std::size_t i = 0; i < k * k; ++i) c.a[i] = (b.a[i] - base) / mu;
    bool c_ok = is_stochastic(c);
    RatMat rest = matmul(proj_m, matmul(rotp, matmul(block_diag(c), matmul(rotp, lift_m))));
    RatMat recon = mat_add(mat_scale(Rat(1 - mu), a2), mat_scale(mu, rest));
    split_ok = c_ok && (recon == m);
    r.details["aux_split_stochastic"] = c_ok;
  }

  r.ok = factor_ok && split_ok;
  r.details["five_factor"] = factor_ok;
  r.details["averaging_split"] = split_ok;
  r.details["mu"] = format_rat(mu);
  r.details["n"] = x.n;
  r.details["base_degree"] = x.d;
  r.details["aux_degree"] = g.d;
  return r;
}

}  // namespace dsq
