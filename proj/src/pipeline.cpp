#include "dsq/pipeline.hpp"

#include <algorithm>
#include <cstddef>
#include <set>

#include "dsq/dsquare.hpp"
#include "dsq/error.hpp"
#include "dsq/expansion.hpp"

namespace dsq {

namespace {

Int ipow(unsigned long base, unsigned long exp) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
  return r;
}

Int ipow(const Int& base, unsigned long exp) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
  return r;
}

// ceil(log2(n)) for n >= 1.
std::uint64_t ceil_log2(const Int& n) {
  if (n <= 1) return 0;
  Int m = n - 1;
  return mpz_sizeinbase(m.get_mpz_t(), 2);
}

std::uint64_t trailing_ones(std::uint64_t c) {
  std::uint64_t k = 0;
  while (c & 1) {
    c >>= 1;
    ++k;
  }
  return k;
}

unsigned long to_ulong(const Int& v, const char* what) {
  if (v < 0 || !v.fits_ulong_p()) throw Error("RangeError", std::string(what) + " out of range");
  return v.get_ui();
}

void require_proper(const RotationGraph& g, const char* who) {
  auto vr = validate(g);
  if (!vr.ok)
    throw Error("ImproperLabeling",
                std::string(who) + ": " + (vr.issues.empty() ? "invalid" : vr.issues[0].code));
}

}  // namespace

// ---------------------------------------------------------------- stage one

StageOneResult stage_one(const UndirectedGraph& y, StageOneVariant variant) {
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  for (const auto& [u, v] : y.edges) {
    if (u >= y.n || v >= y.n) throw Error("BadShape", "edge endpoint out of range");
    if (u == v) throw Error("HasSelfLoop", "vertex " + std::to_string(u));
    std::uint32_t lo = std::min(u, v), hi = std::max(u, v);
    if (!seen.insert({lo, hi}).second)
      throw Error("HasMultiedge", "{" + std::to_string(lo) + "," + std::to_string(hi) + "}");
  }

  std::vector<std::vector<std::uint32_t>> adj(y.n);
  for (const auto& [u, v] : y.edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (std::uint32_t v = 0; v < y.n; ++v) {
    if (adj[v].empty()) throw Error("IsolatedVertex", "vertex " + std::to_string(v));
    std::sort(adj[v].begin(), adj[v].end());
  }

  StageOneResult res;
  res.fiber_start.assign(y.n + 1, 0);
  for (std::uint32_t v = 0; v < y.n; ++v)
    res.fiber_start[v + 1] = res.fiber_start[v] + static_cast<std::uint32_t>(adj[v].size());
  std::uint32_t nn = res.fiber_start[y.n];
  std::uint32_t d = variant == StageOneVariant::classic4 ? 4 : 16;
  if (std::uint64_t(nn) * d > kMaxEdgeSlots)
    throw Error("SlotBound", "expanded graph needs too many slots");

  RotationGraph& g = res.graph;
  g.n = nn;
  g.d = d;
  g.to.assign(std::size_t(nn) * d, 0);
  g.in_label.assign(std::size_t(nn) * d, 0);
  res.origin.resize(nn);

  auto slot_of = [&](std::uint32_t v, std::uint32_t w) {
    const auto& a = adj[v];
    return static_cast<std::uint32_t>(std::lower_bound(a.begin(), a.end(), w) - a.begin());
  };

  for (std::uint32_t v = 0; v < y.n; ++v) {
    std::uint32_t deg = static_cast<std::uint32_t>(adj[v].size());
    for (std::uint32_t i = 0; i < deg; ++i) {
      std::uint32_t z = res.fiber_start[v] + i;
      res.origin[z] = v;
      std::uint32_t prev = res.fiber_start[v] + (i + deg - 1) % deg;
      std::uint32_t next = res.fiber_start[v] + (i + 1) % deg;
      g.to[g.slot(z, 0)] = prev;
      g.in_label[g.slot(z, 0)] = 0;
      g.to[g.slot(z, 1)] = next;
      g.in_label[g.slot(z, 1)] = 1;
      std::uint32_t w = adj[v][i];
      std::uint32_t partner = res.fiber_start[w] + slot_of(w, v);
      g.to[g.slot(z, 2)] = partner;
      g.in_label[g.slot(z, 2)] = 2;
      for (std::uint32_t l = 3; l < d; ++l) {
        g.to[g.slot(z, l)] = z;
        g.in_label[g.slot(z, l)] = l;
      }
    }
  }

  bool invol = true;
  for (std::uint32_t v = 0; v < nn && invol; ++v)
    for (std::uint32_t i = 0; i < d; ++i) {
      RotStep s = g.rot(v, i);
      if (g.rot(s.vertex, s.label) != RotStep{v, i}) {
        invol = false;
        break;
      }
    }
  g.undirected = invol;
  return res;
}

// ------------------------------------------------------------------ params

std::uint32_t PipelineParams::base_power(std::uint32_t base_degree) const {
  if (q != 0) return q;
  return base_degree == 4 ? 2 : 1;
}

// ---------------------------------------------------------------- schedule

std::string ScheduleRow::x_degree_str() const {
  if (!symbolic) return x_degree.get_str();
  return x_degree == 1 ? "Q" : "Q^" + x_degree.get_str();
}
std::string ScheduleRow::g_degree_str() const {
  if (!symbolic) return g_degree.get_str();
  return g_degree == 1 ? "Q" : "Q^" + g_degree.get_str();
}
std::string ScheduleRow::g_vertices_str() const {
  if (!symbolic) return g_vertices.get_str();
  return g_vertices == 1 ? "Q" : "Q^" + g_vertices.get_str();
}

Json PipelineSchedule::to_json() const {
  Json j;
  j["mode"] = mode == PipelineMode::faithful ? "faithful" : "desk";
  j["n"] = n.get_str();
  j["m0"] = m0;
  j["ell"] = ell;
  j["m1"] = m1;
  if (mode == PipelineMode::desk) j["q"] = q;
  if (mode == PipelineMode::faithful) {
    j["degree_bound_holds"] = degree_bound_ok;    // 16^4 N^2 < (3/2)^m0
    j["tail_gap_bound_holds"] = tail_gap_ok;  // N^2 < (8/7)^(2^ell)
  }
  Json rws = Json::array();
  for (const auto& r : rows) {
    Json e;
    e["level"] = r.level.get_str();
    e["x_vertices"] = r.x_vertices.get_str();
    e["x_degree"] = r.x_degree_str();
    e["g_vertices"] = r.g_vertices_str();
    e["g_degree"] = r.g_degree_str();
    e["g_mixing_bound"] = r.g_bound;
    rws.push_back(e);
  }
  j["rows"] = rws;
  return j;
}

ScheduleRow faithful_row(const PipelineSchedule& s, const Int& level) {
  if (level < 1 || level > Int(s.m1)) throw Error("RangeError", "row level out of range");
  ScheduleRow r;
  r.level = level;
  r.symbolic = true;
  r.x_vertices = s.n;
  if (level <= Int(s.m0)) {
    r.x_degree = level;
    r.g_vertices = level;
    r.g_degree = 1;
    r.g_bound = "1/100";
  } else {
    unsigned long j = to_ulong(level - Int(s.m0), "row offset");
    Int pow2 = Int(1) << j;
    r.x_degree = Int(s.m0) + pow2 - 1;
    r.g_vertices = r.x_degree;
    r.g_degree = pow2;
    r.g_bound = "(1/100)^" + pow2.get_str();
  }
  return r;
}

PipelineSchedule compute_schedule(const PipelineParams& params, const Int& n_vertices) {
  if (n_vertices < 2) throw Error("BadShape", "need at least two vertices");
  PipelineSchedule s;
  s.mode = params.mode;
  s.n = n_vertices;

  if (params.mode == PipelineMode::faithful) {
    std::uint64_t lg = ceil_log2(n_vertices);
    s.m0 = 100 * lg;
    s.ell = 10 + ceil_log2(Int(lg));
    s.m1 = s.m0 + s.ell;
    // 16^4 N^2 < (3/2)^m0  as  2^m0 * 16^4 * N^2 < 3^m0
    Int n_sq = n_vertices * n_vertices;
    s.degree_bound_ok = (Int(1) << s.m0) * 65536 * n_sq < ipow(3ul, s.m0);
    // N^2 < (8/7)^(2^ell)  as  7^(2^ell) * N^2 < 8^(2^ell)
    if (s.ell > 26) throw Error("BadBound", "tail exponent too large to decide");
    unsigned long e = 1ul << s.ell;
    s.tail_gap_ok = ipow(7ul, e) * n_sq < ipow(8ul, e);

    for (std::uint64_t i = 1; i <= std::min<std::uint64_t>(s.m0, 5); ++i)
      s.rows.push_back(faithful_row(s, Int(i)));
    for (std::uint64_t i = s.m0; i <= s.m0 + std::min<std::uint64_t>(s.ell, 4); ++i)
      s.rows.push_back(faithful_row(s, Int(i)));
    return s;
  }

  std::uint32_t base_degree = params.variant == StageOneVariant::classic4 ? 4 : 16;
  std::uint32_t qq = params.base_power(base_degree);
  s.q = qq;
  s.m0 = params.m0;
  s.ell = params.ell;
  s.m1 = params.m0 + params.ell;
  Int x1_deg = ipow(static_cast<unsigned long>(base_degree), qq);
  ExpanderFamily fam = build_expander_family(params, x1_deg,
                                             static_cast<std::uint32_t>(s.m1) - 1);
  for (std::uint64_t i = 1; i <= s.m1; ++i) {
    ScheduleRow r;
    r.level = Int(i);
    r.x_vertices = n_vertices;
    r.x_degree = fam.x_degree(static_cast<std::uint32_t>(i));
    if (i < s.m1) {
      const FamilyLevel& L = fam.levels[i - 1];
      r.g_vertices = L.vertices;
      r.g_degree = L.degree;
      r.g_bound = format_rat(L.mu_upper);
    } else {
      r.g_vertices = 0;
      r.g_degree = 0;
      r.g_bound = "";
    }
    s.rows.push_back(r);
  }
  return s;
}

// ------------------------------------------------------------------ family

const char* FamilyLevel::kind_name() const {
  switch (kind) {
    case Kind::complete: return "complete";
    case Kind::searched: return "searched";
    case Kind::powered: return "powered";
  }
  return "?";
}

Int ExpanderFamily::x_degree(std::uint32_t level) const {
  if (level == 0 || level > levels.size() + 1)
    throw Error("RangeError", "no such pipeline level");
  Int d = x1_degree;
  for (std::uint32_t i = 1; i < level; ++i) d *= levels[i - 1].degree;
  return d;
}

std::pair<Int, Int> ExpanderFamily::step(std::uint32_t level, const Int& vertex,
                                         const Int& label, WorkspaceLedger* ledger) const {
  if (level == 0 || level > levels.size()) throw Error("RangeError", "no such aux level");
  const FamilyLevel& L = levels[level - 1];
  if (vertex < 0 || vertex >= L.vertices) throw Error("RangeError", "aux vertex out of range");
  if (label < 0 || label >= L.degree) throw Error("RangeError", "aux label out of range");

  switch (L.kind) {
    case FamilyLevel::Kind::complete:
      return {label, vertex};
    case FamilyLevel::Kind::searched: {
      const RotationGraph& b = bases[L.base_index];
      RotStep st = b.rot(static_cast<std::uint32_t>(to_ulong(vertex, "aux vertex")),
                         static_cast<std::uint32_t>(to_ulong(label, "aux label")));
      return {Int(st.vertex), Int(st.label)};
    }
    case FamilyLevel::Kind::powered: {
      const RotationGraph& b = bases[L.base_index];
      std::uint32_t v = static_cast<std::uint32_t>(to_ulong(vertex, "aux vertex"));
      Int rest = label;
      Int back = 0;
      if (ledger)
        ledger->note(ledger->live_base_bits + ceil_log2(Int(L.power_k) + 1) +
                     ceil_log2(Int(b.d)));
      for (std::uint32_t s = 0; s < L.power_k; ++s) {
        unsigned long digit = mpz_fdiv_ui(rest.get_mpz_t(), b.d);
        rest /= b.d;
        RotStep st = b.rot(v, static_cast<std::uint32_t>(digit));
        v = st.vertex;
        back = back * b.d + st.label;
      }
      return {Int(v), back};
    }
  }
  throw Error("RangeError", "bad family level");
}

ExpanderFamily build_expander_family(const PipelineParams& params, const Int& x1_degree,
                                     std::uint32_t aux_levels) {
  if (params.mode == PipelineMode::faithful)
    throw Error("MaterializationBound", "faithful mode is symbolic only");
  if (params.mu_target <= 0 || params.mu_target >= 1)
    throw Error("BadBound", "mu_target must lie in (0,1)");
  ExpanderFamily fam;
  fam.x1_degree = x1_degree;
  Prng rng(params.seed);
  Int n_i = x1_degree;

  for (std::uint32_t level = 1; level <= aux_levels; ++level) {
    FamilyLevel L;
    L.vertices = n_i;
    bool done = false;

    if (params.family == AuxFamily::searched && n_i <= params.search_bound &&
        x1_degree <= params.search_bound) {
      std::uint32_t n = static_cast<std::uint32_t>(to_ulong(n_i, "aux size"));
      std::uint32_t dg = static_cast<std::uint32_t>(to_ulong(x1_degree, "aux degree"));
      RotationGraph best;
      Rat best_mu(2);
      for (std::uint32_t attempt = 0; attempt < params.search_attempts; ++attempt) {
        RotationGraph cand = random_involution_graph(n, dg, rng);
        MixingEstimate est = mixing_ratio(to_adjacency(cand), params.tol);
        Rat mu(est.upper);
        if (mu < best_mu) {
          best_mu = mu;
          best = cand;
        }
        if (best_mu <= params.mu_target) break;
      }
      if (best_mu <= params.mu_target) {
        L.kind = FamilyLevel::Kind::searched;
        L.degree = Int(dg);
        L.mu_upper = best_mu;
        L.base_index = static_cast<int>(fam.bases.size());
        L.note = "searched";
        fam.bases.push_back(std::move(best));
        done = true;
      } else if (best_mu <= Rat(9, 10)) {
        // power the best candidate down to the target
        std::uint32_t k = 1;
        Rat mu = best_mu;
        while (mu > params.mu_target && k < 64) {
          mu *= best_mu;
          ++k;
        }
        if (mu <= params.mu_target) {
          L.kind = FamilyLevel::Kind::powered;
          L.degree = ipow(Int(dg), k);
          L.mu_upper = mu;
          L.power_k = k;
          L.base_index = static_cast<int>(fam.bases.size());
          L.note = "powered base mixing " + format_rat(best_mu);
          fam.bases.push_back(std::move(best));
          done = true;
        }
      }
      if (!done) L.note = "fallback: search missed target";
    } else if (params.family == AuxFamily::searched) {
      L.note = "fallback: size above search bound";
    }

    if (!done) {
      L.kind = FamilyLevel::Kind::complete;
      L.degree = n_i;
      L.mu_upper = Rat(0);
      if (L.note.empty()) L.note = "complete";
    }
    n_i *= L.degree;
    fam.levels.push_back(std::move(L));
  }
  return fam;
}

RotationGraph materialize_aux(const ExpanderFamily& fam, std::uint32_t level,
                              std::uint64_t max_slots) {
  if (level == 0 || level > fam.levels.size())
    throw Error("RangeError", "no such aux level");
  const FamilyLevel& L = fam.levels[level - 1];
  Int slots = L.vertices * L.degree;
  if (slots > Int(max_slots))
    throw Error("MaterializationBound",
                "aux level " + std::to_string(level) + " needs " + slots.get_str() + " slots");
  switch (L.kind) {
    case FamilyLevel::Kind::complete:
      return complete_with_loops(static_cast<std::uint32_t>(to_ulong(L.vertices, "aux size")));
    case FamilyLevel::Kind::searched:
      return fam.bases[L.base_index];
    case FamilyLevel::Kind::powered:
      return power(fam.bases[L.base_index], L.power_k, max_slots);
  }
  throw Error("RangeError", "bad family level");
}

// --------------------------------------------------------------- traversal

Int Pipeline::deg_x(std::uint32_t level) const { return family.x_degree(level); }

Int pack_edge_index(const Pipeline& p, const EdgeIndex& w) {
  Int acc = 0;
  for (std::size_t i = w.a.size(); i > 0; --i) {
    const FamilyLevel& L = p.family.levels[i - 1];
    if (w.a[i - 1] < 0 || w.a[i - 1] >= L.degree)
      throw Error("RangeError", "edge index component out of range");
    acc = acc * L.degree + w.a[i - 1];
  }
  if (w.z < 0 || w.z >= p.x1_degree) throw Error("RangeError", "edge index z out of range");
  return acc * p.x1_degree + w.z;
}

EdgeIndex unpack_edge_index(const Pipeline& p, Int packed, std::uint32_t level) {
  if (level == 0 || level > p.family.levels.size() + 1)
    throw Error("RangeError", "no such pipeline level");
  if (packed < 0 || packed >= p.deg_x(level))
    throw Error("RangeError", "packed edge index out of range");
  EdgeIndex w;
  w.z = packed % p.x1_degree;
  packed /= p.x1_degree;
  w.a.resize(level - 1);
  for (std::uint32_t i = 0; i + 1 < level; ++i) {
    const Int& radix = p.family.levels[i].degree;
    w.a[i] = packed % radix;
    packed /= radix;
  }
  return w;
}

Pipeline build_pipeline(const RotationGraph& base, const PipelineParams& params) {
  if (params.mode == PipelineMode::faithful)
    throw Error("MaterializationBound", "faithful mode is symbolic only");
  require_proper(base, "pipeline base");
  Pipeline p;
  p.base = base;
  p.params = params;
  p.q = params.base_power(base.d);
  p.x1_degree = ipow(static_cast<unsigned long>(base.d), p.q);

  std::uint64_t m1 = params.m0 + params.ell;
  if (params.auto_levels) {
    std::uint64_t need = 1;
    std::uint64_t walk = p.q;
    while (walk < base.n && need < 48) {
      walk *= 2;
      ++need;
    }
    m1 = std::max(m1, need);
  }
  if (m1 < 1 || m1 > 48) throw Error("RangeError", "level count out of range");

  p.family = build_expander_family(params, p.x1_degree, static_cast<std::uint32_t>(m1) - 1);

  PipelineSchedule s;
  s.mode = PipelineMode::desk;
  s.n = Int(base.n);
  s.q = p.q;
  s.m0 = params.m0;
  s.ell = params.ell;
  s.m1 = m1;
  for (std::uint64_t i = 1; i <= m1; ++i) {
    ScheduleRow r;
    r.level = Int(i);
    r.x_vertices = Int(base.n);
    r.x_degree = p.family.x_degree(static_cast<std::uint32_t>(i));
    if (i < m1) {
      const FamilyLevel& L = p.family.levels[i - 1];
      r.g_vertices = L.vertices;
      r.g_degree = L.degree;
      r.g_bound = format_rat(L.mu_upper);
    }
    s.rows.push_back(r);
  }
  p.schedule = s;
  return p;
}

namespace {

// Fixed register widths for the ledger: vertex + every index register at its
// radix width + the ruler counter (m-1 bits) + leg-local scratch (one base
// digit, the arrival accumulator, the in-leg step counter).
std::uint64_t traversal_base_bits(const Pipeline& p, std::uint32_t level) {
  std::uint64_t bits = ceil_log2(Int(p.base.n));
  bits += ceil_log2(p.x1_degree);
  for (std::uint32_t i = 0; i + 1 < level; ++i) bits += ceil_log2(p.family.levels[i].degree);
  bits += level - 1;
  bits += ceil_log2(Int(p.base.d)) + ceil_log2(p.x1_degree) + ceil_log2(Int(p.q) + 1);
  return bits;
}

}  // namespace

std::uint32_t traverse_edge(const Pipeline& p, std::uint32_t x, const EdgeIndex& w,
                            std::uint32_t level, WorkspaceLedger& ledger,
                            std::vector<std::uint32_t>* touched, EdgeIndex* arrival) {
  if (x >= p.base.n) throw Error("RangeError", "start vertex out of range");
  if (level == 0 || level > p.m1()) throw Error("RangeError", "level out of range");
  if (w.level() != level) throw Error("RangeError", "edge index level mismatch");
  if (level > 40) throw Error("RangeError", "level too deep to walk");
  if (w.z < 0 || w.z >= p.x1_degree) throw Error("RangeError", "edge index z out of range");
  for (std::uint32_t i = 0; i + 1 < level; ++i)
    if (w.a[i] < 0 || w.a[i] >= p.family.levels[i].degree)
      throw Error("RangeError", "edge index component out of range");

  std::vector<Int> reg(level);
  reg[0] = w.z;
  for (std::uint32_t i = 1; i < level; ++i) reg[i] = w.a[i - 1];

  ledger.live_base_bits = traversal_base_bits(p, level);
  ledger.note(ledger.live_base_bits);

  const std::uint32_t d = p.base.d;
  std::uint64_t legs = 1ull << (level - 1);
  for (std::uint64_t c = 0; c < legs; ++c) {
    Int zz = reg[0];
    Int acc = 0;
    for (std::uint32_t stepi = 0; stepi < p.q; ++stepi) {
      unsigned long digit = mpz_fdiv_ui(zz.get_mpz_t(), d);
      zz /= d;
      RotStep s = p.base.rot(x, static_cast<std::uint32_t>(digit));
      x = s.vertex;
      acc = acc * d + s.label;
      ++ledger.steps;
      if (touched) touched->push_back(x);
    }
    reg[0] = acc;

    if (c + 1 < legs) {
      std::uint32_t lvl = static_cast<std::uint32_t>(trailing_ones(c)) + 1;
      Int v = 0;
      for (std::uint32_t i = lvl; i > 0; --i) {
        const Int& radix = i == 1 ? p.x1_degree : p.family.levels[i - 2].degree;
        v = v * radix + reg[i - 1];
      }
      auto [nv, nl] = p.family.step(lvl, v, reg[lvl], &ledger);
      for (std::uint32_t i = 0; i < lvl; ++i) {
        const Int& radix = i == 0 ? p.x1_degree : p.family.levels[i - 1].degree;
        reg[i] = nv % radix;
        nv /= radix;
      }
      reg[lvl] = nl;
    }
  }

  if (arrival) {
    arrival->z = reg[0];
    arrival->a.assign(reg.begin() + 1, reg.end());
  }
  return x;
}

// ------------------------------------------------------------------ ustcon

Json UstconVerdict::to_json(const PipelineParams& params) const {
  Json j;
  j["connected"] = connected;
  j["level"] = level;
  j["ledger"] = ledger.to_json();
  Json pj;
  pj["variant"] = params.variant == StageOneVariant::classic4 ? "classic4" : "star16";
  pj["mode"] = params.mode == PipelineMode::faithful ? "faithful" : "desk";
  pj["family"] = params.family == AuxFamily::complete ? "complete" : "searched";
  pj["q"] = params.q;
  pj["m0"] = params.m0;
  pj["ell"] = params.ell;
  pj["auto_levels"] = params.auto_levels;
  pj["mu_target"] = format_rat(params.mu_target);
  pj["tol"] = params.tol;
  j["params"] = pj;
  j["seed"] = seed;
  if (!details.empty()) j["details"] = details;
  return j;
}

UstconVerdict ustcon(const UndirectedGraph& y, std::uint32_t s, std::uint32_t t,
                     const PipelineParams& params) {
  if (params.mode == PipelineMode::faithful)
    throw Error("MaterializationBound", "faithful mode is symbolic only");
  if (s >= y.n || t >= y.n) throw Error("RangeError", "query vertex out of range");

  UstconVerdict v;
  v.seed = params.seed;
  if (s == t) {
    v.connected = true;
    v.details["answered"] = "trivially: s == t";
    return v;
  }

  std::vector<std::uint32_t> deg = y.degrees();
  if (deg[s] == 0 || deg[t] == 0) {
    v.connected = false;
    v.details["answered"] = "trivially: isolated endpoint";
    return v;
  }

  // isolated vertices carry no s-t paths; drop them so fibers are well formed
  std::vector<std::uint32_t> remap(y.n, UINT32_MAX);
  std::uint32_t kept = 0;
  for (std::uint32_t u = 0; u < y.n; ++u)
    if (deg[u] > 0) remap[u] = kept++;
  UndirectedGraph yy;
  yy.n = kept;
  yy.edges.reserve(y.edges.size());
  for (const auto& [a, b] : y.edges) yy.edges.push_back({remap[a], remap[b]});

  StageOneResult so = stage_one(yy, params.variant);
  PipelineParams pp = params;
  pp.family = AuxFamily::complete;  // edge-index coverage argument needs it
  Pipeline p = build_pipeline(so.graph, pp);
  std::uint32_t m1 = p.m1();
  std::uint64_t walk_len = std::uint64_t(p.q) << (m1 - 1);

  std::uint32_t s2 = remap[s], t2 = remap[t];
  std::uint32_t x0 = so.fiber_start[s2];

  // breadth-first over the fiber graph, remembering edge labels
  const RotationGraph& base = so.graph;
  std::vector<std::int64_t> parent(base.n, -1);
  std::vector<std::uint32_t> plabel(base.n, 0);
  std::vector<char> seen(base.n, 0);
  std::vector<std::uint32_t> order;
  seen[x0] = 1;
  order.push_back(x0);
  std::int64_t hit = -1;
  for (std::size_t head = 0; head < order.size() && hit < 0; ++head) {
    std::uint32_t u = order[head];
    if (so.origin[u] == t2) {
      hit = u;
      break;
    }
    for (std::uint32_t i = 0; i < base.d; ++i) {
      std::uint32_t w = base.out(u, i);
      if (!seen[w]) {
        seen[w] = 1;
        parent[w] = u;
        plabel[w] = i;
        order.push_back(w);
      }
    }
  }

  v.level = m1;
  v.details["expanded_vertices"] = base.n;
  v.details["q"] = p.q;
  v.details["walk_length"] = walk_len;
  v.details["family"] = "complete";

  // one canonical traversal so the ledger reflects real register usage
  EdgeIndex probe;
  probe.z = 0;
  probe.a.assign(m1 - 1, Int(0));
  traverse_edge(p, x0, probe, m1, v.ledger);

  if (hit < 0) {
    v.connected = false;
    return v;
  }

  // witness: shortest label path, padded with self-loop steps to full length
  std::vector<std::uint32_t> labels;
  for (std::uint32_t u = static_cast<std::uint32_t>(hit); u != x0;
       u = static_cast<std::uint32_t>(parent[u]))
    labels.push_back(plabel[u]);
  std::reverse(labels.begin(), labels.end());
  std::uint32_t y0 = static_cast<std::uint32_t>(hit);
  if (base.rot(y0, 3) != RotStep{y0, 3})
    throw Error("NoSelfLoop", "expanded vertex lacks its loop");
  std::size_t dist = labels.size();
  labels.resize(walk_len, 3);

  EdgeIndex w;
  auto leg_block = [&](std::uint64_t leg) {
    Int b = 0;
    for (std::uint32_t stepi = p.q; stepi > 0; --stepi)
      b = b * base.d + labels[leg * p.q + stepi - 1];
    return b;
  };
  w.z = leg_block(0);
  w.a.resize(m1 - 1);
  for (std::uint32_t i = 1; i < m1; ++i) {
    std::uint64_t lo = 1ull << (i - 1);
    Int a = 0;
    for (std::uint64_t r = lo; r > 0; --r) {
      // blocks lo .. 2*lo-1, little-endian in radix deg(X1)
      a = a * p.x1_degree + leg_block(lo + r - 1);
    }
    w.a[i - 1] = a;
  }

  WorkspaceLedger wl;
  std::uint32_t end = traverse_edge(p, x0, w, m1, wl);
  v.ledger.merge(wl);
  if (end != y0 || so.origin[end] != t2)
    throw Error("WitnessMismatch", "witness traversal missed the target fiber");

  v.connected = true;
  v.details["distance"] = dist;
  Int packed = pack_edge_index(p, w);
  v.details["witness_bits"] = mpz_sizeinbase(packed.get_mpz_t(), 2);
  if (mpz_sizeinbase(packed.get_mpz_t(), 2) <= 256)
    v.details["witness_index"] = packed.get_str();
  v.details["target_fiber_vertex"] = y0;
  return v;
}

// ------------------------------------------------------------ suite checks

Report universal_traversal_check(const RotationGraph& x1, const PipelineParams& params,
                                 std::uint32_t x) {
  require_proper(x1, "universal traversal");
  if (x >= x1.n) throw Error("RangeError", "start vertex out of range");

  PipelineParams pp = params;
  pp.family = AuxFamily::complete;
  pp.q = 1;  // X1 is taken as given
  Pipeline p = build_pipeline(x1, pp);
  std::uint32_t m1 = p.m1();

  Report r;
  r.check = "universal-traversal";
  r.seed = params.seed;

  // All walks of every length 1..2^(m1-1) start here, so the touched set is
  // the neighborhood closure of {x}; it stabilizes within n rounds and the
  // walk budget covers that.
  std::vector<char> in_set(x1.n, 0);
  in_set[x] = 1;
  bool changed = true;
  std::uint64_t rounds = 0;
  std::uint64_t budget = 1ull << (m1 - 1);
  while (changed && rounds < budget) {
    changed = false;
    for (std::uint32_t u = 0; u < x1.n; ++u)
      if (in_set[u])
        for (std::uint32_t i = 0; i < x1.d; ++i)
          if (!in_set[x1.out(u, i)]) {
            in_set[x1.out(u, i)] = 1;
            changed = true;
          }
    ++rounds;
  }

  std::vector<std::uint32_t> comp = reachable_from(x1, x);
  std::vector<char> in_comp(x1.n, 0);
  for (std::uint32_t u : comp) in_comp[u] = 1;
  bool equal = true;
  for (std::uint32_t u = 0; u < x1.n; ++u)
    if (in_set[u] != in_comp[u]) equal = false;

  // honest cross-check at low levels: enumerate every index, walk it, and
  // collect touched vertices; must equal the closure capped at that depth
  bool enumerated_ok = true;
  std::uint32_t enum_top = 0;
  for (std::uint32_t lvl = 2; lvl <= 3 && lvl <= m1; ++lvl) {
    Int deg = p.deg_x(lvl);
    if (deg > 4096) break;
    std::vector<char> touched_enum(x1.n, 0);
    touched_enum[x] = 1;
    unsigned long total = to_ulong(deg, "enumeration degree");
    for (unsigned long pk = 0; pk < total; ++pk) {
      EdgeIndex w = unpack_edge_index(p, Int(pk), lvl);
      WorkspaceLedger led;
      std::vector<std::uint32_t> touched;
      traverse_edge(p, x, w, lvl, led, &touched);
      for (std::uint32_t u : touched) touched_enum[u] = 1;
    }
    std::vector<char> ball(x1.n, 0);
    ball[x] = 1;
    for (std::uint32_t round = 0; round < (1u << (lvl - 1)); ++round) {
      std::vector<char> nxt = ball;
      for (std::uint32_t u = 0; u < x1.n; ++u)
        if (ball[u])
          for (std::uint32_t i = 0; i < x1.d; ++i) nxt[x1.out(u, i)] = 1;
      ball = std::move(nxt);
    }
    if (touched_enum != ball) enumerated_ok = false;
    enum_top = lvl;
  }

  r.ok = equal && enumerated_ok;
  r.details["n"] = x1.n;
  r.details["m1"] = m1;
  r.details["touched"] = static_cast<std::uint64_t>(
      std::count(in_set.begin(), in_set.end(), char(1)));
  r.details["component"] = comp.size();
  r.details["closure_matches_component"] = equal;
  if (enum_top) {
    r.details["enumerated_through_level"] = enum_top;
    r.details["enumeration_matches"] = enumerated_ok;
  }
  return r;
}

Report verify_level_recurrence(const RotationGraph& x1, const PipelineParams& params,
                               std::uint32_t top_level, double tol) {
  require_proper(x1, "level recurrence");
  if (top_level < 2) throw Error("RangeError", "need at least two levels");
  if (tol <= 0) throw Error("BadTolerance", "tol must be positive");

  ExpanderFamily fam = build_expander_family(params, Int(x1.d), top_level - 1);

  Report r;
  r.check = "pipeline-gap-recurrence";
  r.seed = params.seed;
  r.tol = tol;
  r.ok = true;
  Json rows = Json::array();

  Rat tol_rat(tol);
  RotationGraph cur = x1;
  MixingEstimate est = mixing_ratio(to_adjacency(cur), tol);
  std::uint32_t done = 1;

  for (std::uint32_t i = 1; i < top_level; ++i) {
    RotationGraph aux;
    RotationGraph next;
    try {
      aux = materialize_aux(fam, i, params.max_slots);
      next = dsquare(cur, aux, params.max_slots);
    } catch (const Error& e) {
      if (std::string(e.code()) == "MaterializationBound" ||
          std::string(e.code()) == "DegreeOverflow")
        break;
      throw;
    }
    MixingEstimate nest = mixing_ratio(to_adjacency(next), tol);
    const Rat& mu = fam.levels[i - 1].mu_upper;
    Rat cur_up(est.upper);
    Rat bound = f_bound(cur_up, mu);
    bool rec_ok = Rat(nest.lower) <= bound + tol_rat;

    Json row;
    row["level"] = i + 1;
    row["degree"] = fam.x_degree(i + 1).get_str();
    row["lambda_lower"] = nest.lower;
    row["lambda_upper"] = nest.upper;
    row["mu"] = format_rat(mu);
    row["f_bound"] = upper_double(bound);
    row["recurrence_ok"] = rec_ok;
    if (!rec_ok) r.ok = false;

    if (cur_up >= Rat(3, 4) && mu <= Rat(1, 100)) {
      Rat gap = 1 - cur_up;
      bool exact_ok = (1 - bound) >= Rat(3, 2) * gap;
      bool measured_ok = (1 - Rat(nest.upper)) >= Rat(3, 2) * gap - 2 * tol_rat;
      row["gap_growth_exact"] = exact_ok;
      row["gap_growth_measured"] = measured_ok;
      if (!exact_ok || !measured_ok) r.ok = false;
    }

    rows.push_back(row);
    cur = std::move(next);
    est = nest;
    ++done;
  }

  if (done < 2) throw Error("MaterializationBound", "no level was materializable");
  r.details["levels"] = rows;
  r.details["levels_done"] = done;
  return r;
}

Report expander_edge_cover_check(const RotationGraph& g, double tol) {
  require_proper(g, "edge cover");
  Report r;
  r.check = "expander-implies-edges";
  r.tol = tol;
  MixingEstimate est = mixing_ratio(to_adjacency(g), tol);
  Rat threshold(1, Int(g.n) * Int(g.n));
  bool hyp = Rat(est.upper) < threshold;

  auto counts = adjacency_counts(g);
  std::uint32_t min_count = UINT32_MAX;
  for (std::uint32_t u = 0; u < g.n; ++u)
    for (std::uint32_t w = 0; w < g.n; ++w) min_count = std::min(min_count, counts[u][w]);

  r.ok = hyp && min_count >= 1;
  r.details["n"] = g.n;
  r.details["degree"] = g.d;
  r.details["lambda_upper"] = est.upper;
  r.details["threshold"] = format_rat(threshold);
  r.details["mixing_below_threshold"] = hyp;
  r.details["min_pair_edges"] = min_count;
  return r;
}

}  // namespace dsq
