#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dsq/rational.hpp"
#include "dsq/report.hpp"
#include "dsq/rotation_graph.hpp"
#include "dsq/spectral.hpp"

namespace dsq {

// ---------------------------------------------------------------- stage one

enum class StageOneVariant { classic4, star16 };

// Each input vertex becomes a cycle ("fiber") with one vertex per incident
// edge slot, slots ordered ascending by neighbor. Labels: 0 cycle-prev,
// 1 cycle-next, 2 the crossing edge to the partner slot, 3 a self-loop;
// star16 adds loops 4..15. Consistently labeled (arrival label == label), so
// every label class is a permutation of the vertices. Vertices of degree one
// get a 1-cycle (labels 0 and 1 are loops there).
struct StageOneResult {
  RotationGraph graph;
  std::vector<std::uint32_t> origin;       // fiber vertex -> input vertex
  std::vector<std::uint32_t> fiber_start;  // input vertex -> first fiber vertex; size n+1
};

// Input must be simple (no loops, no multiedges) with minimum degree 1;
// throws HasSelfLoop / HasMultiedge / IsolatedVertex.
StageOneResult stage_one(const UndirectedGraph& y, StageOneVariant variant);

// ------------------------------------------------------------------ params

enum class PipelineMode { desk, faithful };
enum class AuxFamily { complete, searched };

struct PipelineParams {
  StageOneVariant variant = StageOneVariant::star16;
  PipelineMode mode = PipelineMode::desk;
  AuxFamily family = AuxFamily::complete;
  std::uint32_t q = 0;  // base power, X1 = X^q; 0 picks the variant default
                        // (classic4 -> 2, star16 -> 1, both give deg(X1)=16)
  std::uint32_t m0 = 4;
  std::uint32_t ell = 2;
  bool auto_levels = true;  // grow m1 until one traversal covers any path
  Rat mu_target = Rat(1, 4);
  std::uint32_t search_attempts = 48;
  std::uint32_t search_bound = 64;  // largest aux size searched + certified
  std::uint64_t max_slots = kMaxEdgeSlots;
  std::uint64_t seed = kDefaultSeed;
  double tol = 1e-9;

  std::uint32_t base_power(std::uint32_t base_degree) const;
};

// ---------------------------------------------------------------- schedule

struct ScheduleRow {
  Int level;
  bool symbolic = false;  // degree fields hold exponents of Q
  Int x_vertices;
  Int x_degree;
  Int g_vertices;
  Int g_degree;
  std::string g_bound;

  std::string x_degree_str() const;  // "Q^k" when symbolic, digits otherwise
  std::string g_degree_str() const;
  std::string g_vertices_str() const;
};

struct PipelineSchedule {
  PipelineMode mode = PipelineMode::desk;
  Int n = 0;  // vertex count of every X_i
  std::uint64_t m0 = 0, ell = 0, m1 = 0;
  std::uint32_t q = 1;          // desk only; faithful keeps Q symbolic
  bool degree_bound_ok = false;      // 16^4 N^2 < (3/2)^m0, exact integers
  bool tail_gap_ok = false;      // N^2 < (8/7)^(2^ell), exact integers
  std::vector<ScheduleRow> rows;  // desk: all levels; faithful: head + tail sample

  Json to_json() const;
};

// Any faithful row on demand (levels 1..m1); rows above m0 follow the
// powered-aux recurrence. Throws RangeError outside 1..m1.
ScheduleRow faithful_row(const PipelineSchedule& s, const Int& level);

// Faithful: m0 = 100*ceil(log2 N), ell = 10 + ceil(log2 ceil(log2 N)),
// symbolic rows, both integer inequalities decided exactly. Desk: concrete
// integer table driven by the auxiliary family recurrence.
PipelineSchedule compute_schedule(const PipelineParams& params, const Int& n_vertices);

// ------------------------------------------------------------------ family

struct WorkspaceLedger {
  std::uint64_t peak_bits = 0;
  std::uint64_t steps = 0;           // base-graph edge steps
  std::uint64_t live_base_bits = 0;  // register footprint of the running traversal

  void note(std::uint64_t bits) { peak_bits = std::max(peak_bits, bits); }
  void merge(const WorkspaceLedger& o) {
    peak_bits = std::max(peak_bits, o.peak_bits);
    steps += o.steps;
  }
  Json to_json() const {
    return Json{{"peak_bits", peak_bits}, {"steps", steps}};
  }
};

struct FamilyLevel {
  enum class Kind { complete, searched, powered };
  Kind kind = Kind::complete;
  Int vertices;  // = deg(X_level)
  Int degree;
  Rat mu_upper;             // certified mixing bound
  int base_index = -1;      // searched/powered: index into bases
  std::uint32_t power_k = 1;
  std::string note;

  const char* kind_name() const;
};

// Aux graphs G_1..G_(m1-1); level i acts on deg(X_i) vertices. The complete
// kind is implicit at any size: rot(v,a) = (a,v). Searched kinds are
// materialized small graphs certified by the mixing oracle; powered kinds
// walk power_k steps in a certified base (bound mu_base^power_k).
struct ExpanderFamily {
  Int x1_degree;  // deg(X1); levels[i-1].vertices = deg(X_i)
  std::vector<FamilyLevel> levels;
  std::vector<RotationGraph> bases;

  // One aux step at 1-based level: vertex in [deg(X_level)], label in
  // [degree]; returns (vertex, arrival label). Ledger (optional) charges the
  // scratch registers of powered walks on top of live_base_bits.
  std::pair<Int, Int> step(std::uint32_t level, const Int& vertex, const Int& label,
                           WorkspaceLedger* ledger = nullptr) const;

  Int x_degree(std::uint32_t level) const;  // deg(X_level), level >= 1
};

ExpanderFamily build_expander_family(const PipelineParams& params, const Int& x1_degree,
                                     std::uint32_t aux_levels);

// Materializes G_level as a rotation graph (small sizes only; throws
// MaterializationBound past max_slots).
RotationGraph materialize_aux(const ExpanderFamily& fam, std::uint32_t level,
                              std::uint64_t max_slots = kMaxEdgeSlots);

// -------------------------------------------------------------- edge index

// Address of one outgoing edge of X_m: z indexes the X1 edge (q base labels,
// little-endian), a[i-1] the aux label consumed at level i. Packed value is
// little-endian mixed radix with z fastest.
struct EdgeIndex {
  Int z;
  std::vector<Int> a;

  std::uint32_t level() const { return static_cast<std::uint32_t>(a.size()) + 1; }
};

// --------------------------------------------------------------- traversal

// The full pipeline context: base graph X (stage-one output or any proper
// rotation graph), X1 = X^q implicitly, family + schedule for the levels.
struct Pipeline {
  RotationGraph base;
  std::uint32_t q = 1;
  Int x1_degree;  // base.d^q
  ExpanderFamily family;
  PipelineSchedule schedule;
  PipelineParams params;

  std::uint32_t m1() const { return static_cast<std::uint32_t>(schedule.m1); }
  Int deg_x(std::uint32_t level) const;
};

Int pack_edge_index(const Pipeline& p, const EdgeIndex& w);
EdgeIndex unpack_edge_index(const Pipeline& p, Int packed, std::uint32_t level);

// Builds the desk pipeline for a prepared base graph. aux levels = m1-1 where
// m1 = max(m0+ell, smallest m with q*2^(m-1) >= base.n) under auto_levels.
Pipeline build_pipeline(const RotationGraph& base, const PipelineParams& params);

// Walks edge w of X_m from x by the iterative register machine: registers
// (z, a_1..a_(m-1)) are consumed/overwritten in place; leg c of 2^(m-1) base
// legs runs q base steps, then one aux step at level trailing_ones(c)+1 whose
// vertex is the packed arrival label accumulated in the lower registers.
// Optionally records every intermediate vertex and the final register state
// (the arrival label of the traversed edge).
std::uint32_t traverse_edge(const Pipeline& p, std::uint32_t x, const EdgeIndex& w,
                            std::uint32_t level, WorkspaceLedger& ledger,
                            std::vector<std::uint32_t>* touched = nullptr,
                            EdgeIndex* arrival = nullptr);

// ------------------------------------------------------------------ ustcon

struct UstconVerdict {
  bool connected = false;
  std::uint32_t level = 0;  // m1
  WorkspaceLedger ledger;
  std::uint64_t seed = 0;
  Json details = Json::object();

  Json to_json(const PipelineParams& params) const;
};

// st-connectivity: true iff some level-m1 edge index leads from a fiber
// vertex of s to the fiber of t. Isolated endpoints and s == t are answered
// before the reduction; other isolated vertices are dropped (they carry no
// paths). Positive answers carry a witness edge index that was re-walked by
// traverse_edge; the verdict ledger comes from real traversals.
UstconVerdict ustcon(const UndirectedGraph& y, std::uint32_t s, std::uint32_t t,
                     const PipelineParams& params);

// ------------------------------------------------------------ suite checks

// U = all vertices touched by any level-m1 traversal from x (every
// intermediate base step included) must equal x's BFS component. U is
// computed by the neighborhood closure matching the index set exactly (all
// walks of length <= q*2^(m1-1) from x); low levels are cross-checked by
// enumerating every index and collecting touched vertices from traverse_edge.
Report universal_traversal_check(const RotationGraph& x1, const PipelineParams& params,
                                 std::uint32_t x);

// Materializes X_1..X_top (as slots allow), brackets each mixing ratio, and
// checks the product recurrence bracket(X_{i+1}).lower <= f(bracket(X_i).upper,
// mu_i) + tol per level, plus the gated gap growth: whenever
// bracket(X_i).upper >= 3/4 and mu_i <= 1/100, the next gap certifiably grows
// by 3/2 (exact on the f side, tol-slack on the measured side).
Report verify_level_recurrence(const RotationGraph& x1, const PipelineParams& params,
                               std::uint32_t top_level, double tol);

// Graphs certified to mix below 1/n^2 have every ordered vertex pair (u,v),
// diagonal included, joined by at least one edge; checked exactly on counts.
Report expander_edge_cover_check(const RotationGraph& g, double tol);

}  // namespace dsq
