#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dsq/prng.hpp"
#include "dsq/rational.hpp"

namespace dsq {

// Cap on materialized rotation tables (n*d slots).
inline constexpr std::uint64_t kMaxEdgeSlots = 1ull << 22;

struct RotStep {
  std::uint32_t vertex = 0;
  std::uint32_t label = 0;  // arrival (in-) label at `vertex`
  bool operator==(const RotStep&) const = default;
};

// d-regular labeled digraph given by its rotation map: following the out-edge
// of v labeled i lands at rot(v,i).vertex carrying arrival label
// rot(v,i).label. The labeling is proper iff (v,i) -> rot(v,i) is a bijection
// on vertex/label pairs; `undirected` additionally means the map is an
// involution (each edge is paired with its reverse, loops are fixed points).
struct RotationGraph {
  std::uint32_t n = 0;
  std::uint32_t d = 0;
  std::vector<std::uint32_t> to;        // n*d head vertices
  std::vector<std::uint32_t> in_label;  // n*d arrival labels
  bool undirected = false;

  std::size_t slot(std::uint32_t v, std::uint32_t i) const {
    return std::size_t(v) * d + i;
  }
  RotStep rot(std::uint32_t v, std::uint32_t i) const {
    std::size_t s = slot(v, i);
    return {to[s], in_label[s]};
  }
  std::uint32_t out(std::uint32_t v, std::uint32_t i) const { return to[slot(v, i)]; }

  // Distinct (v,i) with rot(v,i) == (v,i) are counted once each; with the
  // involution convention every such fixed point is one self-loop.
  std::uint32_t self_loops(std::uint32_t v) const;
};

// Edge list with multiplicity; {v,v} entries are self-loops (degree 1 each).
struct UndirectedGraph {
  std::uint32_t n = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  std::vector<std::uint32_t> degrees() const;
};

struct ValidationIssue {
  std::string code;    // "BadShape", "DuplicateInLabel", "MissingInLabel", "NotInvolution", "SlotBound"
  std::string detail;
};

struct ValidationReport {
  bool ok = true;
  std::vector<ValidationIssue> issues;
};

ValidationReport validate(const RotationGraph& g,
                          std::uint64_t max_slots = kMaxEdgeSlots);

// Proper labeling from an undirected edge list: each vertex orders its
// incident edge slots ascending by (neighbor, rank among parallel copies in
// input order); the two endpoints of an edge point at each other's slots.
// Requires a regular input (throws Error("NotRegular") otherwise).
RotationGraph from_undirected(const UndirectedGraph& g);

// Appends k self-loops per vertex with fresh labels d..d+k-1.
RotationGraph add_self_loops(const RotationGraph& g, std::uint32_t k);

// k-step walk graph. Out-labels are little-endian base-d tuples
// (first step = fastest digit); the arrival label is the reversed tuple of
// per-step arrival labels, so undirected inputs stay involutive.
RotationGraph power(const RotationGraph& g, std::uint32_t k,
                    std::uint64_t max_slots = kMaxEdgeSlots);

// Column-stochastic walk matrix: at(u,v) = (#edges v->u)/d. Symmetric for
// undirected graphs.
RatMat to_adjacency(const RotationGraph& g);

// Unnormalized edge counts: counts[u][v] = #edges v->u.
std::vector<std::vector<std::uint32_t>> adjacency_counts(const RotationGraph& g);

// rot(v,i) = (i,v): one edge to every vertex including a loop; mixing ratio 0.
RotationGraph complete_with_loops(std::uint32_t n);

UndirectedGraph cycle_graph(std::uint32_t n);
UndirectedGraph complete_graph(std::uint32_t n);
UndirectedGraph path_graph(std::uint32_t n);

// Uniformly random proper labeling (a random bijection on slots); directed.
RotationGraph random_rotation_graph(std::uint32_t n, std::uint32_t d, Prng& rng);

// Random involution on slots: a random undirected d-regular multigraph
// (loops allowed exactly when allow_loops).
RotationGraph random_involution_graph(std::uint32_t n, std::uint32_t d, Prng& rng,
                                      bool allow_loops = true);

// Random undirected d-regular simple-ish multigraph built from loop padding
// plus fixed-point-free permutation rounds (and one matching round when the
// non-loop degree is odd; n must be even in that case).
UndirectedGraph random_regular_with_loops(std::uint32_t n, std::uint32_t d,
                                          std::uint32_t loops_per_vertex, Prng& rng);

}  // namespace dsq
