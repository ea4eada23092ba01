#pragma once

#include <cstdint>
#include <vector>

#include "dsq/rational.hpp"
#include "dsq/report.hpp"
#include "dsq/rotation_graph.hpp"

namespace dsq {

// Default cap for subset enumeration (2^n masks).
inline constexpr std::uint32_t kEnumBound = 24;

struct ExpansionCertificate {
  Rat epsilon;                             // min over 0<|U|<=n/2 of cut(U)/(d|U|)
  std::uint64_t witness_mask = 0;          // smallest mask attaining the min
  std::vector<std::uint32_t> witness_set;  // same subset, listed
  std::uint64_t cut = 0;                   // directed edges leaving the witness
};

// Exhaustive enumeration over subsets with 2|U| <= n; ties broken by the
// numerically smallest bitmask. Throws Error("EnumerationBound") past the cap.
ExpansionCertificate edge_expansion_exact(const RotationGraph& g,
                                          std::uint32_t enum_bound = kEnumBound);

// Second, independent enumerator: scans every proper nonempty subset and
// normalizes by min(|U|, n-|U|). Agrees with the primary one on regular
// graphs; kept separate so the two can cross-check each other.
Rat edge_expansion_alt(const RotationGraph& g, std::uint32_t enum_bound = kEnumBound);

// Definitional check: every proper nonempty subset has an outgoing edge.
bool subset_connected(const RotationGraph& g, std::uint32_t enum_bound = kEnumBound);

// Search oracle: every ordered pair joined by a directed path (BFS from
// every vertex). Independent of the subset enumeration.
bool path_connected(const RotationGraph& g);

std::vector<std::uint32_t> reachable_from(const RotationGraph& g, std::uint32_t start);

// Connectivity <-> expansion, both directions, plus the quantitative bound
// epsilon >= 2/(d n) exactly when connected.
Report check_connected_expansion_bound(const RotationGraph& g,
                                       std::uint32_t enum_bound = kEnumBound);

// The sparse-cut side: for undirected g and a subset with expansion(U) <
// alpha <= 1/2, the shifted indicator v = chi_U - (|U|/n) 1 satisfies
// norm_sq(M v) >= (1-2 alpha)^2 norm_sq(v); every link of the chain is
// asserted in exact arithmetic (mean-freeness, norm identity, the
// edge-difference identity, the inner-product bound, Cauchy-Schwarz).
Report cheeger_witness_for_set(const RotationGraph& g, std::uint64_t subset_mask,
                               const Rat& alpha);
Report cheeger_upper_witness(const RotationGraph& g, const ExpansionCertificate& cert,
                             const Rat& alpha);

// The spectral-gap side for lazy-enough walks: undirected, even degree,
// at least d/2 self-loops per vertex; asserts 1 - lambda_upper >= eps^2/2 - tol.
Report cheeger_mihail_check(const RotationGraph& g, double tol = 1e-9,
                            std::uint32_t enum_bound = kEnumBound);

// Directed connectivity bound: d-regular, a self-loop at every vertex,
// connected implies mixing_ratio <= 1 - 1/(d^4 n^2) (+tol). Reports the
// self-loop counts of the product graph with edge counts C^T C.
Report check_directed_mixing_bound(const RotationGraph& g, double tol = 1e-9,
                                   std::uint32_t enum_bound = kEnumBound);

}  // namespace dsq
