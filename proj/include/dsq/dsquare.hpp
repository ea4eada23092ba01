#pragma once

#include <cstdint>

#include "dsq/rational.hpp"
#include "dsq/report.hpp"
#include "dsq/rotation_graph.hpp"
#include "dsq/spectral.hpp"

namespace dsq {

// Labels of a product edge are pairs (i,j), i in [K] (first-step label),
// j in [D] (auxiliary label), packed little-endian as i + K*j.
struct DSLabel {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
};

inline std::uint64_t pack_ds_label(std::uint32_t i, std::uint32_t j, std::uint32_t k) {
  return std::uint64_t(i) + std::uint64_t(k) * j;
}
inline DSLabel unpack_ds_label(std::uint64_t packed, std::uint32_t k) {
  return {static_cast<std::uint32_t>(packed % k), static_cast<std::uint32_t>(packed / k)};
}

// Derandomized product of X (n vertices, K-regular) with an auxiliary graph
// G on K vertices (D-regular): two X-steps with the middle label walked one
// step in G. The auxiliary step starts from the arrival label of the first
// X-step, which makes the composed rotation map a bijection for arbitrary
// two-sided labelings; for consistently labeled X (arrival == departure
// label) it is the usual one-sided composition. KD-regular on X's vertices.
RotationGraph dsquare(const RotationGraph& x, const RotationGraph& g,
                      std::uint64_t max_slots = kMaxEdgeSlots);

// mu + (1 - mu) * lambda^2, the mixing bound transported by the product.
Rat f_bound(const Rat& lambda, const Rat& mu);

// Exact structural facts about f on a rational grid: range, monotonicity in
// both arguments, the squaring and no-op endpoints, and the gap growth
// (1 - f >= 3/2 * (1 - lambda)) for gap <= 1/4 and mu <= 1/100.
Report f_props_check(std::uint32_t grid = 16);

// Brackets the mixing ratios of X, G and of the product, then asserts
// product.lower <= f(x.upper, g.upper) + tol.
struct DsquareMixingReport {
  MixingEstimate x;
  MixingEstimate g;
  MixingEstimate product;
  double bound = 0.0;
  Report report;
};
DsquareMixingReport verify_dsquare_mixing(const RotationGraph& x, const RotationGraph& g,
                                          double tol = 1e-9);

// From a mean-free v with norm_sq(M v) > f(lambda,mu)^2 norm_sq(v) (M = the
// product's walk matrix), extracts u in {v, Av} with norm_sq(A u) >
// lambda^2 norm_sq(u), A = X's walk matrix; prefers v. All comparisons exact.
struct BackpropResult {
  RatVec u;
  int branch = 0;  // 0: u = v, 1: u = Av
  Rat ratio_sq;    // exact norm_sq(A u)/norm_sq(u)
};
BackpropResult witness_backprop(const RotationGraph& x, const RotationGraph& g,
                                const RatVec& v, const Rat& lambda, const Rat& mu);

// Materializes the walk matrix of the product as the five-factor product
// P * R * (I (x) B) * R * L (R = the rotation permutation on vertex/label
// pairs, B = G's walk matrix, L/P = uniform lift and block sum) and checks
// it equals to_adjacency(dsquare(x,g)) entrywise; also checks the split
// M = (1-mu) A^2 + mu * P * R * (I (x) C) * R * L with C from the exact
// averaging decomposition of B at the least feasible mu.
Report five_step_identity_check(const RotationGraph& x, const RotationGraph& g);

}  // namespace dsq
