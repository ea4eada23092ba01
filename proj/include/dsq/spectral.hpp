#pragma once

#include <cstdint>

#include "dsq/prng.hpp"
#include "dsq/rational.hpp"
#include "dsq/report.hpp"

namespace dsq {

// Certified two-sided bracket for the mixing ratio of a doubly stochastic
// matrix: the least eta with ||M v|| <= eta ||v|| over all mean-free v.
//
// upper is certified by an exact positive-semidefiniteness test of
// upper_sq*I - S, where S = P0 M^T M P0 and P0 is the exact projection onto
// the mean-free subspace. lower is certified by the witness:
// norm_sq(M*witness) == witness_rayleigh_sq * norm_sq(witness) >= lower^2 *
// norm_sq(witness), all exactly. Floating point appears only in the
// warm-start iteration; every reported bound is re-derived rationally.
struct MixingEstimate {
  double lower = 0.0;
  double upper = 0.0;
  RatVec witness;           // mean-free; zero only when the ratio is exactly 0
  Rat witness_rayleigh_sq;  // exact norm_sq(M w)/norm_sq(w), 0 for zero witness
  Rat upper_sq;             // exact: lambda_max(S) <= upper_sq
  std::uint64_t iters = 0;  // exact sharpening applications used
};

MixingEstimate mixing_ratio(const RatMat& m, double tol = 1e-9,
                            std::uint64_t max_iters = 100000,
                            std::uint64_t seed = kDefaultSeed);

// Exact PSD test by symmetric elimination with greatest-diagonal pivoting.
// Exposed for the oracle cross-checks.
bool is_positive_semidefinite(RatMat a);

// Both routes of the norm bound on sampled rational vectors:
//  (1) direct: norm_sq(M v) <= norm_sq(v), exactly;
//  (2) per-row weighted-square expansion: (sum_j m_ij v_j)^2 <=
//      sum_j m_ij v_j^2 row by row, summed and compared exactly.
Report check_norm_one(const RatMat& m, std::uint32_t trials = 32,
                      std::uint64_t seed = kDefaultSeed);

// Exact decomposition against the averaging matrix: with J = uniform(n),
//   C = (M - (1-eta) J) / eta   and   D = (M - J) / eta.
// Reports whether C is stochastic (true iff eta dominates the deviation of M
// from J entrywise), that D's rows and columns sum to zero exactly, and
// sampled contraction checks for both.
struct JdDecomposition {
  RatMat c;
  RatMat d;
  Report report;
};
JdDecomposition jd_decompose(const RatMat& m, const Rat& eta,
                             std::uint32_t trials = 16, std::uint64_t seed = kDefaultSeed);

// sum u_i^2/v_i >= (sum u_i)^2 / sum v_i for positive v, with the exact
// cross-term certificate sum_{i<j} (u_i v_j - u_j v_i)^2/(v_i v_j) equal to
// lhs*sum(v) - (sum u)^2.
struct SedrakyanResult {
  bool ok = false;
  Rat lhs;          // sum u_i^2 / v_i
  Rat rhs;          // (sum u)^2 / sum v
  Rat certificate;  // nonnegative slack, exact identity with lhs/rhs
};
SedrakyanResult sedrakyan_check(const RatVec& u, const RatVec& v);

// inner(u,v)^2 <= norm_sq(u) * norm_sq(v), exactly.
Report cauchy_schwarz_check(const RatVec& u, const RatVec& v);

// Given exact bounds norm_sq(u) <= a^2, norm_sq(v) <= b^2 (a,b >= 0),
// asserts norm_sq(u+v) <= (a+b)^2 exactly.
Report triangle_sq_check(const RatVec& u, const RatVec& v, const Rat& a, const Rat& b);

}  // namespace dsq
