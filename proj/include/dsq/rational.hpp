#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <vector>

namespace dsq {

using Rat = mpq_class;
using Int = mpz_class;
using RatVec = std::vector<Rat>;

// Dense exact-rational matrix, row-major. Entries act on column vectors:
// (m*v)[i] = sum_j m(i,j) v[j], so for walk matrices column j is the
// out-distribution of vertex j.
struct RatMat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Rat> a;

  RatMat() = default;
  RatMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

  Rat& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const Rat& at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  bool operator==(const RatMat&) const = default;

  static RatMat identity(std::size_t n);
  static RatMat uniform(std::size_t n);  // every entry 1/n
};

// Accepts "p/q" or "p" with optional sign; canonicalizes. Throws Error("BadRational").
Rat parse_rat(const std::string& s);
std::string format_rat(const Rat& q);  // "p/q", or "p" when the denominator is 1

// Directed rounding into double: smallest double >= x, and largest double
// whose square is <= x. Both verified against the exact value.
double upper_double(const Rat& x);
double sqrt_lower_double(const Rat& x);

RatVec matvec(const RatMat& m, const RatVec& v);
RatMat matmul(const RatMat& x, const RatMat& y);
RatMat transpose(const RatMat& m);
RatMat mat_add(const RatMat& x, const RatMat& y);
RatMat mat_scale(const Rat& c, const RatMat& m);

Rat inner(const RatVec& u, const RatVec& v);
Rat norm_sq(const RatVec& v);
RatVec vec_add(const RatVec& u, const RatVec& v);
RatVec vec_sub(const RatVec& u, const RatVec& v);
RatVec vec_scale(const Rat& c, const RatVec& v);

// v minus its mean in every coordinate; exact projection onto the
// complement of the all-ones direction. Idempotent.
RatVec project_perp_uniform(const RatVec& v);

bool is_zero(const RatVec& v);

// Nonnegative entries and every row and column summing to one (doubly
// stochastic; walk matrices of regular graphs satisfy this).
bool is_stochastic(const RatMat& m);

// Tensor-space plumbing. lift spreads each of the m entries uniformly over a
// block of n slots (norm_sq scales by 1/n); project_blocks sums each block
// (norm_sq grows by at most n); project_blocks(lift(v,n),n) == v.
RatVec lift(const RatVec& v, std::size_t n);
RatVec project_blocks(const RatVec& w, std::size_t n);

}  // namespace dsq
