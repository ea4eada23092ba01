#include "dsq/spectral.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

#include "dsq/error.hpp"

namespace dsq {

namespace {

// S = M^T M - U acts as the square of M restricted to the mean-free
// subspace: S*1 = 0, and for mean-free v, v^T S v = ||M v||^2. (Uses both
// stochasticity directions: row sums give S*1 = 0, column sums make U absorb
// the rank-one part exactly.)
RatMat deflated_gram(const RatMat& m) {
  RatMat s = matmul(transpose(m), m);
  Rat u(1, m.rows);
  for (auto& x : s.a) x -= u;
  return s;
}

Rat dyadic_round(const Rat& x, unsigned bits) {
  Int scale = Int(1) << bits;
  Int num = x.get_num() * scale;
  Int den = x.get_den();
  // round-half-up toward +inf is fine here; any nearby dyadic works
  Int q = (2 * num + den) / (2 * den);
  Rat r(q, scale);
  r.canonicalize();
  return r;
}

std::vector<double> to_double_matrix(const RatMat& m) {
  std::vector<double> out(m.a.size());
  for (std::size_t i = 0; i < m.a.size(); ++i) out[i] = m.a[i].get_d();
  return out;
}

RatVec random_rat_vec(std::size_t n, Prng& rng) {
  RatVec v(n);
  for (auto& x : v) {
    long num = static_cast<long>(rand_below(rng, 17)) - 8;
    unsigned long den = 1 + rand_below(rng, 8);
    x = Rat(num, den);
    x.canonicalize();
  }
  return v;
}

}  // namespace

double sqrt_lower_double(const Rat& x) {
  if (x <= 0) return 0.0;
  double s = std::sqrt(x.get_d());
  for (int i = 0; i < 4; ++i) s = std::nextafter(s, 0.0);
  while (Rat(s) * Rat(s) > x) s = std::nextafter(s, 0.0);
  if (s < 0) s = 0.0;
  return s;
}

double upper_double(const Rat& x) {
  double d = x.get_d();
  double inf = std::numeric_limits<double>::infinity();
  while (Rat(d) < x) d = std::nextafter(d, inf);
  return d;
}

bool is_positive_semidefinite(RatMat a) {
  if (a.rows != a.cols) throw Error("DimensionMismatch", "PSD test needs a square matrix");
  std::size_t n = a.rows;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (a.at(i, i) > a.at(p, p)) p = i;
    if (a.at(p, p) < 0) return false;
    if (a.at(p, p) == 0) {
      // PSD forces the whole trailing block to vanish with its diagonal.
      for (std::size_t i = k; i < n; ++i)
        for (std::size_t j = k; j < n; ++j)
          if (a.at(i, j) != 0) return false;
      return true;
    }
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a.at(k, j), a.at(p, j));
      for (std::size_t i = 0; i < n; ++i) std::swap(a.at(i, k), a.at(i, p));
    }
    Rat piv = a.at(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a.at(i, k) == 0) continue;
      Rat f = a.at(i, k) / piv;
      for (std::size_t j = k + 1; j < n; ++j)
        if (a.at(k, j) != 0) a.at(i, j) -= f * a.at(k, j);
    }
    // keep symmetry explicit for the trailing block
    for (std::size_t i = k + 1; i < n; ++i) {
      a.at(i, k) = 0;
      a.at(k, i) = 0;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) a.at(j, i) = a.at(i, j);
  }
  return true;
}

MixingEstimate mixing_ratio(const RatMat& m, double tol, std::uint64_t max_iters,
                            std::uint64_t seed) {
  if (!is_stochastic(m))
    throw Error("NotStochastic", "mixing_ratio needs a doubly stochastic matrix");
  if (tol <= 0) throw Error("BadTolerance", "tol must be positive");
  std::size_t n = m.rows;

  MixingEstimate est;
  if (n == 1) {
    est.witness = {Rat(0)};
    return est;
  }

  RatMat s = deflated_gram(m);
  Rat tol_rat(tol);

  // eta-space bisection; PSD(eta^2 I - S) certifies lambda_max(S) <= eta^2.
  auto psd_at = [&](const Rat& eta_sq) {
    RatMat a = s;
    for (auto& x : a.a) x = -x;
    for (std::size_t i = 0; i < n; ++i) a.at(i, i) += eta_sq;
    return is_positive_semidefinite(std::move(a));
  };

  Rat lo(0), hi(1);
  if (psd_at(Rat(0))) {
    hi = 0;
  } else {
    if (!psd_at(Rat(1)))
      throw Error("NotStochastic", "norm bound violated; matrix is not doubly stochastic");
    int rounds = 0;
    while (hi - lo > tol_rat / 2 && rounds < 128) {
      Rat mid = (lo + hi) / 2;
      if (psd_at(mid * mid))
        hi = mid;
      else
        lo = mid;
      ++rounds;
    }
  }
  est.upper_sq = hi * hi;
  est.upper = upper_double(hi);

  if (hi == 0) {
    // ratio is exactly zero; any mean-free vector certifies the lower bound
    est.witness.assign(n, Rat(0));
    est.witness[0] = 1;
    est.witness[1] = -1;
    est.witness_rayleigh_sq = 0;
    est.lower = 0.0;
    return est;
  }

  // Witness: double warm start on S, then exact Rayleigh sharpening.
  std::vector<double> sd = to_double_matrix(s);
  Prng rng(seed);
  auto fresh_start = [&] {
    std::vector<double> v(n);
    double mean = 0;
    for (auto& x : v) {
      x = (double(rand_below(rng, 1u << 20)) / double(1u << 20)) - 0.5;
      mean += x;
    }
    mean /= double(n);
    for (auto& x : v) x -= mean;
    return v;
  };
  auto dbl_step = [&](std::vector<double>& v) {
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w[i] += sd[i * n + j] * v[j];
    double norm = 0;
    for (double x : w) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0)
      for (double& x : w) x /= norm;
    v = std::move(w);
  };

  std::vector<double> vd = fresh_start();
  for (std::size_t it = 0; it < 4 * n + 300; ++it) dbl_step(vd);

  RatVec w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = Rat(vd[i]);
  w = project_perp_uniform(w);
  if (is_zero(w)) {
    w.assign(n, Rat(0));
    w[0] = 1;
    w[1] = -1;
  }

  auto rayleigh = [&](const RatVec& v) -> Rat {
    Rat den = norm_sq(v);
    if (den == 0) return Rat(0);
    return norm_sq(matvec(m, v)) / den;
  };

  Rat target = hi - tol_rat;  // lower must reach past this for a tol bracket
  if (target < 0) target = 0;
  Rat rho = rayleigh(w);
  std::uint64_t iters = 0;
  int stall = 0;
  Rat last_rho = rho;
  while (Rat(sqrt_lower_double(rho)) < target) {
    if (++iters > max_iters)
      throw Error("NonConvergence", "witness sharpening exceeded max_iters");
    RatVec next = matvec(s, w);
    // bound bit growth, then restore exact mean-freeness
    for (auto& x : next) x = dyadic_round(x, 64);
    next = project_perp_uniform(next);
    if (is_zero(next)) {
      vd = fresh_start();
      for (std::size_t it = 0; it < 4 * n + 300; ++it) dbl_step(vd);
      for (std::size_t i = 0; i < n; ++i) next[i] = Rat(vd[i]);
      next = project_perp_uniform(next);
    }
    // rescale into a sane magnitude window (exact powers of two)
    Rat biggest(0);
    for (const auto& x : next) {
      Rat ax = abs(x);
      if (ax > biggest) biggest = ax;
    }
    if (biggest > 0) {
      while (biggest > 2) {
        for (auto& x : next) x /= 2;
        biggest /= 2;
      }
      while (biggest < 1) {
        for (auto& x : next) x *= 2;
        biggest *= 2;
      }
    }
    w = std::move(next);
    rho = rayleigh(w);
    if (rho <= last_rho + last_rho / 1000000) {
      if (++stall > 12) {
        vd = fresh_start();
        for (std::size_t it = 0; it < 4 * n + 300; ++it) dbl_step(vd);
        for (std::size_t i = 0; i < n; ++i) w[i] = Rat(vd[i]);
        w = project_perp_uniform(w);
        rho = rayleigh(w);
        stall = 0;
      }
    } else {
      stall = 0;
    }
    last_rho = rho;
  }

  est.witness = w;
  est.witness_rayleigh_sq = rho;
  est.lower = sqrt_lower_double(rho);
  est.iters = iters;
  if (est.lower > est.upper) est.lower = est.upper;  // guard double rounding
  return est;
}

Report check_norm_one(const RatMat& m, std::uint32_t trials, std::uint64_t seed) {
  if (!is_stochastic(m))
    throw Error("NotStochastic", "norm bound holds for doubly stochastic matrices");
  Report r;
  r.check = "norm-contraction";
  r.seed = seed;
  r.ok = true;
  Prng rng(seed);
  std::size_t n = m.rows;
  for (std::uint32_t t = 0; t < trials; ++t) {
    RatVec v = random_rat_vec(n, rng);
    RatVec mv = matvec(m, v);
    bool direct = norm_sq(mv) <= norm_sq(v);

    // Route 2: per-row weighted expansion. With row weights summing to one,
    // (sum_j m_ij v_j)^2 <= sum_j m_ij v_j^2; the row bounds add up to
    // norm_sq(v) because columns also sum to one.
    bool rows_ok = true;
    Rat total(0);
    for (std::size_t i = 0; i < n; ++i) {
      Rat row_bound(0);
      for (std::size_t j = 0; j < n; ++j)
        if (m.at(i, j) != 0) row_bound += m.at(i, j) * v[j] * v[j];
      if (mv[i] * mv[i] > row_bound) rows_ok = false;
      total += row_bound;
    }
    bool second = rows_ok && total == norm_sq(v);

    if (!direct || !second) {
      r.ok = false;
      r.details["counterexample_trial"] = t;
      break;
    }
  }
  r.details["trials"] = trials;
  r.details["routes"] = {"direct-norm", "row-expansion"};
  return r;
}

JdDecomposition jd_decompose(const RatMat& m, const Rat& eta, std::uint32_t trials,
                             std::uint64_t seed) {
  if (!is_stochastic(m)) throw Error("NotStochastic", "jd_decompose needs a stochastic matrix");
  if (eta <= 0 || eta > 1) throw Error("EtaOutOfRange", "eta must lie in (0,1]");
  std::size_t n = m.rows;
  RatMat u = RatMat::uniform(n);

  JdDecomposition out;
  out.c = RatMat(n, n);
  out.d = RatMat(n, n);
  for (std::size_t i = 0; i < n * n; ++i) {
    out.c.a[i] = (m.a[i] - (1 - eta) * u.a[i]) / eta;
    out.d.a[i] = (m.a[i] - u.a[i]) / eta;
  }

  Report& r = out.report;
  r.check = "averaging-decomposition";
  r.seed = seed;
  r.tol = 0.0;

  bool reconstruct_c = true, reconstruct_d = true;
  for (std::size_t i = 0; i < n * n; ++i) {
    if (m.a[i] != (1 - eta) * u.a[i] + eta * out.c.a[i]) reconstruct_c = false;
    if (m.a[i] != u.a[i] + eta * out.d.a[i]) reconstruct_d = false;
  }

  bool zero_sums = true;
  for (std::size_t i = 0; i < n; ++i) {
    Rat rs(0), cs(0);
    for (std::size_t j = 0; j < n; ++j) {
      rs += out.d.at(i, j);
      cs += out.d.at(j, i);
    }
    if (rs != 0 || cs != 0) zero_sums = false;
  }

  bool c_stochastic = is_stochastic(out.c);

  bool fixes_uniform = true;
  RatVec unif(n, Rat(1, n));
  RatVec cu = matvec(out.c, unif);
  RatVec du = matvec(out.d, unif);
  for (std::size_t i = 0; i < n; ++i) {
    if (cu[i] != Rat(1, n)) fixes_uniform = false;
    if (du[i] != 0) fixes_uniform = false;
  }

  Prng rng(seed);
  bool contraction = true;
  for (std::uint32_t t = 0; t < trials; ++t) {
    RatVec v = project_perp_uniform(random_rat_vec(n, rng));
    if (c_stochastic && norm_sq(matvec(out.c, v)) > norm_sq(v)) contraction = false;
    if (norm_sq(matvec(out.d, v)) > norm_sq(v)) contraction = false;
  }

  r.ok = reconstruct_c && reconstruct_d && zero_sums && fixes_uniform;
  r.details["eta"] = format_rat(eta);
  r.details["reconstructs"] = reconstruct_c && reconstruct_d;
  r.details["d_zero_row_col_sums"] = zero_sums;
  r.details["c_stochastic"] = c_stochastic;
  r.details["fixes_uniform"] = fixes_uniform;
  r.details["sampled_contraction"] = contraction;
  r.details["trials"] = trials;
  return out;
}

SedrakyanResult sedrakyan_check(const RatVec& u, const RatVec& v) {
  if (u.size() != v.size() || u.empty())
    throw Error("DimensionMismatch", "sedrakyan_check needs equal-length nonempty vectors");
  for (const Rat& x : v)
    if (x <= 0) throw Error("PositiveDenominatorRequired", "all v entries must be positive");

  SedrakyanResult res;
  Rat su(0), sv(0);
  res.lhs = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    res.lhs += u[i] * u[i] / v[i];
    su += u[i];
    sv += v[i];
  }
  res.rhs = su * su / sv;
  res.certificate = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = i + 1; j < u.size(); ++j) {
      Rat cross = u[i] * v[j] - u[j] * v[i];
      res.certificate += cross * cross / (v[i] * v[j]);
    }
  bool identity = res.lhs * sv - su * su == res.certificate;
  res.ok = identity && res.certificate >= 0 && res.lhs >= res.rhs;
  return res;
}

Report cauchy_schwarz_check(const RatVec& u, const RatVec& v) {
  Report r;
  r.check = "cauchy-schwarz";
  Rat ip = inner(u, v);
  r.ok = ip * ip <= norm_sq(u) * norm_sq(v);
  return r;
}

Report triangle_sq_check(const RatVec& u, const RatVec& v, const Rat& a, const Rat& b) {
  if (a < 0 || b < 0) throw Error("BadBound", "bounds must be nonnegative");
  Report r;
  r.check = "triangle-squared";
  if (norm_sq(u) > a * a || norm_sq(v) > b * b) {
    r.ok = false;
    r.details["precondition"] = "norm bounds do not hold";
    return r;
  }
  // ||u+v||^2 = ||u||^2 + 2<u,v> + ||v||^2 <= a^2 + 2ab + b^2 via the exact
  // Cauchy-Schwarz square comparison.
  Rat ip = inner(u, v);
  bool cs = ip * ip <= norm_sq(u) * norm_sq(v);
  bool bound = norm_sq(vec_add(u, v)) <= (a + b) * (a + b);
  r.ok = cs && bound;
  return r;
}

}  // namespace dsq
