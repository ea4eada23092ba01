#include "dsq/rational.hpp"

#include <cctype>

#include "dsq/error.hpp"

namespace dsq {

RatMat RatMat::identity(std::size_t n) {
  RatMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

RatMat RatMat::uniform(std::size_t n) {
  RatMat m(n, n);
  Rat e(1, n);
  for (auto& x : m.a) x = e;
  return m;
}

Rat parse_rat(const std::string& s) {
  if (s.empty()) throw Error("BadRational", "empty string");
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c)) && c != '/' && c != '-' && c != '+')
      throw Error("BadRational", "unexpected character in '" + s + "'");
  }
  mpq_class q;
  if (q.set_str(s, 10) != 0) throw Error("BadRational", "unparsable '" + s + "'");
  if (q.get_den() == 0) throw Error("BadRational", "zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

std::string format_rat(const Rat& q) {
  return q.get_str();
}

RatVec matvec(const RatMat& m, const RatVec& v) {
  if (m.cols != v.size()) throw Error("DimensionMismatch", "matvec");
  RatVec out(m.rows, Rat(0));
  for (std::size_t i = 0; i < m.rows; ++i) {
    Rat acc(0);
    for (std::size_t j = 0; j < m.cols; ++j)
      if (m.at(i, j) != 0) acc += m.at(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

RatMat matmul(const RatMat& x, const RatMat& y) {
  if (x.cols != y.rows) throw Error("DimensionMismatch", "matmul");
  RatMat out(x.rows, y.cols);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t k = 0; k < x.cols; ++k) {
      const Rat& f = x.at(i, k);
      if (f == 0) continue;
      for (std::size_t j = 0; j < y.cols; ++j)
        if (y.at(k, j) != 0) out.at(i, j) += f * y.at(k, j);
    }
  return out;
}

RatMat transpose(const RatMat& m) {
  RatMat out(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out.at(j, i) = m.at(i, j);
  return out;
}

RatMat mat_add(const RatMat& x, const RatMat& y) {
  if (x.rows != y.rows || x.cols != y.cols) throw Error("DimensionMismatch", "mat_add");
  RatMat out(x.rows, x.cols);
  for (std::size_t i = 0; i < x.a.size(); ++i) out.a[i] = x.a[i] + y.a[i];
  return out;
}

RatMat mat_scale(const Rat& c, const RatMat& m) {
  RatMat out(m.rows, m.cols);
  for (std::size_t i = 0; i < m.a.size(); ++i) out.a[i] = c * m.a[i];
  return out;
}

Rat inner(const RatVec& u, const RatVec& v) {
  if (u.size() != v.size()) throw Error("DimensionMismatch", "inner");
  Rat acc(0);
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i] != 0 && v[i] != 0) acc += u[i] * v[i];
  return acc;
}

Rat norm_sq(const RatVec& v) { return inner(v, v); }

RatVec vec_add(const RatVec& u, const RatVec& v) {
  if (u.size() != v.size()) throw Error("DimensionMismatch", "vec_add");
  RatVec out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + v[i];
  return out;
}

RatVec vec_sub(const RatVec& u, const RatVec& v) {
  if (u.size() != v.size()) throw Error("DimensionMismatch", "vec_sub");
  RatVec out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] - v[i];
  return out;
}

RatVec vec_scale(const Rat& c, const RatVec& v) {
  RatVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = c * v[i];
  return out;
}

RatVec project_perp_uniform(const RatVec& v) {
  if (v.empty()) throw Error("DimensionMismatch", "project_perp_uniform on empty vector");
  Rat mean(0);
  for (const Rat& x : v) mean += x;
  mean /= static_cast<unsigned long>(v.size());
  RatVec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] - mean;
  return out;
}

bool is_zero(const RatVec& v) {
  for (const Rat& x : v)
    if (x != 0) return false;
  return true;
}

bool is_stochastic(const RatMat& m) {
  if (m.rows != m.cols || m.rows == 0) return false;
  for (const Rat& x : m.a)
    if (x < 0) return false;
  for (std::size_t i = 0; i < m.rows; ++i) {
    Rat rs(0), cs(0);
    for (std::size_t j = 0; j < m.cols; ++j) {
      rs += m.at(i, j);
      cs += m.at(j, i);
    }
    if (rs != 1 || cs != 1) return false;
  }
  return true;
}

RatVec lift(const RatVec& v, std::size_t n) {
  if (n == 0) throw Error("DimensionMismatch", "lift with zero block size");
  RatVec out(v.size() * n);
  for (std::size_t i = 0; i < v.size(); ++i) {
    Rat e = v[i] / static_cast<unsigned long>(n);
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = e;
  }
  return out;
}

RatVec project_blocks(const RatVec& w, std::size_t n) {
  if (n == 0 || w.size() % n != 0)
    throw Error("DimensionMismatch", "project_blocks: length not a multiple of block size");
  RatVec out(w.size() / n, Rat(0));
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < n; ++j) out[i] += w[i * n + j];
  return out;
}

}  // namespace dsq
