#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "dsq/error.hpp"
#include "dsq/rational.hpp"

using namespace dsq;

TEST_CASE("parse_rat accepts integers and fractions") {
  CHECK(parse_rat("5") == Rat(5));
  CHECK(parse_rat("-5") == Rat(-5));
  CHECK(parse_rat("3/4") == Rat(3, 4));
  CHECK(parse_rat("-3/4") == Rat(-3, 4));
  CHECK(parse_rat("6/8") == Rat(3, 4));  // canonicalized
  CHECK(parse_rat("0/9") == Rat(0));
  // round trip through format
  CHECK(parse_rat(format_rat(Rat(-22, 7))) == Rat(-22, 7));
  CHECK(format_rat(Rat(3, 4)) == "3/4");
  CHECK(format_rat(parse_rat("8/4")) == "2");
  CHECK(format_rat(Rat(0)) == "0");
}

TEST_CASE("parse_rat rejects junk") {
  CHECK_THROWS_WITH_AS(parse_rat(""), doctest::Contains("BadRational"), Error);
  CHECK_THROWS_AS(parse_rat("1.5"), Error);
  CHECK_THROWS_AS(parse_rat("+7"), Error);  // gmp set_str has no leading '+'
  CHECK_THROWS_AS(parse_rat("x"), Error);
  CHECK_THROWS_AS(parse_rat("1/0"), Error);
  CHECK_THROWS_AS(parse_rat("1/2/3"), Error);
}

TEST_CASE("matrix constructors") {
  RatMat id = RatMat::identity(3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(id.at(i, j) == (i == j ? Rat(1) : Rat(0)));
  RatMat j4 = RatMat::uniform(4);
  for (const Rat& x : j4.a) CHECK(x == Rat(1, 4));
  CHECK(is_stochastic(j4));
  CHECK(is_stochastic(id));
}

TEST_CASE("matmul against a worked example") {
  RatMat a(2, 3), b(3, 2);
  // a = [1 2 3; 4 5 6], b = [1 1/2; 0 1; -1 2]
  a.at(0, 0) = 1; a.at(0, 1) = 2; a.at(0, 2) = 3;
  a.at(1, 0) = 4; a.at(1, 1) = 5; a.at(1, 2) = 6;
  b.at(0, 0) = 1; b.at(0, 1) = Rat(1, 2);
  b.at(1, 0) = 0; b.at(1, 1) = 1;
  b.at(2, 0) = -1; b.at(2, 1) = 2;
  RatMat c = matmul(a, b);
  REQUIRE(c.rows == 2);
  REQUIRE(c.cols == 2);
  CHECK(c.at(0, 0) == Rat(-2));
  CHECK(c.at(0, 1) == Rat(17, 2));
  CHECK(c.at(1, 0) == Rat(-2));
  CHECK(c.at(1, 1) == Rat(19));

  CHECK(transpose(transpose(a)) == a);
  CHECK_THROWS_AS(matmul(b, b), Error);
}

TEST_CASE("matvec and linear ops") {
  RatMat m(2, 2);
  m.at(0, 0) = Rat(1, 2); m.at(0, 1) = Rat(1, 2);
  m.at(1, 0) = Rat(1, 3); m.at(1, 1) = Rat(2, 3);
  RatVec v{Rat(6), Rat(-3)};
  RatVec mv = matvec(m, v);
  CHECK(mv[0] == Rat(3, 2));
  CHECK(mv[1] == Rat(0));

  RatMat s = mat_scale(Rat(2), m);
  CHECK(s.at(1, 1) == Rat(4, 3));
  RatMat sum = mat_add(m, m);
  CHECK(sum == s);
  CHECK_THROWS_AS(matvec(m, RatVec{Rat(1)}), Error);
}

TEST_CASE("inner product and norms") {
  RatVec u{Rat(1), Rat(-2), Rat(1, 2)};
  RatVec v{Rat(3), Rat(1), Rat(4)};
  CHECK(inner(u, v) == Rat(3));
  CHECK(norm_sq(u) == Rat(21, 4));
  CHECK(norm_sq(vec_sub(u, u)) == Rat(0));
  CHECK(vec_add(u, vec_scale(Rat(-1), u)) == RatVec(3, Rat(0)));
  CHECK(is_zero(RatVec(4, Rat(0))));
  CHECK_FALSE(is_zero(u));
}

TEST_CASE("project_perp_uniform removes the mean and is idempotent") {
  RatVec v{Rat(1), Rat(2), Rat(6)};
  RatVec p = project_perp_uniform(v);
  Rat sum(0);
  for (const Rat& x : p) sum += x;
  CHECK(sum == Rat(0));
  CHECK(p[0] == Rat(-2));
  CHECK(p[2] == Rat(3));
  CHECK(project_perp_uniform(p) == p);
  // orthogonality: <v - p, p> = mean * sum(p) = 0
  CHECK(inner(vec_sub(v, p), p) == Rat(0));
}

TEST_CASE("is_stochastic flags bad row or column sums") {
  RatMat m = RatMat::uniform(3);
  CHECK(is_stochastic(m));
  m.at(0, 0) = Rat(1, 2);
  CHECK_FALSE(is_stochastic(m));
  RatMat neg = RatMat::identity(2);
  neg.at(0, 0) = Rat(-1);
  CHECK_FALSE(is_stochastic(neg));
  CHECK_FALSE(is_stochastic(RatMat(2, 3)));
}

TEST_CASE("lift and project_blocks invert and scale norms as promised") {
  RatVec v{Rat(2), Rat(-4), Rat(6)};
  RatVec up = lift(v, 5);
  REQUIRE(up.size() == 15);
  CHECK(up[0] == Rat(2, 5));
  CHECK(up[7] == Rat(-4, 5));
  CHECK(project_blocks(up, 5) == v);
  CHECK(norm_sq(up) * 5 == norm_sq(v));
  // block sums can only grow the norm by a factor of the block size
  RatVec w{Rat(1), Rat(1), Rat(1), Rat(-1), Rat(0), Rat(2)};
  RatVec down = project_blocks(w, 3);
  CHECK(norm_sq(down) <= 3 * norm_sq(w));
  CHECK_THROWS_AS(project_blocks(w, 4), Error);
}

TEST_CASE("upper_double is the least double at or above the value") {
  Rat third(1, 3);
  double u = upper_double(third);
  CHECK(Rat(u) >= third);
  CHECK(Rat(std::nextafter(u, 0.0)) < third);
  // representable values come back exactly
  CHECK(upper_double(Rat(3, 4)) == 0.75);
  CHECK(Rat(upper_double(Rat(-1, 3))) >= Rat(-1, 3));
}

TEST_CASE("sqrt_lower_double never overshoots the square root") {
  Rat vals[] = {Rat(2), Rat(1, 3), Rat(9), Rat(1, 1000000), Rat(0), Rat(-4)};
  for (const Rat& x : vals) {
    double s = sqrt_lower_double(x);
    CHECK(s >= 0.0);
    CHECK(Rat(s) * Rat(s) <= (x > 0 ? x : Rat(0)));
  }
  CHECK(sqrt_lower_double(Rat(9)) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(sqrt_lower_double(Rat(0)) == 0.0);
}
