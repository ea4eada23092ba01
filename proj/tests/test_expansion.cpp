#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cstdint>

#include "dsq/error.hpp"
#include "dsq/expansion.hpp"
#include "dsq/rotation_graph.hpp"

using namespace dsq;

namespace {

// independent enumerator: minimize cut/(d*|U|) over 0 < |U| <= n/2
Rat brute_expansion(const RotationGraph& g) {
  Rat best(-1);
  for (std::uint64_t mask = 1; mask + 1 < (1ull << g.n); ++mask) {
    std::uint32_t size = std::popcount(mask);
    if (2ull * size > g.n) continue;
    std::uint64_t cut = 0;
    for (std::uint32_t v = 0; v < g.n; ++v)
      if ((mask >> v) & 1)
        for (std::uint32_t i = 0; i < g.d; ++i)
          if (!((mask >> g.out(v, i)) & 1)) ++cut;
    Rat eps(cut, std::uint64_t(g.d) * size);
    eps.canonicalize();
    if (best < 0 || eps < best) best = eps;
  }
  return best;
}

UndirectedGraph two_squares() {
  UndirectedGraph g;
  g.n = 8;
  g.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6}, {6, 7}, {7, 4}};
  return g;
}

}  // namespace

TEST_CASE("complete graph expansion with witness") {
  ExpansionCertificate cert = edge_expansion_exact(from_undirected(complete_graph(4)));
  CHECK(cert.epsilon == Rat(2, 3));
  CHECK(cert.cut == 4);
  CHECK(cert.witness_set == std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("cycle expansion is minimized by an arc") {
  ExpansionCertificate cert = edge_expansion_exact(from_undirected(cycle_graph(8)));
  CHECK(cert.epsilon == Rat(1, 4));
  CHECK(cert.cut == 2);
  CHECK(cert.witness_mask == 0xf);  // the first optimal arc in mask order
  CHECK(cert.witness_set == std::vector<std::uint32_t>{0, 1, 2, 3});
}

TEST_CASE("disconnected graphs have zero expansion") {
  RotationGraph g = from_undirected(two_squares());
  ExpansionCertificate cert = edge_expansion_exact(g);
  CHECK(cert.epsilon == 0);
  CHECK(cert.cut == 0);
  CHECK_FALSE(subset_connected(g));
  CHECK_FALSE(path_connected(g));
  CHECK(reachable_from(g, 0) == std::vector<std::uint32_t>{0, 1, 2, 3});
}

TEST_CASE("both enumerators agree with the brute-force oracle") {
  Prng rng(4242);
  for (int t = 0; t < 8; ++t) {
    std::uint32_t n = 3 + rand_below(rng, 6);
    std::uint32_t d = 2 + rand_below(rng, 3);
    RotationGraph g = random_involution_graph(n, d, rng);
    Rat oracle = brute_expansion(g);
    ExpansionCertificate cert = edge_expansion_exact(g);
    CHECK(cert.epsilon == oracle);
    CHECK(edge_expansion_alt(g) == oracle);
    CHECK(subset_connected(g) == path_connected(g));
  }
}

TEST_CASE("enumeration guard rails") {
  RotationGraph g = from_undirected(cycle_graph(5));
  CHECK_THROWS_WITH_AS(edge_expansion_exact(g, 4), doctest::Contains("EnumerationBound"),
                       Error);
  RotationGraph tiny;
  tiny.n = 1;
  tiny.d = 1;
  tiny.to = {0};
  tiny.in_label = {0};
  CHECK_THROWS_AS(edge_expansion_exact(tiny), Error);
  CHECK(subset_connected(tiny));
}

TEST_CASE("connected graphs clear the 2/(dn) floor") {
  for (std::uint32_t n : {3u, 5u, 8u, 12u}) {
    Report r = check_connected_expansion_bound(from_undirected(cycle_graph(n)));
    CHECK(r.ok);
    CHECK(r.details["connected"] == true);
  }
  Report k = check_connected_expansion_bound(from_undirected(complete_graph(5)));
  CHECK(k.ok);
  // disconnected: positivity clause takes over, bound not required
  Report d = check_connected_expansion_bound(from_undirected(two_squares()));
  CHECK(d.ok);
  CHECK(d.details["connected"] == false);
  CHECK(d.details["epsilon"] == "0");
}

TEST_CASE("directed reachability differs from subset cuts only in direction") {
  // two directed 2-cycles: proper, disconnected
  RotationGraph g;
  g.n = 4;
  g.d = 1;
  g.to = {1, 0, 3, 2};
  g.in_label = {0, 0, 0, 0};
  CHECK_FALSE(path_connected(g));
  CHECK(reachable_from(g, 2) == std::vector<std::uint32_t>{2, 3});
}

TEST_CASE("sparse cut witness walks through every step") {
  RotationGraph g = from_undirected(cycle_graph(8));
  Report r = cheeger_witness_for_set(g, 0xf, Rat(1, 2));
  CHECK(r.ok);
  CHECK(r.details["cut"] == 2);
  CHECK(r.details["subset_size"] == 4);
  for (auto& [key, val] : r.details["steps"].items()) {
    INFO(key);
    CHECK(val == true);
  }
}

TEST_CASE("witness construction rejects bad inputs") {
  RotationGraph g = from_undirected(cycle_graph(8));
  // expansion of the arc is 1/4, not below 1/5
  CHECK_THROWS_WITH_AS(cheeger_witness_for_set(g, 0xf, Rat(1, 5)),
                       doctest::Contains("BadSubset"), Error);
  CHECK_THROWS_AS(cheeger_witness_for_set(g, 0, Rat(1, 2)), Error);
  CHECK_THROWS_AS(cheeger_witness_for_set(g, 0x1f, Rat(1, 2)), Error);  // |U| > n/2
  CHECK_THROWS_WITH_AS(cheeger_witness_for_set(g, 0xf, Rat(3, 4)),
                       doctest::Contains("BadBound"), Error);
  Prng rng(1);
  RotationGraph dir = random_rotation_graph(6, 2, rng);
  CHECK_THROWS_WITH_AS(cheeger_witness_for_set(dir, 3, Rat(1, 2)),
                       doctest::Contains("NotUndirected"), Error);
}

TEST_CASE("certificate plugs into the witness builder") {
  RotationGraph g = from_undirected(cycle_graph(6));
  ExpansionCertificate cert = edge_expansion_exact(g);
  REQUIRE(cert.epsilon < Rat(1, 2));
  Rat alpha = (cert.epsilon + Rat(1, 2)) / 2;
  CHECK(cheeger_upper_witness(g, cert, alpha).ok);
  CHECK_THROWS_AS(cheeger_upper_witness(g, cert, cert.epsilon), Error);
}

TEST_CASE("loop-heavy cheeger bound") {
  RotationGraph g = add_self_loops(from_undirected(cycle_graph(6)), 2);
  REQUIRE(g.d == 4);
  Report r = cheeger_mihail_check(g);
  CHECK(r.ok);

  RotationGraph k = add_self_loops(from_undirected(complete_graph(4)), 3);
  CHECK(cheeger_mihail_check(k).ok);

  CHECK_THROWS_WITH_AS(cheeger_mihail_check(add_self_loops(from_undirected(cycle_graph(6)), 1)),
                       doctest::Contains("OddDegree"), Error);
  CHECK_THROWS_WITH_AS(cheeger_mihail_check(from_undirected(cycle_graph(6))),
                       doctest::Contains("SelfLoopDeficit"), Error);
  Prng rng(5);
  CHECK_THROWS_AS(cheeger_mihail_check(random_rotation_graph(4, 2, rng)), Error);
}

TEST_CASE("connectivity forces mixing below one for looped graphs") {
  RotationGraph g = add_self_loops(from_undirected(cycle_graph(5)), 1);
  Report r = check_directed_mixing_bound(g);
  CHECK(r.ok);
  CHECK(r.details["product_degree"] == 9);
  // the product loop count at v is sum_u c(v->u)^2 = 3 here (three distinct
  // out-neighbors, one edge each)
  for (auto l : r.details["product_loops"]) CHECK(l == 3);

  CHECK_THROWS_WITH_AS(check_directed_mixing_bound(from_undirected(cycle_graph(5))),
                       doctest::Contains("NoSelfLoop"), Error);
  CHECK_THROWS_WITH_AS(check_directed_mixing_bound(add_self_loops(from_undirected(two_squares()), 1)),
                       doctest::Contains("NotConnected"), Error);
}
