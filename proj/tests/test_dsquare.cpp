#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <vector>

#include "dsq/dsquare.hpp"
#include "dsq/error.hpp"
#include "dsq/rotation_graph.hpp"

using namespace dsq;

namespace {

// replay of the product definition, written independently of the library loop
RotStep oracle_step(const RotationGraph& x, const RotationGraph& g, std::uint32_t v,
                    std::uint64_t packed) {
  DSLabel lab = unpack_ds_label(packed, x.d);
  RotStep first = x.rot(v, lab.i);
  RotStep aux = g.rot(first.label, lab.j);
  RotStep second = x.rot(first.vertex, aux.vertex);
  return {second.vertex,
          static_cast<std::uint32_t>(pack_ds_label(second.label, aux.label, x.d))};
}

// two X-hops on their own, for the complete-aux degeneration
RotationGraph two_vertex_swap() {
  // doubled edge on two vertices: B is the pure swap, worst averaging case
  UndirectedGraph y;
  y.n = 2;
  y.edges = {{0, 1}, {0, 1}};
  return from_undirected(y);
}

}  // namespace

TEST_CASE("label packing round trips") {
  for (std::uint32_t k : {2u, 3u, 7u})
    for (std::uint32_t i = 0; i < k; ++i)
      for (std::uint32_t j = 0; j < 5; ++j) {
        std::uint64_t p = pack_ds_label(i, j, k);
        DSLabel l = unpack_ds_label(p, k);
        CHECK(l.i == i);
        CHECK(l.j == j);
      }
  CHECK(pack_ds_label(1, 2, 4) == 9);
}

TEST_CASE("dsquare agrees with the definitional replay") {
  Prng rng(31);
  for (int t = 0; t < 10; ++t) {
    std::uint32_t n = 2 + rand_below(rng, 6);
    std::uint32_t k = 2 + rand_below(rng, 3);
    std::uint32_t dg = 1 + rand_below(rng, 3);
    RotationGraph x = t % 2 ? random_involution_graph(n, k, rng)
                            : random_rotation_graph(n, k, rng);
    RotationGraph g = random_involution_graph(k, dg, rng);
    RotationGraph prod = dsquare(x, g);
    REQUIRE(prod.n == n);
    REQUIRE(prod.d == k * dg);
    CHECK(validate(prod).ok);  // proper for arbitrary two-sided bases
    if (x.undirected) CHECK(prod.undirected);
    for (std::uint32_t v = 0; v < n; ++v)
      for (std::uint32_t lab = 0; lab < prod.d; ++lab)
        CHECK(prod.rot(v, lab) == oracle_step(x, g, v, lab));
  }
}

TEST_CASE("complete auxiliary graph degenerates to the plain square") {
  Prng rng(32);
  for (int t = 0; t < 8; ++t) {
    std::uint32_t n = 2 + rand_below(rng, 7);
    std::uint32_t k = 2 + rand_below(rng, 4);
    RotationGraph x = t % 2 ? random_involution_graph(n, k, rng)
                            : random_rotation_graph(n, k, rng);
    RotationGraph prod = dsquare(x, complete_with_loops(k));
    RotationGraph sq = power(x, 2);
    // identical rotation maps, not merely equal counts
    CHECK(prod.to == sq.to);
    CHECK(prod.in_label == sq.in_label);
  }
}

TEST_CASE("dsquare input validation") {
  RotationGraph x = from_undirected(cycle_graph(4));
  CHECK_THROWS_WITH_AS(dsquare(x, complete_with_loops(3)),
                       doctest::Contains("DimensionMismatch"), Error);
  CHECK_THROWS_WITH_AS(dsquare(x, complete_with_loops(2), 8),
                       doctest::Contains("DegreeOverflow"), Error);
  RotationGraph bad = x;
  bad.to[0] = bad.to[2];
  bad.in_label[0] = bad.in_label[2];
  CHECK_THROWS_WITH_AS(dsquare(bad, complete_with_loops(2)),
                       doctest::Contains("ImproperLabeling"), Error);
}

TEST_CASE("f_bound values and structural sweep") {
  CHECK(f_bound(Rat(1, 2), Rat(0)) == Rat(1, 4));
  CHECK(f_bound(Rat(1), Rat(1, 7)) == Rat(1));
  CHECK(f_bound(Rat(0), Rat(1, 3)) == Rat(1, 3));
  CHECK(f_bound(Rat(1, 2), Rat(1, 100)) == Rat(103, 400));

  Report r = f_props_check(16);
  CHECK(r.ok);
  CHECK(r.details["grid"] == 16);
  CHECK_FALSE(r.details.contains("counterexample"));
  CHECK(f_props_check(7).ok);
  CHECK_THROWS_AS(f_props_check(0), Error);
}

TEST_CASE("product mixing stays under f of the factors") {
  RotationGraph x = from_undirected(cycle_graph(5));
  DsquareMixingReport rep = verify_dsquare_mixing(x, complete_with_loops(2));
  CHECK(rep.report.ok);
  CHECK(rep.g.upper == 0.0);
  // complete aux squares the cycle: bound collapses to lambda^2
  CHECK(rep.bound == doctest::Approx(0.6545084971874737).epsilon(1e-8));
  CHECK(rep.product.lower <= rep.bound + 1e-9);
  CHECK(rep.product.upper >= 0.6545084971874735 - 1e-8);

  Prng rng(33);
  for (int t = 0; t < 4; ++t) {
    RotationGraph xr = random_involution_graph(3 + rand_below(rng, 4), 3, rng);
    RotationGraph gr = random_involution_graph(3, 1 + rand_below(rng, 2), rng);
    CHECK(verify_dsquare_mixing(xr, gr).report.ok);
  }
  CHECK_THROWS_AS(verify_dsquare_mixing(x, complete_with_loops(2), 0.0), Error);
}

TEST_CASE("backprop picks the first hop when it already beats lambda") {
  RotationGraph x = from_undirected(cycle_graph(4));
  RotationGraph g = complete_with_loops(2);
  RatVec v{Rat(1), Rat(-1), Rat(1), Rat(-1)};  // parity eigenvector
  BackpropResult res = witness_backprop(x, g, v, Rat(1, 2), Rat(0));
  CHECK(res.branch == 0);
  CHECK(res.u == v);
  CHECK(res.ratio_sq == Rat(1));
}

TEST_CASE("backprop falls through to the second hop") {
  RotationGraph x = from_undirected(cycle_graph(4));
  RotationGraph g = complete_with_loops(2);
  // kernel + parity mix: first-hop Rayleigh 2/3, second-hop 1
  RatVec v{Rat(2), Rat(-1), Rat(0), Rat(-1)};
  BackpropResult res = witness_backprop(x, g, v, Rat(9, 10), Rat(0));
  CHECK(res.branch == 1);
  CHECK(res.u == RatVec{Rat(-1), Rat(1), Rat(-1), Rat(1)});
  CHECK(res.ratio_sq == Rat(1));
  CHECK(res.ratio_sq > Rat(81, 100));
}

TEST_CASE("backprop rejects non-witnesses and bad bounds") {
  RotationGraph x = from_undirected(cycle_graph(4));
  RotationGraph g = complete_with_loops(2);
  RatVec par{Rat(1), Rat(-1), Rat(1), Rat(-1)};
  CHECK_THROWS_WITH_AS(witness_backprop(x, g, {Rat(1), Rat(0), Rat(0), Rat(0)}, Rat(1, 2), Rat(0)),
                       doctest::Contains("NotAWitness"), Error);
  CHECK_THROWS_AS(witness_backprop(x, g, RatVec(4, Rat(0)), Rat(1, 2), Rat(0)), Error);
  // kernel vector: the product flattens it, so nothing to certify
  CHECK_THROWS_WITH_AS(witness_backprop(x, g, {Rat(1), Rat(0), Rat(-1), Rat(0)}, Rat(1, 2), Rat(0)),
                       doctest::Contains("NotAWitness"), Error);
  CHECK_THROWS_WITH_AS(witness_backprop(x, g, par, Rat(2), Rat(0)),
                       doctest::Contains("BadBound"), Error);
  CHECK_THROWS_AS(witness_backprop(x, g, par, Rat(1, 2), Rat(-1)), Error);
  // swap aux has averaging threshold 1, so mu = 1/2 is infeasible
  CHECK_THROWS_WITH_AS(witness_backprop(x, two_vertex_swap(), par, Rat(1, 2), Rat(1, 2)),
                       doctest::Contains("BadBound"), Error);
  CHECK_THROWS_AS(witness_backprop(x, g, RatVec(3, Rat(1)), Rat(1, 2), Rat(0)), Error);
}

TEST_CASE("five step identity on hand-picked and random pairs") {
  RotationGraph x = from_undirected(cycle_graph(4));
  Report uni = five_step_identity_check(x, complete_with_loops(2));
  CHECK(uni.ok);
  CHECK(uni.details["mu"] == "0");

  // swap aux: mu = 1, the whole walk lives in the correction term
  Report swap = five_step_identity_check(x, two_vertex_swap());
  CHECK(swap.ok);
  CHECK(swap.details["mu"] == "1");
  CHECK(swap.details["aux_split_stochastic"] == true);

  Prng rng(34);
  for (int t = 0; t < 6; ++t) {
    std::uint32_t n = 2 + rand_below(rng, 5);
    std::uint32_t k = 2 + rand_below(rng, 3);
    RotationGraph xr = t % 2 ? random_involution_graph(n, k, rng)
                             : random_rotation_graph(n, k, rng);
    RotationGraph gr = random_involution_graph(k, 1 + rand_below(rng, 3), rng);
    Report r = five_step_identity_check(xr, gr);
    INFO("trial ", t, " n=", n, " k=", k);
    CHECK(r.ok);
  }

  CHECK_THROWS_AS(five_step_identity_check(x, complete_with_loops(5)), Error);
}
