#include "dsq/rotation_graph.hpp"

#include <algorithm>
#include <numeric>

#include "dsq/error.hpp"

namespace dsq {

std::uint32_t RotationGraph::self_loops(std::uint32_t v) const {
  std::uint32_t c = 0;
  for (std::uint32_t i = 0; i < d; ++i) {
    RotStep s = rot(v, i);
    if (s.vertex == v && s.label == i) ++c;
  }
  return c;
}

std::vector<std::uint32_t> UndirectedGraph::degrees() const {
  std::vector<std::uint32_t> deg(n, 0);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw Error("BadShape", "edge endpoint out of range");
    if (u == v) {
      deg[u] += 1;  // a loop is a single incident edge
    } else {
      deg[u] += 1;
      deg[v] += 1;
    }
  }
  return deg;
}

ValidationReport validate(const RotationGraph& g, std::uint64_t max_slots) {
  ValidationReport r;
  auto bad = [&r](std::string code, std::string detail) {
    r.ok = false;
    r.issues.push_back({std::move(code), std::move(detail)});
  };
  if (g.n == 0 || g.d == 0) {
    bad("BadShape", "n and d must be positive");
    return r;
  }
  std::uint64_t slots = std::uint64_t(g.n) * g.d;
  if (slots > max_slots) bad("SlotBound", "n*d = " + std::to_string(slots) + " exceeds bound");
  if (g.to.size() != slots || g.in_label.size() != slots) {
    bad("BadShape", "rotation tables must have n*d entries");
    return r;
  }
  std::vector<char> seen(slots, 0);
  for (std::uint32_t v = 0; v < g.n && r.issues.size() < 32; ++v) {
    for (std::uint32_t i = 0; i < g.d; ++i) {
      RotStep s = g.rot(v, i);
      if (s.vertex >= g.n || s.label >= g.d) {
        bad("BadShape", "rot(" + std::to_string(v) + "," + std::to_string(i) + ") out of range");
        continue;
      }
      std::size_t t = g.slot(s.vertex, s.label);
      if (seen[t]) {
        bad("DuplicateInLabel", "vertex " + std::to_string(s.vertex) + " receives label " +
                                    std::to_string(s.label) + " more than once");
      }
      seen[t] = 1;
    }
  }
  if (r.ok) {
    for (std::size_t t = 0; t < slots; ++t) {
      if (!seen[t]) {
        bad("MissingInLabel", "vertex " + std::to_string(t / g.d) + " never receives label " +
                                  std::to_string(t % g.d));
        break;
      }
    }
  }
  if (r.ok && g.undirected) {
    for (std::uint32_t v = 0; v < g.n; ++v) {
      for (std::uint32_t i = 0; i < g.d; ++i) {
        RotStep s = g.rot(v, i);
        RotStep back = g.rot(s.vertex, s.label);
        if (back.vertex != v || back.label != i) {
          bad("NotInvolution", "edge (" + std::to_string(v) + "," + std::to_string(i) +
                                   ") is not paired with its reverse");
          v = g.n;
          break;
        }
      }
    }
  }
  return r;
}

RotationGraph from_undirected(const UndirectedGraph& g) {
  if (g.n == 0) throw Error("BadShape", "empty graph");
  auto deg = g.degrees();
  std::uint32_t d = deg[0];
  for (std::uint32_t v = 0; v < g.n; ++v) {
    if (deg[v] != d)
      throw Error("NotRegular", "vertex " + std::to_string(v) + " has degree " +
                                    std::to_string(deg[v]) + ", expected " + std::to_string(d));
  }
  if (d == 0) throw Error("NotRegular", "degree must be at least 1");

  // Incident slots per vertex: (neighbor, edge id), sorted by neighbor with
  // input order breaking ties among parallel copies.
  struct Slot {
    std::uint32_t nb;
    std::size_t edge;
    bool second;  // this slot is the v-side of edge (u,v) with u != v
  };
  std::vector<std::vector<Slot>> inc(g.n);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto [u, v] = g.edges[e];
    if (u == v) {
      inc[u].push_back({u, e, false});
    } else {
      inc[u].push_back({v, e, false});
      inc[v].push_back({u, e, true});
    }
  }
  for (auto& lst : inc)
    std::stable_sort(lst.begin(), lst.end(),
                     [](const Slot& a, const Slot& b) { return a.nb < b.nb; });

  // Label of each edge endpoint = its position in the sorted incident list.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> first_label(g.edges.size(), {0, 0});
  std::vector<std::pair<std::uint32_t, std::uint32_t>> second_label(g.edges.size(), {0, 0});
  std::vector<char> has_first(g.edges.size(), 0);
  for (std::uint32_t v = 0; v < g.n; ++v) {
    for (std::uint32_t i = 0; i < inc[v].size(); ++i) {
      const Slot& s = inc[v][i];
      if (s.second)
        second_label[s.edge] = {v, i};
      else {
        first_label[s.edge] = {v, i};
        has_first[s.edge] = 1;
      }
    }
  }

  RotationGraph out;
  out.n = g.n;
  out.d = d;
  out.undirected = true;
  out.to.assign(std::size_t(g.n) * d, 0);
  out.in_label.assign(std::size_t(g.n) * d, 0);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    auto [u, v] = g.edges[e];
    auto [a, ia] = first_label[e];
    (void)has_first;
    if (u == v) {
      out.to[out.slot(a, ia)] = a;
      out.in_label[out.slot(a, ia)] = ia;
    } else {
      auto [b, ib] = second_label[e];
      out.to[out.slot(a, ia)] = b;
      out.in_label[out.slot(a, ia)] = ib;
      out.to[out.slot(b, ib)] = a;
      out.in_label[out.slot(b, ib)] = ia;
    }
  }
  return out;
}

RotationGraph add_self_loops(const RotationGraph& g, std::uint32_t k) {
  RotationGraph out;
  out.n = g.n;
  out.d = g.d + k;
  out.undirected = g.undirected;
  out.to.assign(std::size_t(out.n) * out.d, 0);
  out.in_label.assign(std::size_t(out.n) * out.d, 0);
  for (std::uint32_t v = 0; v < g.n; ++v) {
    for (std::uint32_t i = 0; i < g.d; ++i) {
      RotStep s = g.rot(v, i);
      out.to[out.slot(v, i)] = s.vertex;
      out.in_label[out.slot(v, i)] = s.label;
    }
    for (std::uint32_t t = 0; t < k; ++t) {
      out.to[out.slot(v, g.d + t)] = v;
      out.in_label[out.slot(v, g.d + t)] = g.d + t;
    }
  }
  return out;
}

RotationGraph power(const RotationGraph& g, std::uint32_t k, std::uint64_t max_slots) {
  if (k == 0) throw Error("BadShape", "power exponent must be at least 1");
  std::uint64_t dk = 1;
  for (std::uint32_t t = 0; t < k; ++t) {
    dk *= g.d;
    if (dk * g.n > max_slots)
      throw Error("DegreeOverflow", "d^k exceeds the materialization bound");
  }
  RotationGraph out;
  out.n = g.n;
  out.d = static_cast<std::uint32_t>(dk);
  out.undirected = g.undirected;
  out.to.assign(std::size_t(out.n) * out.d, 0);
  out.in_label.assign(std::size_t(out.n) * out.d, 0);
  for (std::uint32_t v = 0; v < g.n; ++v) {
    for (std::uint64_t lab = 0; lab < dk; ++lab) {
      std::uint32_t cur = v;
      std::uint64_t rest = lab;
      std::uint64_t back = 0;
      for (std::uint32_t t = 0; t < k; ++t) {
        RotStep s = g.rot(cur, static_cast<std::uint32_t>(rest % g.d));
        rest /= g.d;
        cur = s.vertex;
        // reversed tuple: step t's arrival label lands in digit k-1-t
        back = back * g.d + s.label;
      }
      out.to[out.slot(v, static_cast<std::uint32_t>(lab))] = cur;
      out.in_label[out.slot(v, static_cast<std::uint32_t>(lab))] =
          static_cast<std::uint32_t>(back);
    }
  }
  return out;
}

RatMat to_adjacency(const RotationGraph& g) {
  RatMat m(g.n, g.n);
  Rat step(1, g.d);
  for (std::uint32_t v = 0; v < g.n; ++v)
    for (std::uint32_t i = 0; i < g.d; ++i) m.at(g.out(v, i), v) += step;
  return m;
}

std::vector<std::vector<std::uint32_t>> adjacency_counts(const RotationGraph& g) {
  std::vector<std::vector<std::uint32_t>> c(g.n, std::vector<std::uint32_t>(g.n, 0));
  for (std::uint32_t v = 0; v < g.n; ++v)
    for (std::uint32_t i = 0; i < g.d; ++i) c[g.out(v, i)][v] += 1;
  return c;
}

RotationGraph complete_with_loops(std::uint32_t n) {
  RotationGraph g;
  g.n = n;
  g.d = n;
  g.undirected = true;
  g.to.assign(std::size_t(n) * n, 0);
  g.in_label.assign(std::size_t(n) * n, 0);
  for (std::uint32_t v = 0; v < n; ++v)
    for (std::uint32_t i = 0; i < n; ++i) {
      g.to[g.slot(v, i)] = i;
      g.in_label[g.slot(v, i)] = v;
    }
  return g;
}

UndirectedGraph cycle_graph(std::uint32_t n) {
  UndirectedGraph g;
  g.n = n;
  for (std::uint32_t v = 0; v < n; ++v) g.edges.push_back({v, (v + 1) % n});
  return g;
}

UndirectedGraph complete_graph(std::uint32_t n) {
  UndirectedGraph g;
  g.n = n;
  for (std::uint32_t u = 0; u < n; ++u)
    for (std::uint32_t v = u + 1; v < n; ++v) g.edges.push_back({u, v});
  return g;
}

UndirectedGraph path_graph(std::uint32_t n) {
  UndirectedGraph g;
  g.n = n;
  for (std::uint32_t v = 0; v + 1 < n; ++v) g.edges.push_back({v, v + 1});
  return g;
}

RotationGraph random_rotation_graph(std::uint32_t n, std::uint32_t d, Prng& rng) {
  std::size_t slots = std::size_t(n) * d;
  std::vector<std::uint32_t> perm(slots);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = slots; i > 1; --i) std::swap(perm[i - 1], perm[rand_below(rng, i)]);
  RotationGraph g;
  g.n = n;
  g.d = d;
  g.to.resize(slots);
  g.in_label.resize(slots);
  for (std::size_t s = 0; s < slots; ++s) {
    g.to[s] = perm[s] / d;
    g.in_label[s] = perm[s] % d;
  }
  return g;
}

RotationGraph random_involution_graph(std::uint32_t n, std::uint32_t d, Prng& rng,
                                      bool allow_loops) {
  std::size_t slots = std::size_t(n) * d;
  if (!allow_loops && slots % 2 != 0)
    throw Error("BadShape", "odd slot count cannot avoid loops");
  std::vector<std::uint32_t> pair(slots);
  std::vector<std::uint32_t> pool(slots);
  std::iota(pool.begin(), pool.end(), 0);
  // Repeatedly match the first unmatched slot with a random other; a slot
  // matched to itself or to a slot of the same vertex is a loop.
  while (!pool.empty()) {
    std::uint32_t a = pool.front();
    std::size_t pick;
    if (allow_loops) {
      pick = rand_below(rng, pool.size());
    } else {
      bool feasible = false;
      for (std::size_t t = 1; t < pool.size(); ++t)
        if (pool[t] / d != a / d) { feasible = true; break; }
      if (!feasible) throw Error("BadShape", "cannot complete a loop-free matching");
      do {
        pick = 1 + rand_below(rng, pool.size() - 1);
      } while (pool[pick] / d == a / d);
    }
    std::uint32_t b = pool[pick];
    pair[a] = b;
    pair[b] = a;
    if (pick != 0) {
      pool[pick] = pool.back();
      pool.pop_back();
    }
    pool.front() = pool.back();
    pool.pop_back();
  }
  RotationGraph g;
  g.n = n;
  g.d = d;
  g.undirected = true;
  g.to.resize(slots);
  g.in_label.resize(slots);
  for (std::size_t s = 0; s < slots; ++s) {
    g.to[s] = pair[s] / d;
    g.in_label[s] = pair[s] % d;
  }
  return g;
}

UndirectedGraph random_regular_with_loops(std::uint32_t n, std::uint32_t d,
                                          std::uint32_t loops_per_vertex, Prng& rng) {
  if (loops_per_vertex > d) throw Error("BadShape", "more loops than degree");
  std::uint32_t rest = d - loops_per_vertex;
  if (rest % 2 == 1 && n % 2 == 1)
    throw Error("BadShape", "odd non-loop degree needs an even vertex count");
  UndirectedGraph g;
  g.n = n;
  for (std::uint32_t v = 0; v < n; ++v)
    for (std::uint32_t t = 0; t < loops_per_vertex; ++t) g.edges.push_back({v, v});
  auto random_perm = [&](bool fixed_point_free) {
    std::vector<std::uint32_t> p(n);
    std::iota(p.begin(), p.end(), 0);
    for (;;) {
      for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rand_below(rng, i)]);
      if (!fixed_point_free) return p;
      bool ok = true;
      for (std::uint32_t v = 0; v < n; ++v)
        if (p[v] == v) { ok = false; break; }
      if (ok) return p;
    }
  };
  // Each fixed-point-free permutation round adds degree 2 everywhere
  // (every vertex appears once on each side).
  for (std::uint32_t r = 0; r < rest / 2; ++r) {
    auto p = random_perm(true);
    for (std::uint32_t v = 0; v < n; ++v) g.edges.push_back({v, p[v]});
  }
  if (rest % 2 == 1) {
    // one perfect matching round for the leftover unit of degree
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rand_below(rng, i)]);
    for (std::uint32_t i = 0; i + 1 < n; i += 2) g.edges.push_back({order[i], order[i + 1]});
  }
  return g;
}

}  // namespace dsq
