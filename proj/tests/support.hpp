#pragma once

// Independent oracles and generators shared by the test binaries. Nothing
// here calls into the solvers under test.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "lhom/graph.hpp"
#include "lhom/instance.hpp"

namespace lhom::testing {

// Plain enumeration of all assignments.
inline std::optional<std::vector<int>> naive_solve(const BcspInstance& b) {
  std::vector<int> idx(b.n, 0);
  for (const auto& d : b.domains)
    if (d.empty()) return std::nullopt;
  while (true) {
    std::vector<int> a(b.n);
    for (int v = 0; v < b.n; ++v) a[v] = b.domains[v][idx[v]];
    bool ok = true;
    for (const auto& c : b.constraints) {
      bool found = false;
      for (auto p : c.allowed)
        if (p.first == a[c.u] && p.second == a[c.v]) found = true;
      if (!found) {
        ok = false;
        break;
      }
    }
    if (ok) return a;
    int v = 0;
    while (v < b.n && ++idx[v] == static_cast<int>(b.domains[v].size())) idx[v++] = 0;
    if (v == b.n) return std::nullopt;
  }
}

// Enumeration of all maps g -> h respecting lists.
inline bool naive_lhom(const ListInstance& inst) {
  const int n = inst.g.size();
  for (const auto& l : inst.lists)
    if (l.empty()) return false;
  std::vector<int> idx(n, 0);
  while (true) {
    bool ok = true;
    for (int u = 0; u < n && ok; ++u)
      for (int w : inst.g.neighbors(u))
        if (!inst.h.has_edge(inst.lists[u][idx[u]], inst.lists[w][idx[w]])) {
          ok = false;
          break;
        }
    if (ok) return true;
    int v = 0;
    while (v < n && ++idx[v] == static_cast<int>(inst.lists[v].size())) idx[v++] = 0;
    if (v == n) return false;
  }
}

inline Graph random_graph(std::mt19937_64& rng, int n, double p) {
  Graph g(n);
  std::bernoulli_distribution coin(p);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(rng)) g.add_edge(u, v);
  return g;
}

inline Graph random_connected_graph(std::mt19937_64& rng, int n, double p) {
  while (true) {
    Graph g = random_graph(rng, n, p);
    if (is_connected(g)) return g;
  }
}

// Random BCSP: domains are random subsets of 1..d_max, each pair becomes a
// constraint with probability `density`, pairs allowed with probability
// `tightness`.
inline BcspInstance random_bcsp(std::mt19937_64& rng, int n, int d_max, double density, double tightness) {
  BcspInstance b;
  b.n = n;
  std::uniform_int_distribution<int> size(1, d_max);
  for (int v = 0; v < n; ++v) {
    std::vector<int> all(d_max);
    std::iota(all.begin(), all.end(), 1);
    std::shuffle(all.begin(), all.end(), rng);
    all.resize(size(rng));
    std::sort(all.begin(), all.end());
    b.domains.push_back(all);
  }
  std::bernoulli_distribution edge(density), allow(tightness);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      if (!edge(rng)) continue;
      BcspConstraint c{u, v, {}};
      for (int a : b.domains[u])
        for (int w : b.domains[v])
          if (allow(rng)) c.allowed.emplace_back(a, w);
      b.constraints.push_back(c);
    }
  return b;
}

// Brute-force isomorphism test for small graphs (at most 10 vertices).
inline bool isomorphic(const Graph& a, const Graph& b) {
  if (a.size() != b.size() || a.num_edges() != b.num_edges()) return false;
  const int n = a.size();
  std::vector<int> da, db;
  for (int v = 0; v < n; ++v) {
    da.push_back(a.degree(v));
    db.push_back(b.degree(v));
  }
  std::sort(da.begin(), da.end());
  std::sort(db.begin(), db.end());
  if (da != db) return false;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (auto [u, v] : a.edges())
      if (!b.has_edge(perm[u], perm[v])) {
        ok = false;
        break;
      }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// Minimum FVS by subset enumeration.
inline int naive_fvs_size(const Graph& g) {
  const int n = g.size();
  int best = n;
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    int k = std::popcount(s);
    if (k >= best) continue;
    VertexSet rem;
    for (int v = 0; v < n; ++v)
      if (s >> v & 1) rem.push_back(v);
    if (is_forest_without(g, rem)) best = k;
  }
  return best;
}

// Minimum cutwidth over all permutations.
inline int naive_cutwidth(const Graph& g) {
  std::vector<int> perm(g.size());
  std::iota(perm.begin(), perm.end(), 0);
  int best = 1 << 30;
  do {
    std::vector<int> pos(g.size());
    for (int i = 0; i < g.size(); ++i) pos[perm[i]] = i;
    int w = 0;
    for (int i = 0; i + 1 < g.size(); ++i) {
      int c = 0;
      for (auto [u, v] : g.edges())
        if (u != v && std::min(pos[u], pos[v]) <= i && std::max(pos[u], pos[v]) > i) ++c;
      w = std::max(w, c);
    }
    best = std::min(best, w);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline int index_of(const Graph& g, const std::string& label) {
  auto v = g.find(label);
  if (!v) throw std::runtime_error("no vertex " + label);
  return *v;
}

}  // namespace lhom::testing
