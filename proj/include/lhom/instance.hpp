#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "graph.hpp"

namespace lhom {

// List homomorphism instance: g -> h with L(v) a subset of V(h) for every v.
struct ListInstance {
  Graph g;
  Graph h;
  std::vector<VertexSet> lists;
};

inline void validate(const ListInstance& inst) {
  if (static_cast<int>(inst.lists.size()) != inst.g.size())
    throw invalid_input("list count does not match |V(g)|");
  for (const auto& l : inst.lists) {
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (l[i] < 0 || l[i] >= inst.h.size()) throw invalid_input("list value outside V(h)");
      if (i > 0 && l[i] <= l[i - 1]) throw invalid_input("list not sorted or has duplicates");
    }
  }
}

// Full lists V(h) on every vertex.
inline ListInstance with_full_lists(Graph g, Graph h) {
  VertexSet all(h.size());
  for (int i = 0; i < h.size(); ++i) all[i] = i;
  ListInstance inst{std::move(g), std::move(h), {}};
  inst.lists.assign(inst.g.size(), all);
  return inst;
}

inline bool is_list_homomorphism(const ListInstance& inst, const std::vector<int>& f) {
  if (static_cast<int>(f.size()) != inst.g.size()) return false;
  for (int v = 0; v < inst.g.size(); ++v)
    if (!std::binary_search(inst.lists[v].begin(), inst.lists[v].end(), f[v])) return false;
  for (auto [u, v] : inst.g.edges())
    if (!inst.h.has_edge(f[u], f[v])) return false;
  return true;
}

struct DominationEvent {
  int vertex;   // vertex of g (in the component instance)
  int removed;  // value of h removed from its list
};

struct Orientation {
  ListInstance instance;  // g = the component, lists restricted to one orientation
  std::vector<DominationEvent> removed;
  bool trivially_no = false;  // some list became empty
};

struct ComponentReport {
  VertexSet vertices;  // vertices of the original g, index i of the component is vertices[i]
  bool rejected = false;
  std::string reason;
  std::vector<Orientation> orientations;  // satisfiable iff some orientation is
};

// The instance is a YES instance iff every component has a satisfiable
// orientation and no component was rejected.
struct ConsistencyReport {
  std::vector<ComponentReport> components;

  bool rejected() const {
    for (const auto& c : components)
      if (c.rejected) return true;
    return false;
  }
};

// Removes every x in `list` dominated by some other y in `list`
// (N(x) inside N(y)); of two values with equal neighbourhoods the lower index
// goes. Domination is a preorder, so one pass against the original list
// reaches the fixpoint.
inline VertexSet remove_dominated(const Graph& h, const VertexSet& list, int vertex,
                                  std::vector<DominationEvent>* events) {
  VertexSet keep;
  for (int x : list) {
    bool dominated = false;
    for (int y : list) {
      if (y == x || !neighborhood_subset(h, x, y)) continue;
      if (neighborhood_subset(h, y, x) && y < x) continue;  // tie: the lower one goes
      dominated = true;
      break;
    }
    if (dominated) {
      if (events) events->push_back({vertex, x});
    } else {
      keep.push_back(x);
    }
  }
  return keep;
}

// Splits into connected components, 2-colours each component of g and
// produces the two orientations obtained by intersecting lists with the
// classes of h, then removes dominated values. h must be bipartite.
inline ConsistencyReport normalize_consistent(const ListInstance& inst) {
  validate(inst);
  Bipartition hb = bipartition(inst.h);
  ConsistencyReport report;
  for (const VertexSet& comp : connected_components(inst.g)) {
    ComponentReport cr;
    cr.vertices = comp;
    Graph sub = induced_subgraph(inst.g, comp);
    std::optional<Bipartition> gb;
    try {
      gb = bipartition(sub);
    } catch (const not_bipartite&) {
      cr.rejected = true;
      cr.reason = "component of g is not bipartite";
      report.components.push_back(std::move(cr));
      continue;
    }
    for (int orient = 0; orient < 2; ++orient) {
      Orientation o;
      o.instance.g = sub;
      o.instance.h = inst.h;
      for (int i = 0; i < sub.size(); ++i) {
        int want = gb->side[i] ^ orient;
        VertexSet l;
        for (int x : inst.lists[comp[i]])
          if (hb.side[x] == want) l.push_back(x);
        l = remove_dominated(inst.h, l, i, &o.removed);
        if (l.empty()) o.trivially_no = true;
        o.instance.lists.push_back(std::move(l));
      }
      cr.orientations.push_back(std::move(o));
    }
    report.components.push_back(std::move(cr));
  }
  return report;
}

// Binary CSP. Values are positive integers; constraint pairs are allowed pairs.
struct BcspConstraint {
  int u = 0, v = 0;
  std::vector<std::pair<int, int>> allowed;  // (value of u, value of v), sorted
};

struct BcspInstance {
  int n = 0;
  std::vector<std::vector<int>> domains;  // sorted values
  std::vector<BcspConstraint> constraints;
  std::vector<std::string> names;  // optional variable names

  int d_max() const {
    int d = 0;
    for (const auto& dom : domains) d = std::max(d, static_cast<int>(dom.size()));
    return d;
  }

  std::string name(int v) const {
    if (v < static_cast<int>(names.size()) && !names[v].empty()) return names[v];
    return std::to_string(v);
  }
};

// Merges constraints on the same unordered pair by intersecting their allowed
// sets, orients every constraint as u < v, folds u == v into the domain and
// drops pairs outside the domains.
inline void normalize(BcspInstance& b) {
  if (static_cast<int>(b.domains.size()) != b.n) throw invalid_input("domain count does not match n");
  for (auto& d : b.domains) {
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    for (int x : d)
      if (x < 1) throw invalid_input("domain values must be positive");
  }
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> merged;
  std::vector<std::vector<int>> unary(b.n);
  std::vector<char> has_unary(b.n, 0);
  for (auto& c : b.constraints) {
    if (c.u < 0 || c.u >= b.n || c.v < 0 || c.v >= b.n) throw invalid_input("constraint variable out of range");
    std::vector<std::pair<int, int>> pairs = c.allowed;
    if (c.u == c.v) {
      std::vector<int> ok;
      for (auto [a, bb] : pairs)
        if (a == bb) ok.push_back(a);
      std::sort(ok.begin(), ok.end());
      if (has_unary[c.u]) {
        std::vector<int> both;
        std::set_intersection(unary[c.u].begin(), unary[c.u].end(), ok.begin(), ok.end(),
                              std::back_inserter(both));
        unary[c.u] = both;
      } else {
        unary[c.u] = ok;
        has_unary[c.u] = 1;
      }
      continue;
    }
    int u = c.u, v = c.v;
    if (u > v) {
      std::swap(u, v);
      for (auto& p : pairs) std::swap(p.first, p.second);
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    auto key = std::make_pair(u, v);
    auto it = merged.find(key);
    if (it == merged.end()) {
      merged.emplace(key, std::move(pairs));
    } else {
      std::vector<std::pair<int, int>> both;
      std::set_intersection(it->second.begin(), it->second.end(), pairs.begin(), pairs.end(),
                            std::back_inserter(both));
      it->second = std::move(both);
    }
  }
  for (int v = 0; v < b.n; ++v) {
    if (!has_unary[v]) continue;
    std::vector<int> both;
    std::set_intersection(b.domains[v].begin(), b.domains[v].end(), unary[v].begin(), unary[v].end(),
                          std::back_inserter(both));
    b.domains[v] = both;
  }
  b.constraints.clear();
  for (auto& [key, pairs] : merged) {
    BcspConstraint c{key.first, key.second, {}};
    const auto& du = b.domains[key.first];
    const auto& dv = b.domains[key.second];
    for (auto p : pairs)
      if (std::binary_search(du.begin(), du.end(), p.first) &&
          std::binary_search(dv.begin(), dv.end(), p.second))
        c.allowed.push_back(p);
    b.constraints.push_back(std::move(c));
  }
}

inline Graph primal_graph(const BcspInstance& b) {
  Graph g(b.n);
  for (int v = 0; v < b.n; ++v) g.set_label(v, b.name(v));
  for (const auto& c : b.constraints)
    if (c.u != c.v) g.add_edge(c.u, c.v);
  return g;
}

inline bool satisfies(const BcspInstance& b, const std::vector<int>& a) {
  if (static_cast<int>(a.size()) != b.n) return false;
  for (int v = 0; v < b.n; ++v)
    if (!std::binary_search(b.domains[v].begin(), b.domains[v].end(), a[v])) return false;
  for (const auto& c : b.constraints)
    if (!std::binary_search(c.allowed.begin(), c.allowed.end(), std::make_pair(a[c.u], a[c.v])))
      return false;
  return true;
}

// Values are h-vertex index + 1. A loop at v in g restricts D_v to looped
// vertices of h; every other edge becomes one constraint.
inline BcspInstance lhom_to_bcsp(const ListInstance& inst) {
  validate(inst);
  BcspInstance b;
  b.n = inst.g.size();
  for (int v = 0; v < b.n; ++v) {
    b.names.push_back(inst.g.label(v));
    std::vector<int> d;
    for (int x : inst.lists[v])
      if (!inst.g.has_loop(v) || inst.h.has_loop(x)) d.push_back(x + 1);
    b.domains.push_back(std::move(d));
  }
  for (auto [u, v] : inst.g.edges()) {
    if (u == v) continue;
    BcspConstraint c{u, v, {}};
    for (int a : b.domains[u])
      for (int w : inst.h.neighbors(a - 1))
        if (std::binary_search(b.domains[v].begin(), b.domains[v].end(), w + 1))
          c.allowed.emplace_back(a, w + 1);
    std::sort(c.allowed.begin(), c.allowed.end());
    b.constraints.push_back(std::move(c));
  }
  return b;
}

// For constraint c and direction dir, slices[c][dir] maps every value `a` of
// the "source" variable (u when dir == 0, v when dir == 1) to the K values of
// the other variable that are forbidden together with it, in ascending order,
// padded with 0.
struct ConstraintSlices {
  int k = 0;
  std::vector<std::array<std::map<int, std::vector<int>>, 2>> slices;
};

inline ConstraintSlices compute_k_and_slices(const BcspInstance& b) {
  ConstraintSlices out;
  out.slices.resize(b.constraints.size());
  std::vector<std::array<std::map<int, std::vector<int>>, 2>> forb(b.constraints.size());
  for (std::size_t ci = 0; ci < b.constraints.size(); ++ci) {
    const auto& c = b.constraints[ci];
    for (int dir = 0; dir < 2; ++dir) {
      const auto& src = b.domains[dir == 0 ? c.u : c.v];
      const auto& dst = b.domains[dir == 0 ? c.v : c.u];
      for (int a : src) {
        std::vector<int> bad;
        for (int w : dst) {
          auto p = dir == 0 ? std::make_pair(a, w) : std::make_pair(w, a);
          if (!std::binary_search(c.allowed.begin(), c.allowed.end(), p)) bad.push_back(w);
        }
        out.k = std::max(out.k, static_cast<int>(bad.size()));
        forb[ci][dir][a] = std::move(bad);
      }
    }
  }
  for (std::size_t ci = 0; ci < b.constraints.size(); ++ci)
    for (int dir = 0; dir < 2; ++dir)
      for (auto& [a, bad] : forb[ci][dir]) {
        bad.resize(out.k, 0);
        out.slices[ci][dir][a] = bad;
      }
  return out;
}

// Rebuilds allowed pairs of constraint ci from its slices.
inline std::vector<std::pair<int, int>> allowed_from_slices(const BcspInstance& b,
                                                            const ConstraintSlices& s,
                                                            std::size_t ci, int dir) {
  const auto& c = b.constraints[ci];
  const auto& src = b.domains[dir == 0 ? c.u : c.v];
  const auto& dst = b.domains[dir == 0 ? c.v : c.u];
  std::vector<std::pair<int, int>> out;
  for (int a : src) {
    const auto& bad = s.slices[ci][dir].at(a);
    for (int w : dst) {
      if (std::find(bad.begin(), bad.end(), w) != bad.end()) continue;
      out.push_back(dir == 0 ? std::make_pair(a, w) : std::make_pair(w, a));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct invalid_cover : lhom_error {
  int condition;  // 1..4
  explicit invalid_cover(int cond, const std::string& what)
      : lhom_error("cover condition " + std::to_string(cond) + " violated: " + what), condition(cond) {}
};

// DP-colouring cover (h, lists) of g; lists[v] are the fibres.
// Conditions: (1) fibres partition V(h); (2) every fibre is a clique;
// (3) edges between fibres of adjacent vertices form a matching;
// (4) no edges between fibres of non-adjacent vertices.
inline void validate_cover(const Graph& g, const Graph& h, const std::vector<VertexSet>& lists) {
  if (static_cast<int>(lists.size()) != g.size()) throw invalid_input("fibre count does not match |V(g)|");
  std::vector<int> owner(h.size(), -1);
  for (int v = 0; v < g.size(); ++v)
    for (int x : lists[v]) {
      if (x < 0 || x >= h.size()) throw invalid_input("fibre value outside V(h)");
      if (owner[x] != -1) throw invalid_cover(1, h.label(x) + " lies in two fibres");
      owner[x] = v;
    }
  for (int x = 0; x < h.size(); ++x)
    if (owner[x] == -1) throw invalid_cover(1, h.label(x) + " lies in no fibre");
  for (int v = 0; v < g.size(); ++v)
    for (std::size_t i = 0; i < lists[v].size(); ++i)
      for (std::size_t j = i + 1; j < lists[v].size(); ++j)
        if (!h.has_edge(lists[v][i], lists[v][j]))
          throw invalid_cover(2, "fibre of " + g.label(v) + " is not a clique");
  std::map<std::pair<int, int>, int> seen;  // (x, fibre of neighbour) -> count
  for (int x = 0; x < h.size(); ++x)
    for (int y : h.neighbors(x)) {
      int u = owner[x], v = owner[y];
      if (u == v) continue;
      if (!g.has_edge(u, v))
        throw invalid_cover(4, "edge " + h.label(x) + h.label(y) + " between fibres of non-adjacent vertices");
      if (++seen[{x, v}] > 1)
        throw invalid_cover(3, h.label(x) + " has two neighbours in the fibre of " + g.label(v));
    }
}

// Allowed pairs are the non-adjacent pairs; values are h index + 1.
inline BcspInstance dp_cover_to_bcsp(const Graph& g, const Graph& h, const std::vector<VertexSet>& lists) {
  validate_cover(g, h, lists);
  BcspInstance b;
  b.n = g.size();
  for (int v = 0; v < g.size(); ++v) {
    b.names.push_back(g.label(v));
    std::vector<int> d;
    for (int x : lists[v]) d.push_back(x + 1);
    std::sort(d.begin(), d.end());
    b.domains.push_back(std::move(d));
  }
  for (auto [u, v] : g.edges()) {
    if (u == v) continue;
    BcspConstraint c{u, v, {}};
    for (int a : b.domains[u])
      for (int w : b.domains[v])
        if (!h.has_edge(a - 1, w - 1)) c.allowed.emplace_back(a, w);
    b.constraints.push_back(std::move(c));
  }
  return b;
}

// Looped clique P plus independent set B. Dominated values are removed,
// vertices are split into P' (lists in P) and B' (lists in B), and the
// instance becomes one into the bipartite graph h minus the edges inside P.
struct StrongSplitResult {
  std::optional<ListInstance> instance;  // empty: immediate NO
  std::string reason;
  VertexSet p, b;  // partition of V(h)
};

inline StrongSplitResult strong_split_transform(const ListInstance& inst) {
  validate(inst);
  StrongSplitResult r;
  const Graph& h = inst.h;
  for (int x = 0; x < h.size(); ++x) (h.has_loop(x) ? r.p : r.b).push_back(x);
  for (std::size_t i = 0; i < r.p.size(); ++i)
    for (std::size_t j = i + 1; j < r.p.size(); ++j)
      if (!h.has_edge(r.p[i], r.p[j])) throw precondition_violated("looped vertices of h do not form a clique");
  for (std::size_t i = 0; i < r.b.size(); ++i)
    for (std::size_t j = i + 1; j < r.b.size(); ++j)
      if (h.has_edge(r.b[i], r.b[j])) throw precondition_violated("unlooped vertices of h are not independent");

  std::vector<char> in_p(h.size(), 0);
  for (int x : r.p) in_p[x] = 1;
  ListInstance out;
  out.g = inst.g;
  out.h = h;
  std::vector<int> kind(inst.g.size());  // 1: P', 0: B'
  for (int v = 0; v < inst.g.size(); ++v) {
    VertexSet l = remove_dominated(h, inst.lists[v], v, nullptr);
    if (l.empty()) {
      r.reason = "empty list at " + inst.g.label(v);
      return r;
    }
    bool any_p = false, any_b = false;
    for (int x : l) (in_p[x] ? any_p : any_b) = true;
    if (any_p && any_b) throw lhom_error("list mixes P and B after removing dominated values");
    kind[v] = any_p ? 1 : 0;
    out.lists.push_back(std::move(l));
  }
  for (auto [u, v] : inst.g.edges())
    if (kind[u] == 0 && kind[v] == 0) {
      r.reason = "B' is not independent";
      return r;
    }
  for (auto [u, v] : inst.g.edges())
    if (kind[u] == 1 && kind[v] == 1) out.g.remove_edge(u, v);
  for (std::size_t i = 0; i < r.p.size(); ++i)
    for (std::size_t j = i; j < r.p.size(); ++j) out.h.remove_edge(r.p[i], r.p[j]);
  r.instance = std::move(out);
  return r;
}

}  // namespace lhom
