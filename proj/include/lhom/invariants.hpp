#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "graph.hpp"

namespace lhom {

namespace detail {

// Bitmask view of a bipartite graph with at most 64 vertices.
struct BipView {
  int n = 0;
  std::vector<std::uint64_t> nb;
  std::uint64_t cls[2] = {0, 0};
  std::vector<int> side;

  explicit BipView(const Graph& h) {
    if (h.size() > 64) throw size_cap_exceeded("invariants support at most 64 vertices");
    n = h.size();
    Bipartition b = bipartition(h);
    side = b.side;
    for (int v = 0; v < n; ++v) {
      nb.push_back(h.neighbor_mask(v));
      cls[side[v]] |= std::uint64_t{1} << v;
    }
  }

  bool subset_nb(int u, int v) const { return (nb[u] & ~nb[v]) == 0; }
  bool incomparable(int u, int v) const { return !subset_nb(u, v) && !subset_nb(v, u); }
};

inline std::uint64_t bit(int v) { return std::uint64_t{1} << v; }

}  // namespace detail

struct BipartiteDecomposition {
  VertexSet d, n, r;
};

// Searches for (D, N, R): N a non-empty biclique separating D from R,
// |D & X| >= 2 or |D & Y| >= 2, D & X complete to N & Y and D & Y complete to
// N & X. For a fixed N the best D is the union of all components of H - N
// that satisfy the completeness condition.
inline std::optional<BipartiteDecomposition> find_bipartite_decomposition(const Graph& h) {
  detail::BipView b(h);
  const std::uint64_t all = b.cls[0] | b.cls[1];
  std::optional<BipartiteDecomposition> found;
  auto try_n = [&](std::uint64_t nset) {
    std::uint64_t nx = nset & b.cls[0], ny = nset & b.cls[1];
    std::uint64_t rest = all & ~nset, d = 0, seen = 0;
    for (std::uint64_t r = rest; r; r &= r - 1) {
      int s = lowbit(r);
      if (seen & detail::bit(s)) continue;
      std::uint64_t comp = detail::bit(s), frontier = comp;
      while (frontier) {
        int v = lowbit(frontier);
        frontier &= frontier - 1;
        std::uint64_t add = b.nb[v] & rest & ~comp;
        comp |= add;
        frontier |= add;
      }
      seen |= comp;
      bool ok = true;
      for (std::uint64_t m = comp; m && ok; m &= m - 1) {
        int v = lowbit(m);
        std::uint64_t need = b.side[v] == 0 ? ny : nx;
        ok = (b.nb[v] & need) == need;
      }
      if (ok) d |= comp;
    }
    if (popcount64(d & b.cls[0]) >= 2 || popcount64(d & b.cls[1]) >= 2) {
      found = BipartiteDecomposition{mask_to_vector(d), mask_to_vector(nset), mask_to_vector(rest & ~d)};
      return true;
    }
    return false;
  };
  // N = A + B with A in X and B inside the common neighbourhood of A.
  std::vector<int> xs = mask_to_vector(b.cls[0]);
  const std::size_t nx = xs.size();
  if (nx > 30) throw size_cap_exceeded("decomposition search supports at most 30 vertices per class");
  for (std::uint64_t am = 0; am < (std::uint64_t{1} << nx); ++am) {
    std::uint64_t a = 0, common = b.cls[1];
    for (std::size_t i = 0; i < nx; ++i)
      if (am >> i & 1) {
        a |= detail::bit(xs[i]);
        common &= b.nb[xs[i]];
      }
    // Enumerate subsets of `common`.
    std::uint64_t sub = common;
    while (true) {
      if ((a | sub) != 0 && try_n(a | sub)) return found;
      if (sub == 0) break;
      sub = (sub - 1) & common;
    }
  }
  return std::nullopt;
}

inline bool is_undecomposable(const Graph& h) { return !find_bipartite_decomposition(h).has_value(); }

// Checks the conditions of a decomposition directly.
inline bool verify_decomposition(const Graph& h, const BipartiteDecomposition& dec) {
  detail::BipView b(h);
  std::uint64_t d = vector_to_mask(dec.d), n = vector_to_mask(dec.n), r = vector_to_mask(dec.r);
  std::uint64_t all = b.cls[0] | b.cls[1];
  if ((d & n) || (d & r) || (n & r) || (d | n | r) != all || n == 0) return false;
  for (std::uint64_t m = d; m; m &= m - 1)
    if (b.nb[lowbit(m)] & r) return false;
  if (popcount64(d & b.cls[0]) < 2 && popcount64(d & b.cls[1]) < 2) return false;
  auto complete = [&](std::uint64_t p, std::uint64_t q) {
    for (std::uint64_t m = p; m; m &= m - 1)
      if ((b.nb[lowbit(m)] & q) != q) return false;
    return true;
  };
  return complete(n & b.cls[0], n & b.cls[1]) && complete(d & b.cls[0], n & b.cls[1]) &&
         complete(d & b.cls[1], n & b.cls[0]);
}

enum class Tri { yes, no, unknown };

inline const char* to_string(Tri t) { return t == Tri::yes ? "yes" : t == Tri::no ? "no" : "unknown"; }

struct CircularArcResult {
  Tri answer = Tri::unknown;
  VertexSet induced_cycle;  // witness for "no" when found
  // Witness for "yes": min orderings of the two classes.
  std::vector<int> order_x, order_y;
  std::string note;
};

// Induced cycle of length at least min_len, found by extending induced paths.
inline VertexSet find_long_induced_cycle(const Graph& h, int min_len) {
  const int n = h.size();
  std::vector<int> path;
  std::vector<char> on(n, 0);
  VertexSet out;
  std::function<bool(int)> extend = [&](int s) -> bool {
    int last = path.back();
    for (int w : h.neighbors(last)) {
      if (w <= s || on[w]) continue;
      bool chord = false, closes = false;
      for (std::size_t i = 0; i + 1 < path.size(); ++i)
        if (h.has_edge(w, path[i])) {
          if (i == 0) closes = true;
          else chord = true;
        }
      if (chord) continue;
      if (closes) {
        if (static_cast<int>(path.size()) + 1 >= min_len && path.size() >= 2) {
          out = path;
          out.push_back(w);
          return true;
        }
        continue;
      }
      path.push_back(w);
      on[w] = 1;
      if (extend(s)) return true;
      on[w] = 0;
      path.pop_back();
    }
    return false;
  };
  for (int s = 0; s < n; ++s) {
    path = {s};
    on.assign(n, 0);
    on[s] = 1;
    if (extend(s)) return out;
  }
  return {};
}

namespace detail {

// Searches for orders of both classes such that x < x', y < y', xy' and x'y
// edges imply xy is an edge. Decisions on same-class pairs are closed under
// transitivity; every forbidden pattern turns into an implication between an
// X pair and a Y pair.
class MinOrderingSearch {
 public:
  explicit MinOrderingSearch(const Graph& h) : n_(h.size()) {
    if (n_ > 32) throw size_cap_exceeded("min ordering search supports at most 32 vertices");
    Bipartition bp = bipartition(h);
    side_ = bp.side;
    imp_.assign(n_ * n_, {});
    for (int x = 0; x < n_; ++x)
      for (int x2 = 0; x2 < n_; ++x2) {
        if (x == x2 || side_[x] != side_[x2]) continue;
        for (int y = 0; y < n_; ++y)
          for (int y2 = 0; y2 < n_; ++y2) {
            if (y == y2 || side_[y] == side_[x] || side_[y2] == side_[x]) continue;
            // x < x' and y < y' is forbidden, so x < x' forces y' < y.
            if (h.has_edge(x, y2) && h.has_edge(x2, y) && !h.has_edge(x, y)) imp_[x * n_ + x2].push_back({y2, y});
          }
      }
    before_.assign(n_, 0);
  }

  bool run() { return rec(); }

  // Vertices of one class in increasing order.
  std::vector<int> order_of(int cls) const {
    std::vector<int> vs;
    for (int v = 0; v < n_; ++v)
      if (side_[v] == cls) vs.push_back(v);
    std::sort(vs.begin(), vs.end(), [&](int u, int v) { return before_[u] >> v & 1; });
    return vs;
  }

 private:
  bool decide(int u, int v) {
    std::vector<std::pair<int, int>> queue{{u, v}};
    while (!queue.empty()) {
      auto [p, q] = queue.back();
      queue.pop_back();
      if (before_[p] >> q & 1) continue;
      if (before_[q] >> p & 1) return false;
      // Everything up to p now precedes everything from q.
      std::uint32_t lo = 1u << p, hi = (1u << q) | before_[q];
      for (int w = 0; w < n_; ++w)
        if (before_[w] >> p & 1) lo |= 1u << w;
      for (std::uint32_t l = lo; l; l &= l - 1) {
        int a = std::countr_zero(l);
        std::uint32_t fresh = hi & ~before_[a];
        if (fresh & lo) return false;
        before_[a] |= fresh;
        for (std::uint32_t f = fresh; f; f &= f - 1) {
          int c = std::countr_zero(f);
          if (before_[c] >> a & 1) return false;
          for (auto [y, y2] : imp_[a * n_ + c]) queue.push_back({y, y2});
        }
      }
    }
    return true;
  }

  bool rec() {
    for (int u = 0; u < n_; ++u)
      for (int v = u + 1; v < n_; ++v) {
        if (side_[u] != side_[v]) continue;
        if ((before_[u] >> v & 1) || (before_[v] >> u & 1)) continue;
        for (auto [p, q] : {std::pair{u, v}, std::pair{v, u}}) {
          auto saved = before_;
          if (decide(p, q) && rec()) return true;
          before_ = std::move(saved);
        }
        return false;
      }
    return true;
  }

  int n_;
  std::vector<int> side_;
  std::vector<std::vector<std::pair<int, int>>> imp_;
  std::vector<std::uint32_t> before_;
};

}  // namespace detail

// Whether the complement of a bipartite graph h is a circular-arc graph,
// decided through the equivalent existence of a min ordering. An induced
// cycle of length >= 6 answers "no"; otherwise the exhaustive ordering search
// runs up to the size cap, beyond which the answer is unknown.
inline CircularArcResult is_complement_circular_arc(const Graph& h, int cap = -1) {
  if (cap < 0) cap = caps().circular_arc;
  CircularArcResult r;
  auto cyc = find_long_induced_cycle(h, 6);
  if (!cyc.empty()) {
    r.answer = Tri::no;
    r.induced_cycle = cyc;
    r.note = "induced cycle of length " + std::to_string(cyc.size());
    return r;
  }
  if (h.size() > cap) {
    r.answer = Tri::unknown;
    r.note = "model search is capped at " + std::to_string(cap) + " vertices";
    return r;
  }
  detail::MinOrderingSearch search(h);
  if (search.run()) {
    r.answer = Tri::yes;
    r.order_x = search.order_of(0);
    r.order_y = search.order_of(1);
  } else {
    r.answer = Tri::no;
    r.note = "no min ordering exists";
  }
  return r;
}

struct InvariantReport {
  std::string kind;
  int value = 0;
  VertexSet subgraph;  // vertices of the graph the value was attained on
  VertexSet set1, set2;
  bool unknown = false;  // some candidate could not be classified
  bool bi_arc = false;   // no qualifying subgraph exists
};

namespace detail {

inline std::vector<int> class_vertices(const BipView& b, int c) { return mask_to_vector(b.cls[c]); }

// All non-empty incomparable subsets of a class (hereditary, so a DFS over
// increasing vertices reaches each exactly once).
inline std::vector<std::uint64_t> incomparable_subsets(const BipView& b, int c) {
  std::vector<int> vs = class_vertices(b, c);
  std::vector<std::uint64_t> out;
  std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t from, std::uint64_t cur) {
    for (std::size_t i = from; i < vs.size(); ++i) {
      int v = vs[i];
      bool ok = true;
      for (std::uint64_t m = cur; m && ok; m &= m - 1) ok = b.incomparable(lowbit(m), v);
      if (!ok) continue;
      std::uint64_t nxt = cur | bit(v);
      out.push_back(nxt);
      rec(i + 1, nxt);
    }
  };
  rec(0, 0);
  return out;
}

inline std::uint64_t max_incomparable_in_class(const BipView& b, int c) {
  std::vector<int> vs = class_vertices(b, c);
  std::uint64_t best = 0;
  std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t from, std::uint64_t cur) {
    if (popcount64(cur) > popcount64(best)) best = cur;
    if (popcount64(cur) + static_cast<int>(vs.size() - from) <= popcount64(best)) return;
    for (std::size_t i = from; i < vs.size(); ++i) {
      int v = vs[i];
      bool ok = true;
      for (std::uint64_t m = cur; m && ok; m &= m - 1) ok = b.incomparable(lowbit(m), v);
      if (ok) rec(i + 1, cur | bit(v));
      if (popcount64(cur) + static_cast<int>(vs.size() - i) <= popcount64(best)) return;
    }
  };
  rec(0, 0);
  return best;
}

// Private neighbour of each member of s, or -1.
inline int private_neighbor(const BipView& b, std::uint64_t s, int v) {
  std::uint64_t others = 0;
  for (std::uint64_t m = s & ~bit(v); m; m &= m - 1) others |= b.nb[lowbit(m)];
  std::uint64_t p = b.nb[v] & ~others;
  return p ? lowbit(p) : -1;
}

inline std::uint64_t max_strong_in_class(const BipView& b, int c) {
  std::vector<int> vs = class_vertices(b, c);
  std::uint64_t best = 0;
  std::function<void(std::size_t, std::uint64_t)> rec = [&](std::size_t from, std::uint64_t cur) {
    if (popcount64(cur) > popcount64(best)) best = cur;
    for (std::size_t i = from; i < vs.size(); ++i) {
      if (popcount64(cur) + static_cast<int>(vs.size() - i) <= popcount64(best)) return;
      std::uint64_t nxt = cur | bit(vs[i]);
      bool ok = true;
      for (std::uint64_t m = nxt; m && ok; m &= m - 1) ok = private_neighbor(b, nxt, lowbit(m)) >= 0;
      if (ok) rec(i + 1, nxt);
    }
  };
  rec(0, 0);
  return best;
}

}  // namespace detail

// Maximum incomparable set inside one bipartition class.
inline InvariantReport invariant_i(const Graph& h) {
  detail::BipView b(h);
  InvariantReport r;
  r.kind = "i";
  for (int v = 0; v < h.size(); ++v) r.subgraph.push_back(v);
  for (int c = 0; c < 2; ++c) {
    std::uint64_t s = detail::max_incomparable_in_class(b, c);
    if (popcount64(s) > r.value) {
      r.value = popcount64(s);
      r.set1 = mask_to_vector(s);
    }
  }
  return r;
}

// Maximum strongly incomparable set (= maximum induced matching); set2 holds
// the private neighbours in the order of set1.
inline InvariantReport invariant_mim(const Graph& h) {
  detail::BipView b(h);
  InvariantReport r;
  r.kind = "mim";
  for (int v = 0; v < h.size(); ++v) r.subgraph.push_back(v);
  for (int c = 0; c < 2; ++c) {
    std::uint64_t s = detail::max_strong_in_class(b, c);
    if (popcount64(s) > r.value) {
      r.value = popcount64(s);
      r.set1 = mask_to_vector(s);
      r.set2.clear();
      for (int v : r.set1) r.set2.push_back(detail::private_neighbor(b, s, v));
    }
  }
  return r;
}

// Maximum over incomparable S1, S2 in different classes, every vertex of
// each having a neighbour in the other, of max_{x in S1} |S2 - N(x)|.
inline InvariantReport invariant_gamma(const Graph& h) {
  detail::BipView b(h);
  InvariantReport r;
  r.kind = "gamma";
  for (int v = 0; v < h.size(); ++v) r.subgraph.push_back(v);
  auto sub0 = detail::incomparable_subsets(b, 0);
  auto sub1 = detail::incomparable_subsets(b, 1);
  r.value = 0;
  bool any = false;
  for (int orient = 0; orient < 2; ++orient) {
    const auto& a1 = orient == 0 ? sub0 : sub1;
    const auto& a2 = orient == 0 ? sub1 : sub0;
    for (std::uint64_t s1 : a1)
      for (std::uint64_t s2 : a2) {
        bool ok = true;
        int val = 0;
        for (std::uint64_t m = s1; m && ok; m &= m - 1) {
          std::uint64_t nbx = b.nb[lowbit(m)];
          ok = (nbx & s2) != 0;
          val = std::max(val, popcount64(s2 & ~nbx));
        }
        for (std::uint64_t m = s2; m && ok; m &= m - 1) ok = (b.nb[lowbit(m)] & s1) != 0;
        if (!ok) continue;
        if (!any || val > r.value) {
          any = true;
          r.value = val;
          r.set1 = mask_to_vector(s1);
          r.set2 = mask_to_vector(s2);
        }
      }
  }
  return r;
}

enum class InvariantKind { i, mim, gamma };

inline InvariantReport base_invariant(const Graph& h, InvariantKind k) {
  switch (k) {
    case InvariantKind::i: return invariant_i(h);
    case InvariantKind::mim: return invariant_mim(h);
    default: return invariant_gamma(h);
  }
}

// The graph the starred invariants are computed on: h itself when it is
// bipartite, the associated bipartite graph otherwise.
inline Graph star_base(const Graph& h) { return is_bipartite(h) ? h : associated_bipartite(h); }

// Maximum of the base invariant over connected, undecomposable induced
// subgraphs whose complement is not circular-arc. Candidates are visited by
// size (descending) and then lexicographically, and a candidate is only
// classified if it beats the incumbent, so ties go to the larger and then
// lexicographically smaller subgraph.
inline InvariantReport invariant_star(const Graph& h, InvariantKind kind, int ca_cap = -1) {
  Graph base = star_base(h);
  const int n = base.size();
  if (n > 24) throw size_cap_exceeded("starred invariants support at most 24 vertices");
  InvariantReport best;
  best.kind = std::string(kind == InvariantKind::i ? "i" : kind == InvariantKind::mim ? "mim" : "gamma") + "*";
  best.value = -1;
  // Base invariant on the whole graph bounds i and mim on all subgraphs.
  int upper = kind == InvariantKind::gamma ? n : base_invariant(base, kind).value;

  std::vector<std::uint32_t> nb(n, 0);
  for (int v = 0; v < n; ++v)
    for (int w : base.neighbors(v)) nb[v] |= std::uint32_t{1} << w;
  std::vector<std::vector<std::uint32_t>> by_size(n + 1);
  for (std::uint32_t s = 1; s < (std::uint32_t{1} << n); ++s) {
    std::uint32_t comp = s & (~s + 1), frontier = comp;
    while (frontier) {
      int v = std::countr_zero(frontier);
      frontier &= frontier - 1;
      std::uint32_t add = nb[v] & s & ~comp;
      comp |= add;
      frontier |= add;
    }
    if (comp == s) by_size[std::popcount(s)].push_back(s);
  }
  auto lex_less = [](std::uint32_t a, std::uint32_t b) {
    std::uint32_t d = a ^ b;
    return d != 0 && (a & (d & (~d + 1))) != 0;
  };
  bool done = false;
  for (int size = n; size >= 1 && !done; --size) {
    auto& list = by_size[size];
    std::sort(list.begin(), list.end(), lex_less);
    for (std::uint32_t s : list) {
      if (best.value >= upper) {
        done = true;
        break;
      }
      VertexSet vs;
      for (std::uint32_t m = s; m; m &= m - 1) vs.push_back(std::countr_zero(m));
      Graph sub = induced_subgraph(base, vs);
      InvariantReport val = base_invariant(sub, kind);
      if (val.value <= best.value) continue;
      if (!is_undecomposable(sub)) continue;
      auto ca = is_complement_circular_arc(sub, ca_cap);
      if (ca.answer == Tri::unknown) {
        best.unknown = true;
        continue;
      }
      if (ca.answer == Tri::yes) continue;
      best.value = val.value;
      best.subgraph = vs;
      best.set1.clear();
      best.set2.clear();
      for (int v : val.set1) best.set1.push_back(vs[v]);
      for (int v : val.set2) best.set2.push_back(vs[v]);
    }
  }
  if (best.value < 0) {
    best.bi_arc = true;
    best.value = kind == InvariantKind::gamma ? 1 : 0;
  }
  return best;
}

}  // namespace lhom
