#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "graph.hpp"

namespace lhom {

struct LinearLayout {
  std::vector<int> order;
  int width = 0;
};

// cuts[i] = number of non-loop edges with exactly one endpoint among
// order[0..i].
inline std::vector<int> cut_profile(const Graph& g, const std::vector<int>& order) {
  std::vector<int> pos(g.size(), -1);
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
  std::vector<int> cuts(order.size(), 0);
  int cur = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    int v = order[i];
    for (int w : g.neighbors(v)) {
      if (w == v) continue;
      cur += pos[w] > static_cast<int>(i) ? 1 : -1;
    }
    cuts[i] = cur;
  }
  return cuts;
}

inline bool is_permutation_of_vertices(const Graph& g, const std::vector<int>& order) {
  if (static_cast<int>(order.size()) != g.size()) return false;
  std::vector<char> seen(g.size(), 0);
  for (int v : order) {
    if (v < 0 || v >= g.size() || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

inline int layout_width(const Graph& g, const std::vector<int>& order) {
  if (!is_permutation_of_vertices(g, order)) throw invalid_input("layout is not a permutation of V(g)");
  auto cuts = cut_profile(g, order);
  return cuts.empty() ? 0 : *std::max_element(cuts.begin(), cuts.end());
}

namespace detail {

// Optimal order of one component (at most 20 vertices) by dynamic
// programming over placed sets. W[S] = max(cut(S), min_v W[S - v]).
inline std::vector<int> exact_cutwidth_component(const Graph& g, const VertexSet& comp) {
  const int k = static_cast<int>(comp.size());
  std::vector<int> local(g.size(), -1);
  for (int i = 0; i < k; ++i) local[comp[i]] = i;
  std::vector<std::uint32_t> nb(k, 0);
  std::vector<int> deg(k, 0);
  for (int i = 0; i < k; ++i)
    for (int w : g.neighbors(comp[i]))
      if (w != comp[i]) {
        nb[i] |= std::uint32_t{1} << local[w];
        ++deg[i];
      }
  const std::size_t full = std::size_t{1} << k;
  std::vector<std::uint16_t> cut(full, 0), best(full, 0);
  for (std::size_t s = 1; s < full; ++s) {
    int v = std::countr_zero(static_cast<std::uint32_t>(s));
    std::size_t rest = s & (s - 1);
    cut[s] = static_cast<std::uint16_t>(cut[rest] + deg[v] -
                                        2 * std::popcount(nb[v] & static_cast<std::uint32_t>(rest)));
    std::uint16_t m = UINT16_MAX;
    for (std::size_t r = s; r; r &= r - 1) {
      int u = std::countr_zero(static_cast<std::uint32_t>(r));
      m = std::min(m, best[s & ~(std::size_t{1} << u)]);
    }
    best[s] = std::max(cut[s], m);
  }
  std::vector<int> rev;
  std::size_t s = full - 1;
  while (s) {
    for (std::size_t r = s; r; r &= r - 1) {
      int u = std::countr_zero(static_cast<std::uint32_t>(r));
      std::size_t t = s & ~(std::size_t{1} << u);
      if (std::max(cut[s], best[t]) == best[s]) {
        rev.push_back(comp[u]);
        s = t;
        break;
      }
    }
  }
  std::reverse(rev.begin(), rev.end());
  return rev;
}

}  // namespace detail

// Minimum-width layout. Components are laid out one after another, which is
// optimal because the width of a concatenation is the maximum of the parts.
inline LinearLayout exact_cutwidth(const Graph& g, int cap = -1) {
  if (cap < 0) cap = caps().exact_cutwidth;
  LinearLayout out;
  for (const auto& comp : connected_components(g)) {
    if (static_cast<int>(comp.size()) > cap)
      throw size_cap_exceeded("exact cutwidth is capped at " + std::to_string(cap) + " vertices per component");
    auto part = detail::exact_cutwidth_component(g, comp);
    out.order.insert(out.order.end(), part.begin(), part.end());
  }
  out.width = layout_width(g, out.order);
  return out;
}

// Greedy: repeatedly place the vertex that yields the smallest cut, ties
// broken by more placed neighbours, then lower index.
inline LinearLayout greedy_layout(const Graph& g) {
  const int n = g.size();
  std::vector<char> placed(n, 0), in_frontier(n, 0);
  std::vector<int> placed_nb(n, 0), deg(n, 0);
  for (int v = 0; v < n; ++v)
    for (int w : g.neighbors(v))
      if (w != v) ++deg[v];
  std::vector<int> frontier;
  LinearLayout out;
  int cur = 0, next_fresh = 0;
  for (int step = 0; step < n; ++step) {
    int best = -1;
    long best_key = 0;
    auto consider = [&](int v) {
      long delta = deg[v] - 2L * placed_nb[v];
      long key = (delta * (n + 1) - placed_nb[v]) * (n + 1) + v;
      if (best < 0 || key < best_key) {
        best = v;
        best_key = key;
      }
    };
    for (int v : frontier)
      if (!placed[v]) consider(v);
    if (best < 0) {
      // New component: start at a vertex of minimum degree.
      int pick = -1;
      for (int v = next_fresh; v < n; ++v)
        if (!placed[v] && (pick < 0 || deg[v] < deg[pick])) pick = v;
      best = pick;
    }
    placed[best] = 1;
    cur += deg[best] - 2 * placed_nb[best];
    out.order.push_back(best);
    out.width = std::max(out.width, cur);
    for (int w : g.neighbors(best))
      if (w != best && !placed[w]) {
        ++placed_nb[w];
        if (!in_frontier[w]) {
          in_frontier[w] = 1;
          frontier.push_back(w);
        }
      }
    if (frontier.size() > 64) {
      std::erase_if(frontier, [&](int v) { return placed[v] != 0; });
    }
    while (next_fresh < n && placed[next_fresh]) ++next_fresh;
  }
  return out;
}

namespace detail {

// Vertices of a shortest cycle inside `alive` (a bitmask over <= 32
// vertices), empty if acyclic.
inline std::vector<int> shortest_cycle_in(const std::vector<std::uint32_t>& nb, std::uint32_t alive) {
  std::vector<int> best;
  for (std::uint32_t a = alive; a; a &= a - 1) {
    int s = std::countr_zero(a);
    std::vector<int> dist(nb.size(), -1), parent(nb.size(), -1), order{s};
    dist[s] = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      int u = order[i];
      bool done = false;
      for (std::uint32_t m = nb[u] & alive; m; m &= m - 1) {
        int w = std::countr_zero(m);
        if (dist[w] == -1) {
          dist[w] = dist[u] + 1;
          parent[w] = u;
          order.push_back(w);
        } else if (parent[u] != w) {
          int len = dist[u] + dist[w] + 1;
          if (best.empty() || len < static_cast<int>(best.size())) {
            std::vector<int> cyc;
            for (int x = u; x != -1; x = parent[x]) cyc.push_back(x);
            std::vector<int> other;
            for (int x = w; x != -1; x = parent[x]) other.push_back(x);
            // Walks meet at their lowest common ancestor.
            while (cyc.size() > 1 && other.size() > 1 && cyc[cyc.size() - 2] == other[other.size() - 2]) {
              cyc.pop_back();
              other.pop_back();
            }
            other.pop_back();
            cyc.insert(cyc.end(), other.rbegin(), other.rend());
            best = cyc;
          }
          done = true;
          break;
        }
      }
      if (done) break;
    }
  }
  return best;
}

inline std::uint32_t strip_low_degree(const std::vector<std::uint32_t>& nb, std::uint32_t alive) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::uint32_t a = alive; a; a &= a - 1) {
      int v = std::countr_zero(a);
      if (std::popcount(nb[v] & alive) <= 1) {
        alive &= ~(std::uint32_t{1} << v);
        changed = true;
      }
    }
  }
  return alive;
}

inline bool fvs_search(const std::vector<std::uint32_t>& nb, std::uint32_t alive, int k,
                       std::vector<int>& chosen) {
  alive = strip_low_degree(nb, alive);
  if (!alive) return true;
  if (k == 0) return false;
  auto cyc = shortest_cycle_in(nb, alive);
  if (cyc.empty()) return true;
  std::sort(cyc.begin(), cyc.end());
  for (int v : cyc) {
    chosen.push_back(v);
    if (fvs_search(nb, alive & ~(std::uint32_t{1} << v), k - 1, chosen)) return true;
    chosen.pop_back();
  }
  return false;
}

}  // namespace detail

// Minimum feedback vertex set by iterative deepening; looped vertices are
// forced into the set.
inline VertexSet exact_fvs(const Graph& g, int cap = -1) {
  if (cap < 0) cap = caps().exact_fvs;
  if (g.size() > cap) throw size_cap_exceeded("exact FVS is capped at " + std::to_string(cap) + " vertices");
  if (g.size() > 32) throw size_cap_exceeded("exact FVS supports at most 32 vertices");
  const int n = g.size();
  std::vector<std::uint32_t> nb(n, 0);
  std::uint32_t alive = n == 32 ? ~std::uint32_t{0} : ((std::uint32_t{1} << n) - 1);
  VertexSet forced;
  for (int v = 0; v < n; ++v)
    for (int w : g.neighbors(v)) {
      if (w == v) continue;
      nb[v] |= std::uint32_t{1} << w;
    }
  for (int v = 0; v < n; ++v)
    if (g.has_loop(v)) {
      forced.push_back(v);
      alive &= ~(std::uint32_t{1} << v);
    }
  for (int k = 0; k <= n; ++k) {
    std::vector<int> chosen;
    if (detail::fvs_search(nb, alive, k, chosen)) {
      chosen.insert(chosen.end(), forced.begin(), forced.end());
      std::sort(chosen.begin(), chosen.end());
      return chosen;
    }
  }
  return {};
}

struct TreeDecomposition {
  std::vector<VertexSet> bags;                  // sorted
  std::vector<std::pair<int, int>> tree_edges;  // bag indices

  int width() const {
    int w = -1;
    for (const auto& b : bags) w = std::max(w, static_cast<int>(b.size()) - 1);
    return w;
  }
};

struct DecompositionCheck {
  bool ok = true;
  std::string failure;  // first failing condition
};

// Validates: bag ids and vertex ids in range, the bag graph is a tree,
// every vertex and every edge is covered, and the bags containing each
// vertex form a connected subtree.
inline DecompositionCheck validate_decomposition(const Graph& g, const TreeDecomposition& td) {
  DecompositionCheck r;
  auto fail = [&](std::string why) {
    r.ok = false;
    r.failure = std::move(why);
    return r;
  };
  const int nb = static_cast<int>(td.bags.size());
  if (nb == 0) {
    if (g.size() == 0) return r;
    return fail("no bags");
  }
  for (const auto& b : td.bags)
    for (int v : b)
      if (v < 0 || v >= g.size()) return fail("bag holds an unknown vertex");
  std::vector<std::vector<int>> adj(nb);
  for (auto [a, b] : td.tree_edges) {
    if (a < 0 || b < 0 || a >= nb || b >= nb || a == b) return fail("invalid tree edge");
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  if (static_cast<int>(td.tree_edges.size()) != nb - 1) return fail("bag graph is not a tree");
  {
    std::vector<char> seen(nb, 0);
    std::vector<int> st{0};
    seen[0] = 1;
    int cnt = 1;
    while (!st.empty()) {
      int a = st.back();
      st.pop_back();
      for (int b : adj[a])
        if (!seen[b]) {
          seen[b] = 1;
          ++cnt;
          st.push_back(b);
        }
    }
    if (cnt != nb) return fail("bag graph is not a tree");
  }
  std::vector<std::vector<int>> holders(g.size());
  for (int i = 0; i < nb; ++i)
    for (int v : td.bags[i]) holders[v].push_back(i);
  for (int v = 0; v < g.size(); ++v)
    if (holders[v].empty()) return fail("vertex " + g.label(v) + " is not covered");
  for (auto [u, v] : g.edges()) {
    bool found = false;
    for (int i : holders[u])
      if (std::binary_search(td.bags[i].begin(), td.bags[i].end(), v)) {
        found = true;
        break;
      }
    if (!found) return fail("edge " + g.label(u) + "-" + g.label(v) + " is not covered");
  }
  std::vector<int> mark(nb, -1);
  for (int v = 0; v < g.size(); ++v) {
    for (int i : holders[v]) mark[i] = v;
    std::vector<int> st{holders[v][0]};
    std::vector<char> seen(nb, 0);
    seen[holders[v][0]] = 1;
    std::size_t cnt = 1;
    while (!st.empty()) {
      int a = st.back();
      st.pop_back();
      for (int b : adj[a])
        if (!seen[b] && mark[b] == v) {
          seen[b] = 1;
          ++cnt;
          st.push_back(b);
        }
    }
    if (cnt != holders[v].size()) return fail("bags containing " + g.label(v) + " are not connected");
  }
  return r;
}

// G - F is a forest; its width-1 decomposition (one bag per vertex and per
// edge) gets F added to every bag. Width <= |F| + 1.
inline TreeDecomposition fvs_to_tree_decomposition(const Graph& g, const VertexSet& fvs) {
  if (!is_forest_without(g, fvs)) throw invalid_input("G - F is not a forest");
  std::vector<char> in_f(g.size(), 0);
  for (int v : fvs) in_f[v] = 1;
  TreeDecomposition td;
  auto with_f = [&](VertexSet b) {
    b.insert(b.end(), fvs.begin(), fvs.end());
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    return b;
  };
  std::vector<int> vertex_bag(g.size(), -1);
  for (int v = 0; v < g.size(); ++v)
    if (!in_f[v]) {
      vertex_bag[v] = static_cast<int>(td.bags.size());
      td.bags.push_back(with_f({v}));
    }
  // Rooted traversal of each tree: edge bag {parent, child} between the two
  // vertex bags.
  std::vector<char> seen(g.size(), 0);
  int prev_root = -1;
  for (int s = 0; s < g.size(); ++s) {
    if (in_f[s] || seen[s]) continue;
    seen[s] = 1;
    if (prev_root >= 0) td.tree_edges.emplace_back(vertex_bag[prev_root], vertex_bag[s]);
    prev_root = s;
    std::vector<int> st{s};
    while (!st.empty()) {
      int u = st.back();
      st.pop_back();
      for (int w : g.neighbors(u)) {
        if (in_f[w] || seen[w]) continue;
        seen[w] = 1;
        int eb = static_cast<int>(td.bags.size());
        td.bags.push_back(with_f({u, w}));
        td.tree_edges.emplace_back(vertex_bag[u], eb);
        td.tree_edges.emplace_back(eb, vertex_bag[w]);
        st.push_back(w);
      }
    }
  }
  if (td.bags.empty()) td.bags.push_back(with_f({}));
  return td;
}

// Path decomposition from a layout: B_p holds every placed vertex with an
// unplaced neighbour, plus the next vertex. Width <= layout width.
inline TreeDecomposition layout_to_path_decomposition(const Graph& g, const std::vector<int>& order) {
  if (!is_permutation_of_vertices(g, order)) throw invalid_input("layout is not a permutation of V(g)");
  std::vector<int> pos(g.size());
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
  std::vector<int> last(g.size(), -1);
  for (int v = 0; v < g.size(); ++v)
    for (int w : g.neighbors(v)) last[v] = std::max(last[v], pos[w]);
  TreeDecomposition td;
  for (std::size_t p = 0; p < order.size(); ++p) {
    VertexSet bag{order[p]};
    for (std::size_t i = 0; i < p; ++i)
      if (last[order[i]] >= static_cast<int>(p)) bag.push_back(order[i]);
    std::sort(bag.begin(), bag.end());
    if (p > 0) td.tree_edges.emplace_back(static_cast<int>(p) - 1, static_cast<int>(p));
    td.bags.push_back(std::move(bag));
  }
  return td;
}

}  // namespace lhom
