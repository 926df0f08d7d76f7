#pragma once

#include <algorithm>
#include <climits>
#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "common.hpp"

namespace lhom {

// Simple undirected graph on dense indices 0..n-1. Loops are allowed and
// stored once in the adjacency list, so a loop adds one to the degree.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n) : adj_(n), labels_(n) {}

  int size() const { return static_cast<int>(adj_.size()); }
  int num_edges() const { return edge_count_; }

  int add_vertex(std::string label = {}) {
    adj_.emplace_back();
    labels_.push_back(std::move(label));
    return size() - 1;
  }

  // Returns false if the edge was already present.
  bool add_edge(int u, int v) {
    check(u);
    check(v);
    auto& a = adj_[u];
    auto it = std::lower_bound(a.begin(), a.end(), v);
    if (it != a.end() && *it == v) return false;
    a.insert(it, v);
    if (u != v) {
      auto& b = adj_[v];
      b.insert(std::lower_bound(b.begin(), b.end(), u), u);
    }
    ++edge_count_;
    return true;
  }

  bool remove_edge(int u, int v) {
    check(u);
    check(v);
    auto& a = adj_[u];
    auto it = std::lower_bound(a.begin(), a.end(), v);
    if (it == a.end() || *it != v) return false;
    a.erase(it);
    if (u != v) {
      auto& b = adj_[v];
      b.erase(std::lower_bound(b.begin(), b.end(), u));
    }
    --edge_count_;
    return true;
  }

  bool has_edge(int u, int v) const {
    const auto& a = adj_[u];
    return std::binary_search(a.begin(), a.end(), v);
  }
  bool has_loop(int v) const { return has_edge(v, v); }
  bool has_loops() const {
    for (int v = 0; v < size(); ++v)
      if (has_loop(v)) return true;
    return false;
  }

  const std::vector<int>& neighbors(int v) const { return adj_[v]; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }
  int max_degree() const {
    int d = 0;
    for (const auto& a : adj_) d = std::max(d, static_cast<int>(a.size()));
    return d;
  }

  std::string label(int v) const {
    return labels_[v].empty() ? std::to_string(v) : labels_[v];
  }
  bool has_custom_label(int v) const { return !labels_[v].empty(); }
  void set_label(int v, std::string s) { labels_[v] = std::move(s); }

  std::optional<int> find(std::string_view name) const {
    for (int v = 0; v < size(); ++v)
      if (label(v) == name) return v;
    return std::nullopt;
  }

  // Edges as (u, v) with u <= v, in lexicographic order.
  std::vector<std::pair<int, int>> edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edge_count_);
    for (int u = 0; u < size(); ++u)
      for (int v : adj_[u])
        if (u <= v) out.emplace_back(u, v);
    return out;
  }

  std::uint64_t neighbor_mask(int v) const {
    std::uint64_t m = 0;
    for (int w : adj_[v]) m |= std::uint64_t{1} << w;
    return m;
  }

 private:
  void check(int v) const {
    if (v < 0 || v >= size()) throw std::out_of_range("vertex index out of range");
  }

  std::vector<std::vector<int>> adj_;
  std::vector<std::string> labels_;
  int edge_count_ = 0;
};

struct not_bipartite : lhom_error {
  std::vector<int> odd_walk;  // closed walk of odd length, first == last
  explicit not_bipartite(std::vector<int> w)
      : lhom_error("graph is not bipartite"), odd_walk(std::move(w)) {}
};

struct Bipartition {
  VertexSet x, y;
  std::vector<int> side;  // 0 for x, 1 for y
};

// BFS 2-colouring; the lowest-index vertex of every component lands in x.
inline Bipartition bipartition(const Graph& g) {
  const int n = g.size();
  std::vector<int> side(n, -1), parent(n, -1);
  for (int s = 0; s < n; ++s) {
    if (side[s] != -1) continue;
    side[s] = 0;
    std::queue<int> q;
    q.push(s);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int w : g.neighbors(u)) {
        if (w == u) throw not_bipartite({u, u});
        if (side[w] == -1) {
          side[w] = 1 - side[u];
          parent[w] = u;
          q.push(w);
        } else if (side[w] == side[u]) {
          // root->u, u-w, w->root
          std::vector<int> walk;
          for (int a = u; a != -1; a = parent[a]) walk.push_back(a);
          std::reverse(walk.begin(), walk.end());
          for (int b = w; b != -1; b = parent[b]) walk.push_back(b);
          throw not_bipartite(std::move(walk));
        }
      }
    }
  }
  Bipartition b;
  b.side = side;
  for (int v = 0; v < n; ++v) (side[v] == 0 ? b.x : b.y).push_back(v);
  return b;
}

inline bool is_bipartite(const Graph& g) {
  try {
    bipartition(g);
    return true;
  } catch (const not_bipartite&) {
    return false;
  }
}

// v' = v and v'' = n + v; edge u'v'' for every (ordered) edge uv.
inline Graph associated_bipartite(const Graph& h) {
  const int n = h.size();
  Graph out(2 * n);
  for (int v = 0; v < n; ++v) {
    out.set_label(v, h.label(v) + "'");
    out.set_label(n + v, h.label(v) + "''");
  }
  for (int u = 0; u < n; ++u)
    for (int v : h.neighbors(u)) out.add_edge(u, n + v);
  return out;
}

inline Graph induced_subgraph(const Graph& g, const std::vector<int>& vs) {
  std::vector<int> index(g.size(), -1);
  Graph out(static_cast<int>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) {
    index[vs[i]] = static_cast<int>(i);
    out.set_label(static_cast<int>(i), g.label(vs[i]));
  }
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (int w : g.neighbors(vs[i]))
      if (index[w] >= static_cast<int>(i)) out.add_edge(static_cast<int>(i), index[w]);
  return out;
}

// Components in order of their smallest vertex; each sorted.
inline std::vector<VertexSet> connected_components(const Graph& g) {
  const int n = g.size();
  std::vector<int> comp(n, -1);
  std::vector<VertexSet> out;
  for (int s = 0; s < n; ++s) {
    if (comp[s] != -1) continue;
    VertexSet c{s};
    comp[s] = static_cast<int>(out.size());
    for (std::size_t i = 0; i < c.size(); ++i)
      for (int w : g.neighbors(c[i]))
        if (comp[w] == -1) {
          comp[w] = comp[s];
          c.push_back(w);
        }
    std::sort(c.begin(), c.end());
    out.push_back(std::move(c));
  }
  return out;
}

inline bool is_connected(const Graph& g) {
  return g.size() == 0 || connected_components(g).size() == 1;
}

constexpr int kInfinity = INT_MAX;

// Distances from src, truncated at max_depth (kInfinity beyond).
inline std::vector<int> bfs_distances(const Graph& g, int src, int max_depth = kInfinity) {
  std::vector<int> d(g.size(), kInfinity);
  d[src] = 0;
  std::vector<int> frontier{src};
  for (std::size_t i = 0; i < frontier.size(); ++i) {
    int u = frontier[i];
    if (d[u] >= max_depth) continue;
    for (int w : g.neighbors(u))
      if (d[w] == kInfinity) {
        d[w] = d[u] + 1;
        frontier.push_back(w);
      }
  }
  return d;
}

inline int distance(const Graph& g, int u, int v) { return bfs_distances(g, u)[v]; }

inline std::vector<std::vector<int>> all_pairs_distances(const Graph& g) {
  std::vector<std::vector<int>> out;
  out.reserve(g.size());
  for (int v = 0; v < g.size(); ++v) out.push_back(bfs_distances(g, v));
  return out;
}

namespace detail {

// Scratch arrays for many truncated BFS runs; only touched entries are reset.
struct BfsScratch {
  std::vector<int> dist, parent, touched;
  explicit BfsScratch(int n) : dist(n, -1), parent(n, -1) {}
  void reset() {
    for (int v : touched) dist[v] = parent[v] = -1;
    touched.clear();
  }
};

// Shortest cycle length through src or in its BFS ball, truncated at limit.
inline int shortest_cycle_from(const Graph& g, int src, int limit, BfsScratch& ws) {
  if (g.has_loop(src)) return 1;
  ws.reset();
  ws.dist[src] = 0;
  ws.touched.push_back(src);
  int best = kInfinity;
  for (std::size_t i = 0; i < ws.touched.size(); ++i) {
    int u = ws.touched[i];
    if (2 * ws.dist[u] + 1 >= best || 2 * ws.dist[u] + 1 > limit) break;
    for (int w : g.neighbors(u)) {
      if (w == u) {
        best = 1;
        continue;
      }
      if (ws.dist[w] == -1) {
        ws.dist[w] = ws.dist[u] + 1;
        ws.parent[w] = u;
        ws.touched.push_back(w);
      } else if (ws.parent[u] != w) {
        best = std::min(best, ws.dist[u] + ws.dist[w] + 1);
      }
    }
  }
  return best;
}

}  // namespace detail

// Girth, kInfinity for forests; loops count as cycles of length one.
inline int girth(const Graph& g) {
  detail::BfsScratch ws(g.size());
  int best = kInfinity;
  for (int v = 0; v < g.size(); ++v) {
    best = std::min(best, detail::shortest_cycle_from(g, v, best, ws));
    if (best == 1) break;
  }
  return best;
}

inline bool girth_at_least(const Graph& g, int bound) {
  detail::BfsScratch ws(g.size());
  for (int v = 0; v < g.size(); ++v)
    if (detail::shortest_cycle_from(g, v, bound - 1, ws) < bound) return false;
  return true;
}

// Smallest distance between two distinct degree-3 vertices, searched only
// below `bound`; kInfinity when all such pairs are at least `bound` apart.
inline int min_degree3_distance(const Graph& g, int bound) {
  detail::BfsScratch ws(g.size());
  int best = kInfinity;
  for (int v = 0; v < g.size(); ++v) {
    if (g.degree(v) != 3) continue;
    ws.reset();
    ws.dist[v] = 0;
    ws.touched.push_back(v);
    for (std::size_t i = 0; i < ws.touched.size(); ++i) {
      int u = ws.touched[i];
      if (u != v && g.degree(u) == 3) best = std::min(best, ws.dist[u]);
      if (ws.dist[u] + 1 >= bound) continue;
      for (int w : g.neighbors(u))
        if (ws.dist[w] == -1) {
          ws.dist[w] = ws.dist[u] + 1;
          ws.touched.push_back(w);
        }
    }
  }
  return best;
}

struct ClassCheck {
  bool bipartite = false;
  bool max_degree_ok = false;
  bool girth_ok = false;
  bool spacing_ok = false;
  bool ok() const { return bipartite && max_degree_ok && girth_ok && spacing_ok; }
};

// Membership in the class of bipartite graphs with maximum degree 3, girth at
// least g and degree-3 vertices pairwise at distance at least g.
inline ClassCheck check_sparse_class(const Graph& gr, int g) {
  ClassCheck c;
  c.bipartite = is_bipartite(gr);
  c.max_degree_ok = gr.max_degree() <= 3;
  c.girth_ok = girth_at_least(gr, g);
  c.spacing_ok = min_degree3_distance(gr, g) >= g;
  return c;
}

// A graph whose components are trees (no loops, no cycles).
inline bool is_forest(const Graph& g) {
  if (g.has_loops()) return false;
  auto comps = connected_components(g);
  return g.num_edges() + static_cast<int>(comps.size()) == g.size();
}

inline bool is_forest_without(const Graph& g, const VertexSet& removed) {
  std::vector<char> gone(g.size(), 0);
  for (int v : removed) gone[v] = 1;
  VertexSet keep;
  for (int v = 0; v < g.size(); ++v)
    if (!gone[v]) keep.push_back(v);
  return is_forest(induced_subgraph(g, keep));
}

// Incomparability in one bipartition class.
struct IncomparabilityCheck {
  bool ok = false;
  std::string reason;
  std::pair<int, int> witness{-1, -1};          // u with N(u) inside N(v)
  std::vector<std::pair<int, int>> private_nb;  // (s, private neighbour of s)
};

inline bool neighborhood_subset(const Graph& h, int u, int v) {
  const auto& a = h.neighbors(u);
  const auto& b = h.neighbors(v);
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

inline IncomparabilityCheck check_incomparable(const Graph& h, const VertexSet& s) {
  IncomparabilityCheck r;
  Bipartition b = bipartition(h);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (b.side[s[i]] != b.side[s[0]]) {
      r.reason = "vertices lie in different bipartition classes";
      return r;
    }
  for (int u : s)
    for (int v : s)
      if (u != v && neighborhood_subset(h, u, v)) {
        r.reason = "N(" + h.label(u) + ") is contained in N(" + h.label(v) + ")";
        r.witness = {u, v};
        return r;
      }
  r.ok = true;
  return r;
}

inline IncomparabilityCheck check_strongly_incomparable(const Graph& h, const VertexSet& s) {
  IncomparabilityCheck r = check_incomparable(h, s);
  if (!r.ok) return r;
  for (int u : s) {
    int found = -1;
    for (int w : h.neighbors(u)) {
      bool priv = true;
      for (int v : s)
        if (v != u && h.has_edge(v, w)) {
          priv = false;
          break;
        }
      if (priv) {
        found = w;
        break;
      }
    }
    if (found < 0) {
      r.ok = false;
      r.reason = h.label(u) + " has no private neighbour";
      r.witness = {u, -1};
      r.private_nb.clear();
      return r;
    }
    r.private_nb.emplace_back(u, found);
  }
  return r;
}

// Cycle graph C_k with labels w1..wk.
inline Graph cycle_graph(int k) {
  Graph g(k);
  for (int i = 0; i < k; ++i) {
    g.set_label(i, "w" + std::to_string(i + 1));
    g.add_edge(i, (i + 1) % k);
  }
  return g;
}

inline Graph path_graph(int k) {
  Graph g(k);
  for (int i = 0; i + 1 < k; ++i) g.add_edge(i, i + 1);
  return g;
}

inline Graph complete_graph(int k) {
  Graph g(k);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) g.add_edge(i, j);
  return g;
}

// K_{a,b} with sides 0..a-1 and a..a+b-1.
inline Graph complete_bipartite(int a, int b) {
  Graph g(a + b);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j) g.add_edge(i, a + j);
  return g;
}

// K_{r,r} minus the perfect matching i -- r+i.
inline Graph crown_graph(int r) {
  Graph g(2 * r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      if (i != j) g.add_edge(i, r + j);
  return g;
}

}  // namespace lhom
