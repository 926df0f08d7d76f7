#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lhom/common.hpp"
#include "lhom/graph.hpp"
#include "lhom/instance.hpp"
#include "lhom/solvers.hpp"

namespace lhom {

using Walk = std::vector<int>;

inline bool is_walk(const Graph& h, const Walk& w) {
  if (w.empty()) return false;
  for (std::size_t i = 1; i < w.size(); ++i)
    if (!h.has_edge(w[i - 1], w[i])) return false;
  return true;
}

inline Walk reversed(Walk w) {
  std::reverse(w.begin(), w.end());
  return w;
}

// p avoids q: equal lengths, different starts, and p_i q_{i+1} is never an edge.
inline bool walk_avoids(const Graph& h, const Walk& p, const Walk& q) {
  if (p.size() != q.size() || p.empty() || p[0] == q[0]) return false;
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    if (h.has_edge(p[i], q[i + 1])) return false;
  return true;
}

struct WalkEnds {
  int from = -1;
  int to = -1;
};

// Shortest tuple of equal-length walks (length >= 1) with the given ends such
// that walk i avoids walk j for every pair (i, j) in `avoid`. BFS over vertex
// tuples with successors in lexicographic order, so the result is
// deterministic.
inline std::optional<std::vector<Walk>> find_avoiding_walks(const Graph& h, const std::vector<WalkEnds>& ends,
                                                            const std::vector<std::pair<int, int>>& avoid,
                                                            int max_len = -1) {
  const int m = static_cast<int>(ends.size());
  const long n = h.size();
  if (m == 0 || n == 0) return std::nullopt;
  long states = 1;
  for (int i = 0; i < m; ++i) {
    states *= n;
    if (states > 20'000'000) throw size_cap_exceeded("walk search state space too large");
  }
  for (auto [i, j] : avoid)
    if (ends[i].from == ends[j].from) return std::nullopt;
  auto encode = [&](const std::vector<int>& t) {
    long c = 0;
    for (int i = m - 1; i >= 0; --i) c = c * n + t[i];
    return c;
  };
  auto decode = [&](long c) {
    std::vector<int> t(m);
    for (int i = 0; i < m; ++i) {
      t[i] = static_cast<int>(c % n);
      c /= n;
    }
    return t;
  };
  std::vector<int> start(m), goal(m);
  for (int i = 0; i < m; ++i) {
    start[i] = ends[i].from;
    goal[i] = ends[i].to;
  }
  const long s0 = encode(start), target = encode(goal);
  std::vector<long> parent(states, -1);
  std::vector<long> queue{s0};
  std::vector<int> qdepth{0};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    long cur = queue[head];
    int d = qdepth[head];
    if (max_len >= 0 && d >= max_len) continue;
    auto t = decode(cur);
    std::vector<std::size_t> idx(m, 0);
    bool dead = false;
    for (int i = 0; i < m; ++i)
      if (h.neighbors(t[i]).empty()) dead = true;
    if (dead) continue;
    // Odometer over neighbour choices, first walk most significant.
    while (true) {
      std::vector<int> nx(m);
      for (int i = 0; i < m; ++i) nx[i] = h.neighbors(t[i])[idx[i]];
      bool ok = true;
      for (auto [i, j] : avoid)
        if (h.has_edge(t[i], nx[j])) {
          ok = false;
          break;
        }
      if (ok) {
        long c = encode(nx);
        if (parent[c] < 0) {
          parent[c] = cur;
          if (c == target) {
            std::vector<Walk> out(m, Walk(d + 2));
            long x = c;
            for (int step = d + 1; step >= 0; --step) {
              auto tx = decode(x);
              for (int i = 0; i < m; ++i) out[i][step] = tx[i];
              if (step > 0) x = parent[x];
            }
            return out;
          }
          queue.push_back(c);
          qdepth.push_back(d + 1);
        }
      }
      int i = m - 1;
      while (i >= 0 && ++idx[i] == h.neighbors(t[i]).size()) idx[i--] = 0;
      if (i < 0) break;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Corner triples.

enum class TripleCase { c6, c8, strong };

inline const char* to_string(TripleCase c) {
  return c == TripleCase::c6 ? "C6" : c == TripleCase::c8 ? "C8" : "strongly-incomparable";
}

struct CornerTriple {
  int alpha = -1, beta = -1, gamma = -1;
  int alpha_p = -1, beta_p = -1;
  TripleCase kind = TripleCase::strong;
  std::vector<int> cycle;  // w1..w6 or w1..w8 in the cycle cases
  std::vector<int> bar;    // private neighbours of alpha, beta, gamma (empty if not strongly incomparable)
  Walk x, y;               // x: alpha->beta avoids y: beta->alpha
  Walk xp, yp;             // yp: beta->alpha avoids xp: alpha->beta
  // fam[t] = {X_t, Y_t, Z_t} for t indexing (alpha, beta, gamma); only filled
  // in the strongly incomparable case.
  std::array<std::array<Walk, 3>, 3> fam;

  int corner(int t) const { return t == 0 ? alpha : t == 1 ? beta : gamma; }
  int w(int i) const { return cycle.at(i - 1); }
  bool strongly_incomparable() const { return !bar.empty(); }
};

namespace detail {

// The two corners other than t, in the order alpha, beta, gamma.
inline std::pair<int, int> others(int t) {
  if (t == 0) return {1, 2};
  if (t == 1) return {0, 2};
  return {0, 1};
}

inline bool visit_induced_cycles(const Graph& h, int len, int first,
                                 const std::function<bool(const std::vector<int>&)>& visit) {
  std::vector<int> path{first};
  std::vector<char> on(h.size(), 0);
  on[first] = 1;
  std::function<bool()> rec = [&]() -> bool {
    const int sz = static_cast<int>(path.size());
    for (int w : h.neighbors(path.back())) {
      if (on[w]) continue;
      bool closing = sz + 1 == len;
      bool ok = true;
      for (int j = 0; j + 1 < sz && ok; ++j)
        if (h.has_edge(path[j], w) && !(j == 0 && closing)) ok = false;
      if (!ok || (closing && !h.has_edge(first, w))) continue;
      path.push_back(w);
      on[w] = 1;
      bool stop = closing ? visit(path) : rec();
      on[w] = 0;
      path.pop_back();
      if (stop) return true;
    }
    return false;
  };
  return rec();
}

inline bool choose_primes(const Graph& h, int a, int b, int& ap, int& bp) {
  for (int x : h.neighbors(a)) {
    if (h.has_edge(b, x)) continue;
    for (int y : h.neighbors(b))
      if (y != x && !h.has_edge(a, y)) {
        ap = x;
        bp = y;
        return true;
      }
  }
  return false;
}

inline bool pairwise_incomparable(const Graph& h, const std::vector<int>& s) {
  for (int u : s)
    for (int v : s)
      if (u != v && neighborhood_subset(h, u, v)) return false;
  return true;
}

inline bool fill_pair_walks(const Graph& h, CornerTriple& t) {
  auto a = find_avoiding_walks(h, {{t.alpha, t.beta}, {t.beta, t.alpha}}, {{0, 1}});
  auto b = find_avoiding_walks(h, {{t.alpha, t.beta}, {t.beta, t.alpha}}, {{1, 0}});
  if (!a || !b) return false;
  t.x = (*a)[0];
  t.y = (*a)[1];
  t.xp = (*b)[0];
  t.yp = (*b)[1];
  return true;
}

inline bool fill_families(const Graph& h, CornerTriple& t) {
  for (int c = 0; c < 3; ++c) {
    auto [o1, o2] = others(c);
    auto f = find_avoiding_walks(h, {{t.alpha, t.corner(o1)}, {t.alpha, t.corner(o2)}, {t.beta, t.corner(c)}},
                                 {{0, 2}, {1, 2}, {2, 0}, {2, 1}});
    if (!f) return false;
    t.fam[c] = {(*f)[0], (*f)[1], (*f)[2]};
  }
  return true;
}

inline void fill_bar(const Graph& h, CornerTriple& t) {
  VertexSet s{t.alpha, t.beta, t.gamma};
  std::sort(s.begin(), s.end());
  auto r = check_strongly_incomparable(h, s);
  t.bar.clear();
  if (!r.ok) return;
  for (int c = 0; c < 3; ++c)
    for (auto [u, w] : r.private_nb)
      if (u == t.corner(c)) t.bar.push_back(w);
}

}  // namespace detail

// Finds (alpha, beta, gamma) in bipartition class `cls`, preferring an
// induced C6, then an induced C8, then a strongly incomparable triple with
// the three walk families.
inline CornerTriple find_corner_triple(const Graph& h, int cls = 0) {
  if (!is_connected(h) || !is_bipartite(h)) throw precondition_violated("target must be connected and bipartite");
  auto bp = bipartition(h);
  const VertexSet& side = cls == 0 ? bp.x : bp.y;
  std::optional<CornerTriple> found;
  for (int len : {6, 8}) {
    for (int first : side) {
      detail::visit_induced_cycles(h, len, first, [&](const std::vector<int>& cyc) {
        CornerTriple t;
        t.kind = len == 6 ? TripleCase::c6 : TripleCase::c8;
        t.cycle = cyc;
        t.alpha = cyc[0];
        t.beta = cyc[4];
        t.gamma = cyc[2];
        if (!detail::choose_primes(h, t.alpha, t.beta, t.alpha_p, t.beta_p)) return false;
        if (!detail::pairwise_incomparable(h, {t.alpha, t.beta, t.gamma})) return false;
        if (!detail::fill_pair_walks(h, t)) return false;
        detail::fill_bar(h, t);
        found = t;
        return true;
      });
      if (found) return *found;
    }
  }
  for (int a : side)
    for (int b : side)
      for (int c : side) {
        if (a == b || b == c || a == c) continue;
        CornerTriple t;
        t.kind = TripleCase::strong;
        t.alpha = a;
        t.beta = b;
        t.gamma = c;
        detail::fill_bar(h, t);
        if (!t.strongly_incomparable()) continue;
        if (!detail::choose_primes(h, a, b, t.alpha_p, t.beta_p)) continue;
        if (!detail::fill_pair_walks(h, t)) continue;
        if (!detail::fill_families(h, t)) continue;
        return t;
      }
  throw precondition_violated("no corner triple found (target decomposable or co-circular-arc?)");
}

// Re-checks every condition and certificate; returns the first failure or "".
inline std::string verify_corner_triple(const Graph& h, const CornerTriple& t) {
  const std::vector<int> abc{t.alpha, t.beta, t.gamma};
  for (int v : abc)
    if (v < 0 || v >= h.size()) return "corner out of range";
  if (t.alpha == t.beta || t.beta == t.gamma || t.alpha == t.gamma) return "corners not distinct";
  auto bp = bipartition(h);
  if (bp.side[t.alpha] != bp.side[t.beta] || bp.side[t.alpha] != bp.side[t.gamma]) return "corners in different classes";
  if (!h.has_edge(t.alpha, t.alpha_p) || !h.has_edge(t.beta, t.beta_p) || t.alpha_p == t.beta_p ||
      h.has_edge(t.alpha, t.beta_p) || h.has_edge(t.beta, t.alpha_p))
    return "alpha alpha', beta beta' do not induce a matching";
  if (!detail::pairwise_incomparable(h, abc)) return "corners not pairwise incomparable";
  if (!is_walk(h, t.x) || !is_walk(h, t.y) || t.x.front() != t.alpha || t.x.back() != t.beta ||
      t.y.front() != t.beta || t.y.back() != t.alpha || !walk_avoids(h, t.x, t.y))
    return "walk pair X, Y invalid";
  if (!is_walk(h, t.xp) || !is_walk(h, t.yp) || t.xp.front() != t.alpha || t.xp.back() != t.beta ||
      t.yp.front() != t.beta || t.yp.back() != t.alpha || !walk_avoids(h, t.yp, t.xp))
    return "walk pair X', Y' invalid";
  if (t.kind != TripleCase::strong) {
    const int len = t.kind == TripleCase::c6 ? 6 : 8;
    if (static_cast<int>(t.cycle.size()) != len) return "cycle has wrong length";
    if (t.w(1) != t.alpha || t.w(5) != t.beta || t.w(3) != t.gamma) return "cycle does not match corners";
    for (int i = 0; i < len; ++i)
      for (int j = i + 1; j < len; ++j) {
        bool consecutive = j == i + 1 || (i == 0 && j == len - 1);
        if (h.has_edge(t.cycle[i], t.cycle[j]) != consecutive) return "cycle is not induced";
      }
  } else {
    if (!t.strongly_incomparable()) return "corners not strongly incomparable";
    for (int c = 0; c < 3; ++c) {
      auto [o1, o2] = detail::others(c);
      const auto& f = t.fam[c];
      for (const auto& w : f)
        if (!is_walk(h, w)) return "family walk invalid";
      if (f[0].front() != t.alpha || f[0].back() != t.corner(o1) || f[1].front() != t.alpha ||
          f[1].back() != t.corner(o2) || f[2].front() != t.beta || f[2].back() != t.corner(c))
        return "family walk has wrong ends";
      if (!walk_avoids(h, f[0], f[2]) || !walk_avoids(h, f[1], f[2]) || !walk_avoids(h, f[2], f[0]) ||
          !walk_avoids(h, f[2], f[1]))
        return "family walks do not avoid each other";
    }
  }
  if (t.strongly_incomparable()) {
    for (int c = 0; c < 3; ++c)
      for (int d = 0; d < 3; ++d)
        if (h.has_edge(t.corner(d), t.bar[c]) != (c == d)) return "private neighbour is not private";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Gadgets: graphs with H-lists and named interface vertices.

struct Gadget {
  std::string kind;
  Graph g;
  std::vector<VertexSet> lists;
  std::vector<std::string> port_names;
  std::vector<int> ports;

  int add(VertexSet l) {
    lists.push_back(std::move(l));
    return g.add_vertex();
  }
  int port(std::string_view name) const {
    for (std::size_t i = 0; i < ports.size(); ++i)
      if (port_names[i] == name) return ports[i];
    throw std::out_of_range("no port " + std::string(name));
  }
  void set_port(const std::string& name, int v) {
    for (std::size_t i = 0; i < ports.size(); ++i)
      if (port_names[i] == name) {
        ports[i] = v;
        return;
      }
    port_names.push_back(name);
    ports.push_back(v);
  }
  int size() const { return g.size(); }
};

using Relation = std::set<std::vector<int>>;

inline VertexSet make_set(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Copies `part` into `into`, identifying part vertex p with into vertex i for
// every (p, i) in glue. Identified vertices must carry equal lists. Returns
// the vertex map.
inline std::vector<int> absorb(Gadget& into, const Gadget& part, const std::vector<std::pair<int, int>>& glue) {
  std::vector<int> map(part.size(), -1);
  for (auto [p, i] : glue) {
    if (part.lists[p] != into.lists[i]) throw precondition_violated("identified vertices carry different lists");
    map[p] = i;
  }
  for (int v = 0; v < part.size(); ++v)
    if (map[v] < 0) map[v] = into.add(part.lists[v]);
  for (auto [u, v] : part.g.edges()) into.g.add_edge(map[u], map[v]);
  return map;
}

// Path with the given lists; ports "in" and "out" are its endvertices.
inline Gadget list_path(std::string kind, const std::vector<VertexSet>& lists) {
  Gadget gd;
  gd.kind = std::move(kind);
  for (std::size_t i = 0; i < lists.size(); ++i) {
    int v = gd.add(lists[i]);
    if (i > 0) gd.g.add_edge(v - 1, v);
  }
  gd.set_port("in", 0);
  gd.set_port("out", gd.size() - 1);
  return gd;
}

// Identifies the output of each path gadget with the input of the next.
// joints[i] receives the vertex holding the output of part i.
inline Gadget chain(std::string kind, const std::vector<Gadget>& parts, std::vector<int>* joints = nullptr) {
  Gadget out;
  out.kind = std::move(kind);
  int cur = -1;
  for (const auto& p : parts) {
    std::vector<std::pair<int, int>> glue;
    if (cur >= 0) glue.emplace_back(p.port("in"), cur);
    auto map = absorb(out, p, glue);
    if (cur < 0) out.set_port("in", map[p.port("in")]);
    cur = map[p.port("out")];
    if (joints) joints->push_back(cur);
  }
  out.set_port("out", cur);
  return out;
}

// Appends a path of even length len with lists {a,b},{a',b'},...,{a,b} at
// port `name`, which moves to the far end.
inline void extend_port(Gadget& gd, const CornerTriple& t, const std::string& name, int len) {
  if (len <= 0) return;
  if (len % 2) throw precondition_violated("extender length must be even");
  const VertexSet ab = make_set({t.alpha, t.beta}), abp = make_set({t.alpha_p, t.beta_p});
  int v = gd.port(name);
  if (gd.lists[v] != ab) throw precondition_violated("extender attached to a vertex whose list is not {alpha,beta}");
  for (int i = 1; i <= len; ++i) {
    int w = gd.add(i % 2 ? abp : ab);
    gd.g.add_edge(v, w);
    v = w;
  }
  gd.set_port(name, v);
}

// Extends port `name` until its distance to port `other` is at least min_dist.
inline void pad_port(Gadget& gd, const CornerTriple& t, const std::string& name, const std::string& other, int min_dist) {
  int d = distance(gd.g, gd.port(name), gd.port(other));
  if (d >= min_dist) return;
  int extra = min_dist - d;
  extend_port(gd, t, name, extra + (extra % 2));
}

inline Gadget extender(const CornerTriple& t, int len) {
  Gadget gd = list_path("extender", {make_set({t.alpha, t.beta})});
  extend_port(gd, t, "out", len);
  return gd;
}

// Realizable tuples of port values (in port order), by asking the exact
// solver once per tuple of the ports' lists.
inline Relation gadget_relation(const Graph& h, const Gadget& gd, std::vector<int> ports = {}) {
  if (ports.empty()) ports = gd.ports;
  ListInstance inst{gd.g, h, gd.lists};
  Relation rel;
  std::vector<int> tuple(ports.size());
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == ports.size()) {
      auto r = brute_force(lhom_to_bcsp(inst));
      if (r.satisfiable) rel.insert(tuple);
      return;
    }
    for (int a : gd.lists[ports[i]]) {
      tuple[i] = a;
      inst.lists[ports[i]] = {a};
      rec(i + 1);
    }
    inst.lists[ports[i]] = gd.lists[ports[i]];
  };
  rec(0);
  return rel;
}

// The path P(D): the i-th list holds the i-th vertices of all walks. Walks in
// A must avoid walks in B (and the converse when mutual).
inline Gadget build_walk_path(const Graph& h, const std::vector<Walk>& a, const std::vector<Walk>& b, bool mutual,
                              std::string kind = "walk-path") {
  if (a.empty() && b.empty()) throw precondition_violated("no walks");
  const std::size_t len = (a.empty() ? b : a).front().size();
  std::set<int> sa, sb, ta, tb;
  for (const auto* part : {&a, &b})
    for (const auto& w : *part) {
      if (w.size() != len || len < 2) throw precondition_violated("walks must have equal positive length");
      if (!is_walk(h, w)) throw precondition_violated("not a walk in the target");
    }
  for (const auto& w : a) {
    sa.insert(w.front());
    ta.insert(w.back());
  }
  for (const auto& w : b) {
    sb.insert(w.front());
    tb.insert(w.back());
  }
  for (int v : sa)
    if (sb.count(v)) throw precondition_violated("start sets intersect");
  for (int v : ta)
    if (tb.count(v)) throw precondition_violated("end sets intersect");
  for (const auto& p : a)
    for (const auto& q : b) {
      if (!walk_avoids(h, p, q)) throw precondition_violated("a walk of A does not avoid a walk of B");
      if (mutual && !walk_avoids(h, q, p)) throw precondition_violated("a walk of B does not avoid a walk of A");
    }
  std::vector<VertexSet> lists(len);
  for (std::size_t i = 0; i < len; ++i) {
    std::vector<int> col;
    for (const auto* part : {&a, &b})
      for (const auto& w : *part) col.push_back(w[i]);
    lists[i] = make_set(col);
  }
  return list_path(std::move(kind), lists);
}

namespace detail {

inline Gadget family_path(const Graph& h, const CornerTriple& t, int c, bool rev) {
  if (t.kind != TripleCase::strong) throw precondition_violated("walk families only exist for strongly incomparable triples");
  const auto& f = t.fam[c];
  if (!rev) return build_walk_path(h, {f[0], f[1]}, {f[2]}, true);
  return build_walk_path(h, {reversed(f[0]), reversed(f[1])}, {reversed(f[2])}, true);
}

// Lists {w_i, ...} of the C6 or C8 in the triple.
inline VertexSet ws(const CornerTriple& t, std::initializer_list<int> idx) {
  std::vector<int> v;
  for (int i : idx) v.push_back(t.w(i));
  return make_set(v);
}

inline void rename_ports(Gadget& gd, const std::string& in, const std::string& out) {
  for (auto& n : gd.port_names) {
    if (n == "in") n = in;
    else if (n == "out") n = out;
  }
}

}  // namespace detail

// NAND_2 = {aa, ab, ba} on ports (x, y): a path of length >= g.
inline Gadget build_nand2(const Graph& h, const CornerTriple& t, int g = 0) {
  Gadget gd;
  using detail::ws;
  if (t.kind == TripleCase::c6) {
    gd = list_path("nand2", {ws(t, {1, 5}), ws(t, {2, 6}), ws(t, {1, 3}), ws(t, {2, 4}), ws(t, {1, 5})});
  } else if (t.kind == TripleCase::c8) {
    gd = list_path("nand2", {ws(t, {1, 5}), ws(t, {2, 4, 8}), ws(t, {1, 3, 7}), ws(t, {2, 6}), ws(t, {1, 5})});
  } else {
    gd = chain("nand2", {detail::family_path(h, t, 2, false), detail::family_path(h, t, 0, true)});
  }
  detail::rename_ports(gd, "x", "y");
  pad_port(gd, t, "y", "x", g);
  return gd;
}

// R_c on ports (x, y): {a,b} x {a,b,c} minus (alpha, corner c). y is the
// vertex with list {alpha, beta, gamma}.
inline Gadget build_r(const Graph& h, const CornerTriple& t, int c) {
  using detail::ws;
  Gadget gd;
  if (t.kind == TripleCase::c6) {
    // Arms of the C6 OR_3 tree, listed from the leaf to the centre.
    if (c == 0) gd = list_path("R", {ws(t, {1, 5}), ws(t, {4, 6}), ws(t, {3, 5}), ws(t, {2, 4}), ws(t, {1, 3, 5})});
    if (c == 1) gd = list_path("R", {ws(t, {1, 5}), ws(t, {4, 6}), ws(t, {1, 3}), ws(t, {2, 4}), ws(t, {1, 3, 5})});
    if (c == 2) gd = list_path("R", {ws(t, {1, 5}), ws(t, {4, 6}), ws(t, {1, 3, 5})});
  } else if (t.kind == TripleCase::c8) {
    if (c == 0)
      gd = list_path("R", {ws(t, {1, 5}), ws(t, {4, 8}), ws(t, {5, 7}), ws(t, {4, 6}), ws(t, {3, 5}), ws(t, {2, 4}),
                           ws(t, {1, 3, 5})});
    if (c == 1) gd = list_path("R", {ws(t, {1, 5}), ws(t, {4, 8}), ws(t, {1, 3}), ws(t, {2, 4}), ws(t, {1, 3, 5})});
    if (c == 2) gd = list_path("R", {ws(t, {1, 5}), ws(t, {6, 8}), ws(t, {5, 7}), ws(t, {4, 6, 8}), ws(t, {1, 3, 5})});
  } else {
    int a = detail::others(c).first;
    gd = chain("R", {build_walk_path(h, {t.x}, {t.y}, false), detail::family_path(h, t, a, false),
                     detail::family_path(h, t, c, true), detail::family_path(h, t, c, false)});
  }
  detail::rename_ports(gd, "x", "y");
  return gd;
}

// OR_k = {alpha,beta}^k minus {alpha}^k on ports x1..xk; a tree whose
// interface vertices are leaves and whose degree-3 vertices are pairwise at
// distance >= g.
inline Gadget build_or_k(const Graph& h, const CornerTriple& t, int k, int g = 0) {
  if (k < 2) throw precondition_violated("OR_k needs k >= 2");
  if (k <= 3) {
    Gadget gd;
    gd.kind = "or" + std::to_string(k);
    int centre = -1;
    for (int c = 0; c < 3; ++c) {
      Gadget arm = build_r(h, t, c);
      std::vector<std::pair<int, int>> glue;
      if (centre >= 0) glue.emplace_back(arm.port("y"), centre);
      auto map = absorb(gd, arm, glue);
      centre = map[arm.port("y")];
      gd.set_port("x" + std::to_string(c + 1), map[arm.port("x")]);
    }
    if (k == 2) {
      int x3 = gd.port("x3");
      gd.lists[x3] = {t.alpha};
      gd.port_names.pop_back();
      gd.ports.pop_back();
    }
    return gd;
  }
  Gadget prev = build_or_k(h, t, k - 1, g);
  Gadget nand = build_nand2(h, t, g);
  Gadget or3 = build_or_k(h, t, 3, g);
  Gadget gd;
  gd.kind = "or" + std::to_string(k);
  auto mp = absorb(gd, prev, {});
  auto mn = absorb(gd, nand, {{nand.port("x"), mp[prev.port("x" + std::to_string(k - 1))]}});
  auto mo = absorb(gd, or3, {{or3.port("x1"), mn[nand.port("y")]}});
  for (int i = 1; i <= k - 2; ++i) gd.set_port("x" + std::to_string(i), mp[prev.port("x" + std::to_string(i))]);
  gd.set_port("x" + std::to_string(k - 1), mo[or3.port("x2")]);
  gd.set_port("x" + std::to_string(k), mo[or3.port("x3")]);
  return gd;
}

// Shortest path D_{a/b} with L(x) = S and L(y) = {alpha, beta} satisfying the
// distinguisher contract. BFS over profiles: for every s in S the set of
// vertices reachable at the current end when x is mapped to s.
inline Gadget synthesize_distinguisher(const Graph& h, const CornerTriple& t, const VertexSet& s, int a, int b,
                                       int g = 0, long max_states = 2'000'000) {
  if (a == b) throw precondition_violated("distinguisher needs a != b");
  auto ia = std::find(s.begin(), s.end(), a), ib = std::find(s.begin(), s.end(), b);
  if (ia == s.end() || ib == s.end()) throw precondition_violated("a and b must lie in S");
  if (h.size() > 64) throw size_cap_exceeded("distinguisher synthesis supports at most 64 target vertices");
  const int m = static_cast<int>(s.size());
  const int pa = static_cast<int>(ia - s.begin()), pb = static_cast<int>(ib - s.begin());
  std::vector<std::uint64_t> nb(h.size());
  for (int v = 0; v < h.size(); ++v) nb[v] = h.neighbor_mask(v);
  auto nbr = [&](std::uint64_t r) {
    std::uint64_t out = 0;
    for (; r; r &= r - 1) out |= nb[lowbit(r)];
    return out;
  };
  const std::uint64_t al = std::uint64_t{1} << t.alpha, be = std::uint64_t{1} << t.beta, ab = al | be;
  using Profile = std::vector<std::uint64_t>;
  auto goal = [&](const Profile& r) {
    std::vector<std::uint64_t> e(m);
    for (int i = 0; i < m; ++i) e[i] = nbr(r[i]) & ab;
    if ((e[pa] & al) == 0 || (e[pa] & be) != 0 || (e[pb] & be) == 0) return false;
    for (int i = 0; i < m; ++i)
      if (e[i] == 0) return false;
    return true;
  };
  std::map<Profile, int> seen;
  std::vector<Profile> states;
  std::vector<int> parent;
  std::vector<std::uint64_t> via;
  Profile init(m);
  for (int i = 0; i < m; ++i) init[i] = std::uint64_t{1} << s[i];
  states.push_back(init);
  parent.push_back(-1);
  via.push_back(0);
  seen[init] = 0;
  for (std::size_t head = 0; head < states.size(); ++head) {
    const Profile cur = states[head];
    if (goal(cur)) {
      std::vector<VertexSet> lists;
      for (int x = static_cast<int>(head); x > 0; x = parent[x]) lists.push_back(mask_to_vector(via[x]));
      lists.push_back(s);
      std::reverse(lists.begin(), lists.end());
      lists.push_back(make_set({t.alpha, t.beta}));
      Gadget gd = list_path("distinguisher", lists);
      detail::rename_ports(gd, "x", "y");
      pad_port(gd, t, "y", "x", g);
      return gd;
    }
    std::uint64_t u = 0;
    for (auto r : cur) u |= nbr(r);
    if (popcount64(u) > 24) throw size_cap_exceeded("distinguisher synthesis branching too wide");
    for (std::uint64_t l = (0 - u) & u; l != 0; l = (l - u) & u) {
      Profile nx(m);
      bool dead = false;
      for (int i = 0; i < m && !dead; ++i) {
        nx[i] = nbr(cur[i]) & l;
        dead = nx[i] == 0;
      }
      if (dead || seen.count(nx)) continue;
      seen[nx] = static_cast<int>(states.size());
      states.push_back(nx);
      parent.push_back(static_cast<int>(head));
      via.push_back(l);
      if (static_cast<long>(states.size()) > max_states)
        throw budget_exceeded("distinguisher synthesis explored " + std::to_string(states.size()) + " states");
    }
  }
  throw precondition_violated("no distinguisher exists for this S, a, b");
}

// Detector F~_u on ports (x_u, c_u).
inline Gadget build_detector(const Graph& h, const CornerTriple& t, const VertexSet& s, int u, int g = 0) {
  const int k = static_cast<int>(s.size());
  if (k < 2) throw precondition_violated("detector needs |S| >= 2");
  if (std::find(s.begin(), s.end(), u) == s.end()) throw precondition_violated("u must lie in S");
  Gadget gd = build_or_k(h, t, k, g);
  gd.kind = "detector";
  int xu = -1, i = 1;
  for (int w : s) {
    if (w == u) continue;
    Gadget d = synthesize_distinguisher(h, t, s, u, w, g);
    std::vector<std::pair<int, int>> glue{{d.port("y"), gd.port("x" + std::to_string(i))}};
    if (xu >= 0) glue.emplace_back(d.port("x"), xu);
    auto map = absorb(gd, d, glue);
    xu = map[d.port("x")];
    ++i;
  }
  int cu = gd.port("x" + std::to_string(k));
  gd.port_names.clear();
  gd.ports.clear();
  gd.set_port("x_u", xu);
  gd.set_port("c_u", cu);
  return gd;
}

// P_u on ports (c, y): y = gamma forces c = alpha; length >= g.
inline Gadget build_pu(const Graph& h, const CornerTriple& t, int g = 0) {
  using detail::ws;
  Gadget gd;
  if (t.kind == TripleCase::c6) {
    gd = list_path("P_u", {ws(t, {1, 5}), ws(t, {2, 6}), ws(t, {1, 3, 5})});
  } else if (t.kind == TripleCase::c8) {
    gd = list_path("P_u", {ws(t, {1, 5}), ws(t, {2, 6}), ws(t, {1, 3, 7}), ws(t, {2, 4, 6, 8}), ws(t, {1, 3, 5})});
  } else {
    gd = chain("P_u", {detail::family_path(h, t, 0, false), detail::family_path(h, t, 2, true),
                       detail::family_path(h, t, 2, false)});
  }
  detail::rename_ports(gd, "c", "y");
  pad_port(gd, t, "c", "y", g);
  return gd;
}

// Assignment gadget A_v on ports (x, y).
inline Gadget build_assignment(const Graph& h, const CornerTriple& t, const VertexSet& s, int v, int g = 0) {
  if (s.size() < 2) throw precondition_violated("assignment gadget needs |S| >= 2");
  if (std::find(s.begin(), s.end(), v) == s.end()) throw precondition_violated("v must lie in S");
  Gadget gd;
  gd.kind = "assignment";
  int x = -1, y = -1;
  for (int u : s) {
    if (u == v) continue;
    Gadget f = build_detector(h, t, s, u, g);
    Gadget pu = build_pu(h, t, g);
    auto mp = absorb(f, pu, {{pu.port("c"), f.port("c_u")}});
    int yu = mp[pu.port("y")];
    std::vector<std::pair<int, int>> glue;
    if (x >= 0) glue = {{f.port("x_u"), x}, {yu, y}};
    auto map = absorb(gd, f, glue);
    x = map[f.port("x_u")];
    y = map[yu];
  }
  gd.set_port("x", x);
  gd.set_port("y", y);
  return gd;
}

// Switching gadget on ports (p, q, r) with dist(p,q), dist(q,r) >= g/2.
inline Gadget build_switching(const Graph& h, const CornerTriple& t, int g = 0) {
  using detail::ws;
  Gadget gd;
  int q = -1;
  if (t.kind != TripleCase::strong) {
    gd = list_path("switching", {ws(t, {1, 5}), ws(t, {2, 4}), ws(t, {1, 3, 5}), ws(t, {2, 4}), ws(t, {1, 5})});
    q = 2;
  } else {
    std::vector<int> joints;
    gd = chain("switching",
               {detail::family_path(h, t, 1, false), detail::family_path(h, t, 0, true),
                build_walk_path(h, {t.yp}, {t.xp}, false)},
               &joints);
    q = joints[0];
  }
  detail::rename_ports(gd, "p", "r");
  gd.set_port("q", q);
  const int half = (g + 1) / 2;
  pad_port(gd, t, "p", "q", half);
  pad_port(gd, t, "r", "q", half);
  // Keep the port order p, q, r.
  Gadget out = gd;
  out.port_names = {"p", "q", "r"};
  out.ports = {gd.port("p"), gd.port("q"), gd.port("r")};
  return out;
}

// ---------------------------------------------------------------------------
// Contract checks. Each returns the names of the violated properties.

namespace detail {

inline bool is_tree(const Graph& g) { return is_forest(g) && (g.size() == 0 || is_connected(g)); }

inline std::vector<int> high_degree(const Graph& g) {
  std::vector<int> out;
  for (int v = 0; v < g.size(); ++v)
    if (g.degree(v) >= 3) out.push_back(v);
  return out;
}

// Degree-3 vertices pairwise at distance >= g and at distance >= g from each
// vertex in `far`.
inline bool spaced(const Graph& gr, const std::vector<int>& far, int g) {
  auto hi = high_degree(gr);
  for (int a : hi) {
    auto d = bfs_distances(gr, a, g);
    for (int b : hi)
      if (b != a && d[b] < g) return false;
    for (int f : far)
      if (f != a && d[f] < g) return false;
  }
  return true;
}

inline bool has(const Relation& r, std::vector<int> t) { return r.count(t) > 0; }

}  // namespace detail

inline std::vector<std::string> check_nand2(const Graph& h, const CornerTriple& t, const Gadget& gd, int g) {
  std::vector<std::string> bad;
  const int a = t.alpha, b = t.beta;
  Relation want{{a, a}, {a, b}, {b, a}};
  if (gadget_relation(h, gd) != want) bad.push_back("relation");
  if (!detail::is_tree(gd.g) || gd.g.max_degree() > 2) bad.push_back("path");
  if (distance(gd.g, gd.port("x"), gd.port("y")) < g) bad.push_back("length");
  return bad;
}

inline std::vector<std::string> check_or_k(const Graph& h, const CornerTriple& t, const Gadget& gd, int k, int g) {
  std::vector<std::string> bad;
  Relation want;
  std::vector<int> tup(k);
  for (int m = 1; m < (1 << k); ++m) {
    for (int i = 0; i < k; ++i) tup[i] = (m >> i) & 1 ? t.beta : t.alpha;
    want.insert(tup);
  }
  if (gadget_relation(h, gd) != want) bad.push_back("relation");
  if (!detail::is_tree(gd.g)) bad.push_back("tree");
  if (gd.g.max_degree() > 3) bad.push_back("max-degree");
  for (int p : gd.ports)
    if (gd.g.degree(p) != 1) bad.push_back("interface-leaf");
  if (!detail::spaced(gd.g, {}, g)) bad.push_back("degree3-spacing");
  return bad;
}

inline std::vector<std::string> check_distinguisher(const Graph& h, const CornerTriple& t, const VertexSet& s, int a,
                                                    int b, const Gadget& gd, int g) {
  std::vector<std::string> bad;
  const int x = gd.port("x"), y = gd.port("y");
  if (gd.lists[x] != s || gd.lists[y] != make_set({t.alpha, t.beta})) bad.push_back("D1");
  auto rel = gadget_relation(h, gd);
  if (!detail::has(rel, {a, t.alpha})) bad.push_back("D2");
  if (!detail::has(rel, {b, t.beta})) bad.push_back("D3");
  for (int c : s)
    if (c != a && c != b && !detail::has(rel, {c, t.alpha}) && !detail::has(rel, {c, t.beta})) bad.push_back("D4");
  if (detail::has(rel, {a, t.beta})) bad.push_back("D5");
  if (!detail::is_tree(gd.g) || gd.g.max_degree() > 2) bad.push_back("path");
  if (distance(gd.g, x, y) < g) bad.push_back("length");
  return bad;
}

inline std::vector<std::string> check_detector(const Graph& h, const CornerTriple& t, const VertexSet& s, int u,
                                               const Gadget& gd, int g) {
  std::vector<std::string> bad;
  const int xu = gd.port("x_u"), cu = gd.port("c_u");
  const int k = static_cast<int>(s.size());
  if (gd.lists[xu] != s || gd.lists[cu] != make_set({t.alpha, t.beta})) bad.push_back("F1");
  auto rel = gadget_relation(h, gd);
  for (int v : s)
    if (!detail::has(rel, {v, t.beta})) bad.push_back("F2");
  for (int v : s)
    if (v != u && !detail::has(rel, {v, t.alpha})) bad.push_back("F3");
  if (detail::has(rel, {u, t.alpha})) bad.push_back("F4");
  if (!is_forest_without(gd.g, {xu}) || !is_connected(gd.g)) bad.push_back("F5");
  if (gd.g.degree(xu) != k - 1 || gd.g.degree(cu) != 1) bad.push_back("F6");
  for (int v = 0; v < gd.size(); ++v)
    if (v != xu && gd.g.degree(v) > 3) {
      bad.push_back("F7");
      break;
    }
  if (!girth_at_least(gd.g, g)) bad.push_back("girth");
  if (!detail::spaced(gd.g, {xu}, g)) bad.push_back("degree3-spacing");
  return bad;
}

inline std::vector<std::string> check_assignment(const Graph& h, const CornerTriple& t, const VertexSet& s, int v,
                                                 const Gadget& gd, int g) {
  std::vector<std::string> bad;
  const int x = gd.port("x"), y = gd.port("y");
  const int k = static_cast<int>(s.size());
  if (gd.lists[x] != s || gd.lists[y] != make_set({t.alpha, t.beta, t.gamma})) bad.push_back("A1");
  auto rel = gadget_relation(h, gd);
  for (int u : s)
    if (!detail::has(rel, {u, t.alpha}) || !detail::has(rel, {u, t.beta})) bad.push_back("A2");
  if (!detail::has(rel, {v, t.gamma})) bad.push_back("A3");
  for (int u : s)
    if (u != v && detail::has(rel, {u, t.gamma})) bad.push_back("A4");
  if (!is_forest_without(gd.g, {x}) || !is_connected(gd.g)) bad.push_back("A5");
  if (gd.g.degree(x) != (k - 1) * (k - 1) || gd.g.degree(y) != k - 1) bad.push_back("A6");
  for (int w = 0; w < gd.size(); ++w)
    if (w != x && w != y && gd.g.degree(w) > 3) {
      bad.push_back("A7");
      break;
    }
  if (!girth_at_least(gd.g, g)) bad.push_back("girth");
  if (!detail::spaced(gd.g, {x, y}, g)) bad.push_back("degree3-spacing");
  if (distance(gd.g, x, y) < g) bad.push_back("x-y-distance");
  return bad;
}

inline std::vector<std::string> check_switching(const Graph& h, const CornerTriple& t, const Gadget& gd, int g) {
  std::vector<std::string> bad;
  const int p = gd.port("p"), q = gd.port("q"), r = gd.port("r");
  const VertexSet ab = make_set({t.alpha, t.beta});
  if (gd.lists[p] != ab || gd.lists[r] != ab || gd.lists[q] != make_set({t.alpha, t.beta, t.gamma}))
    bad.push_back("S1");
  auto rel = gadget_relation(h, gd);  // tuples (p, q, r)
  for (int a : ab)
    if (!detail::has(rel, {a, t.alpha, a}) && !detail::has(rel, {a, t.beta, a})) bad.push_back("S2");
  if (!detail::has(rel, {t.alpha, t.gamma, t.beta})) bad.push_back("S3");
  if (detail::has(rel, {t.alpha, t.alpha, t.beta}) || detail::has(rel, {t.alpha, t.beta, t.beta})) bad.push_back("S4");
  if (!detail::is_tree(gd.g) || gd.g.max_degree() > 2 || distance(gd.g, p, r) % 2) bad.push_back("even-path");
  auto bp = bipartition(gd.g);
  if (bp.side[p] != bp.side[q]) bad.push_back("q-class");
  const int half = (g + 1) / 2;
  if (distance(gd.g, p, q) < half || distance(gd.g, r, q) < half) bad.push_back("q-distance");
  return bad;
}

}  // namespace lhom
