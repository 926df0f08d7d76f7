#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "lhom/cnf.hpp"
#include "lhom/gadgets.hpp"
#include "lhom/invariants.hpp"
#include "lhom/layouts.hpp"

namespace lhom {

struct ReductionOutput {
  ListInstance instance;
  std::string mode;  // "fvs" or "ctw"
  CornerTriple triple;
  VertexSet s;
  int k = 0, p = 0, t = 0, g = 0;
  int capacity = 0;  // variables per group
  VertexSet fvs;               // fvs mode: all x_s^i
  std::vector<int> layout;     // ctw mode
  int layout_width = -1;
  std::vector<std::vector<int>> groups;          // CNF variables of each group
  std::vector<std::vector<int>> group_vertices;  // x_1^i..x_p^i (fvs mode)
  std::vector<std::vector<int>> clause_paths;    // vertices of P_C in path order
};

namespace detail {

// Largest q with 2^q <= k^p, by exact integer arithmetic (saturating at 2^62).
inline int group_capacity(int k, int p) {
  std::uint64_t pw = 1;
  const std::uint64_t lim = std::uint64_t{1} << 62;
  for (int i = 0; i < p && pw < lim; ++i) pw = pw > lim / k ? lim : pw * k;
  return 63 - std::countl_zero(pw);
}

// Mixed-radix digits of a over |S|, least significant first.
inline std::vector<int> coloring_of(std::uint64_t a, const VertexSet& s, int p) {
  std::vector<int> col(p);
  for (int i = 0; i < p; ++i) {
    col[i] = s[a % s.size()];
    a /= s.size();
  }
  return col;
}

inline std::vector<int> path_order(const Gadget& gd, int from) {
  std::vector<int> order{from};
  int prev = -1, cur = from;
  while (true) {
    int next = -1;
    for (int w : gd.g.neighbors(cur))
      if (w != prev) next = w;
    if (next < 0) break;
    order.push_back(next);
    prev = cur;
    cur = next;
  }
  return order;
}

struct SwitchItem {
  int group = 0;
  std::uint64_t assignment = 0;
};

// Switching gadgets of every clause: one per group touching the clause and
// per satisfying assignment of that group, in group then assignment order.
inline std::vector<std::vector<SwitchItem>> switch_items(const Cnf& f, int capacity) {
  std::vector<std::vector<SwitchItem>> out;
  for (const auto& c : f.clauses) {
    std::vector<SwitchItem> items;
    std::vector<int> groups;
    for (int l : c) groups.push_back((std::abs(l) - 1) / capacity);
    groups = make_set(groups);
    for (int i : groups) {
      int lo = i * capacity, hi = std::min(f.num_vars, (i + 1) * capacity);
      if (hi - lo > 20) throw size_cap_exceeded("group too large to enumerate its assignments");
      for (std::uint64_t a = 0; a < (std::uint64_t{1} << (hi - lo)); ++a) {
        bool sat = false;
        for (int l : c) {
          int v = std::abs(l) - 1;
          if (v >= lo && v < hi && (((a >> (v - lo)) & 1) != 0) == (l > 0)) sat = true;
        }
        if (sat) items.push_back({i, a});
      }
    }
    out.push_back(std::move(items));
  }
  return out;
}

inline void check_setup(const Graph& h, const CornerTriple& t, const VertexSet& s, int p, bool strong) {
  if (p < 1) throw precondition_violated("p must be at least 1");
  if (s.size() < 2) throw precondition_violated("S needs at least two vertices");
  auto why = verify_corner_triple(h, t);
  if (!why.empty()) throw precondition_violated("corner triple: " + why);
  auto inc = strong ? check_strongly_incomparable(h, s) : check_incomparable(h, s);
  if (!inc.ok) throw precondition_violated("S: " + inc.reason);
  auto bp = bipartition(h);
  for (int v : s)
    if (bp.side[v] != bp.side[t.alpha]) throw precondition_violated("S and the triple lie in different classes");
}

inline void fill_groups(ReductionOutput& out, const Cnf& f) {
  out.capacity = group_capacity(out.k, out.p);
  out.t = f.num_vars == 0 ? 0 : (f.num_vars + out.capacity - 1) / out.capacity;
  for (int i = 0; i < out.t; ++i) {
    std::vector<int> vars;
    for (int v = i * out.capacity; v < std::min(f.num_vars, (i + 1) * out.capacity); ++v) vars.push_back(v + 1);
    out.groups.push_back(vars);
  }
}

// Assignment gadget with x and y removed; xnb/ynb are their former
// neighbours in the body.
struct SplitAssignment {
  Gadget body;
  std::vector<int> xnb, ynb;
};

inline SplitAssignment split_assignment(const Gadget& a) {
  const int x = a.port("x"), y = a.port("y");
  SplitAssignment out;
  std::vector<int> map(a.size(), -1);
  for (int v = 0; v < a.size(); ++v)
    if (v != x && v != y) map[v] = out.body.add(a.lists[v]);
  for (auto [u, v] : a.g.edges())
    if (map[u] >= 0 && map[v] >= 0) out.body.g.add_edge(map[u], map[v]);
  for (int w : a.g.neighbors(x)) out.xnb.push_back(map[w]);
  for (int w : a.g.neighbors(y)) out.ynb.push_back(map[w]);
  return out;
}

}  // namespace detail

// CNF-SAT to LHom(H) with a feedback vertex set of size t*p.
inline ReductionOutput reduce_sat_fvs(const Cnf& f, const Graph& h, const CornerTriple& t, const VertexSet& s,
                                      int p) {
  detail::check_setup(h, t, s, p, false);
  ReductionOutput out;
  out.mode = "fvs";
  out.triple = t;
  out.s = s;
  out.k = static_cast<int>(s.size());
  out.p = p;
  detail::fill_groups(out, f);
  Gadget gr;
  for (int i = 0; i < out.t; ++i) {
    std::vector<int> xs;
    for (int j = 0; j < p; ++j) {
      int v = gr.add(s);
      gr.g.set_label(v, "x" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
      xs.push_back(v);
      out.fvs.push_back(v);
    }
    out.group_vertices.push_back(xs);
  }
  std::map<int, Gadget> cache;
  auto assignment = [&](int v) -> const Gadget& {
    auto it = cache.find(v);
    if (it == cache.end()) it = cache.emplace(v, build_assignment(h, t, s, v)).first;
    return it->second;
  };
  const Gadget sw = build_switching(h, t);
  const auto torder = detail::path_order(sw, sw.port("p"));
  auto items = detail::switch_items(f, out.capacity);
  for (std::size_t c = 0; c < items.size(); ++c) {
    const std::string cn = std::to_string(c + 1);
    int xc = gr.add({t.alpha_p}), yc = gr.add({t.beta_p});
    gr.g.set_label(xc, "xC" + cn);
    gr.g.set_label(yc, "yC" + cn);
    std::vector<int> path{xc};
    int prev_r = -1;
    for (std::size_t j = 0; j < items[c].size(); ++j) {
      const auto& it = items[c][j];
      std::vector<std::pair<int, int>> glue;
      if (prev_r >= 0) glue.emplace_back(sw.port("p"), prev_r);
      auto map = absorb(gr, sw, glue);
      if (prev_r < 0) gr.g.add_edge(xc, map[sw.port("p")]);
      for (std::size_t z = prev_r < 0 ? 0 : 1; z < torder.size(); ++z) path.push_back(map[torder[z]]);
      int q = map[sw.port("q")];
      gr.g.set_label(q, "q" + cn + "_" + std::to_string(j + 1));
      auto col = detail::coloring_of(it.assignment, s, p);
      for (int z = 0; z < p; ++z) {
        const Gadget& a = assignment(col[z]);
        absorb(gr, a, {{a.port("x"), out.group_vertices[it.group][z]}, {a.port("y"), q}});
      }
      prev_r = map[sw.port("r")];
    }
    gr.g.add_edge(prev_r < 0 ? xc : prev_r, yc);
    path.push_back(yc);
    out.clause_paths.push_back(path);
  }
  out.instance = ListInstance{std::move(gr.g), h, std::move(gr.lists)};
  return out;
}

// CNF-SAT to LHom(H) on a graph of the sparse class C_g, with a linear layout
// of width t*p plus a constant depending on g and H.
inline ReductionOutput reduce_sat_ctw(const Cnf& f, const Graph& h, const CornerTriple& t, const VertexSet& s, int p,
                                      int g) {
  detail::check_setup(h, t, s, p, true);
  if (g < 3) throw precondition_violated("g must be at least 3");
  ReductionOutput out;
  out.mode = "ctw";
  out.triple = t;
  out.s = s;
  out.k = static_cast<int>(s.size());
  out.p = p;
  out.g = g;
  detail::fill_groups(out, f);
  const int k1 = out.k - 1;
  const int per_use = k1 * k1;
  const int len = std::max(2, g + g % 2);  // even path length >= g
  VertexSet sp;
  for (auto [u, w] : check_strongly_incomparable(h, s).private_nb) sp.push_back(w);
  sp = make_set(sp);
  const VertexSet abc = make_set({t.alpha, t.beta, t.gamma});
  const bool case_one = t.strongly_incomparable();
  if (!case_one && t.kind == TripleCase::strong) throw precondition_violated("triple case unsupported");

  Gadget gr;
  std::vector<int> layout;
  auto items = detail::switch_items(f, out.capacity);

  // x-vertex copies, joined by paths alternating S' and S.
  std::vector<std::vector<int>> uses(out.t, std::vector<int>(p, 0));
  for (const auto& cl : items)
    for (const auto& it : cl)
      for (int z = 0; z < p; ++z) ++uses[it.group][z];
  std::vector<std::vector<std::vector<int>>> copies(out.t, std::vector<std::vector<int>>(p));
  std::vector<std::vector<std::vector<std::vector<int>>>> inner(out.t, std::vector<std::vector<std::vector<int>>>(p));
  for (int i = 0; i < out.t; ++i)
    for (int z = 0; z < p; ++z) {
      int d = std::max(1, uses[i][z] * per_use);
      for (int j = 0; j < d; ++j) {
        int v = gr.add(s);
        gr.g.set_label(v, "x" + std::to_string(i + 1) + "_" + std::to_string(z + 1) + "_" + std::to_string(j + 1));
        copies[i][z].push_back(v);
      }
      inner[i][z].resize(d);
      for (int j = 0; j + 1 < d; ++j) {
        int prev = copies[i][z][j];
        for (int e = 1; e < len; ++e) {
          int w = gr.add(e % 2 ? sp : s);
          gr.g.add_edge(prev, w);
          inner[i][z][j].push_back(w);
          prev = w;
        }
        gr.g.add_edge(prev, copies[i][z][j + 1]);
      }
      if (uses[i][z] == 0) layout.push_back(copies[i][z][0]);
    }
  std::vector<std::vector<int>> next_use(out.t, std::vector<int>(p, 0));

  std::map<int, detail::SplitAssignment> cache;
  auto assignment = [&](int v) -> const detail::SplitAssignment& {
    auto it = cache.find(v);
    if (it == cache.end()) it = cache.emplace(v, detail::split_assignment(build_assignment(h, t, s, v, g))).first;
    return it->second;
  };
  const Gadget sw = build_switching(h, t, g);
  const auto torder = detail::path_order(sw, sw.port("p"));
  const int qpos = static_cast<int>(std::find(torder.begin(), torder.end(), sw.port("q")) - torder.begin());

  // Places the z-th assignment gadget of a q-vertex: its x-copies with their
  // outgoing paths, then its body. Returns the body's y-neighbours.
  auto place_gadget = [&](const detail::SwitchItem& it, int v, int z) {
    const auto& sa = assignment(v);
    int u = next_use[it.group][z]++;
    const auto& cp = copies[it.group][z];
    for (int j = 0; j < per_use; ++j) {
      int idx = u * per_use + j;
      layout.push_back(cp[idx]);
      for (int w : inner[it.group][z][idx]) layout.push_back(w);
    }
    auto map = absorb(gr, sa.body, {});
    for (int w = 0; w < sa.body.size(); ++w) layout.push_back(map[w]);
    for (int j = 0; j < per_use; ++j) gr.g.add_edge(map[sa.xnb[j]], cp[u * per_use + j]);
    std::vector<int> ys;
    for (int w : sa.ynb) ys.push_back(map[w]);
    return ys;
  };

  // Path from `from` of length `len` with alternating lists; returns the end.
  auto block = [&](int from, const VertexSet& odd, const VertexSet& even, const std::string& end_label) {
    int prev = from;
    for (int e = 1; e <= len; ++e) {
      int w = gr.add(e % 2 ? odd : even);
      gr.g.add_edge(prev, w);
      if (e < len) layout.push_back(w);
      prev = w;
    }
    gr.g.set_label(prev, end_label);
    return prev;
  };

  for (std::size_t c = 0; c < items.size(); ++c) {
    const std::string cn = std::to_string(c + 1);
    int xc = gr.add({t.alpha_p}), yc = gr.add({t.beta_p});
    gr.g.set_label(xc, "xC" + cn);
    gr.g.set_label(yc, "yC" + cn);
    layout.push_back(xc);
    std::vector<int> path{xc};
    int prev = xc;  // last vertex on P_C
    bool first = true;
    for (std::size_t j = 0; j < items[c].size(); ++j) {
      const auto& it = items[c][j];
      const std::string qn = "q" + cn + "_" + std::to_string(j + 1);
      auto col = detail::coloring_of(it.assignment, s, p);
      for (int pos = 0; pos < static_cast<int>(torder.size()); ++pos) {
        if (pos == 0 && !first) continue;  // shared with the previous output
        if (pos != qpos) {
          int v = gr.add(sw.lists[torder[pos]]);
          gr.g.add_edge(prev, v);
          layout.push_back(v);
          path.push_back(v);
          prev = v;
          continue;
        }
        if (case_one) {
          int q0 = gr.add(abc);
          gr.g.set_label(q0, qn + "_0");
          gr.g.add_edge(prev, q0);
          layout.push_back(q0);
          path.push_back(q0);
          int cur = q0;
          for (int z = 0; z < p; ++z) {
            std::vector<int> ys;
            for (int e = 0; e < k1; ++e) {
              int qi = z * k1 + e + 1;
              if (e == 0) ys = place_gadget(it, col[z], z);
              cur = block(cur, sp, abc, qn + "_" + std::to_string(qi));
              layout.push_back(cur);
              path.push_back(cur);
              gr.g.add_edge(cur, ys[e]);
            }
          }
          cur = block(cur, sp, abc, qn + "_" + std::to_string(p * k1 + 1));
          layout.push_back(cur);
          path.push_back(cur);
          prev = cur;
        } else {
          int q = gr.add(abc);
          gr.g.set_label(q, qn);
          gr.g.add_edge(prev, q);
          layout.push_back(q);
          path.push_back(q);
          using detail::ws;
          std::vector<VertexSet> prefix =
              t.kind == TripleCase::c6
                  ? std::vector<VertexSet>{ws(t, {2, 6}), ws(t, {3, 5})}
                  : std::vector<VertexSet>{ws(t, {2, 6, 8}), ws(t, {3, 7}), ws(t, {2, 6}), ws(t, {3, 5})};
          int cur = q;
          for (const auto& l : prefix) {
            int w = gr.add(l);
            gr.g.add_edge(cur, w);
            layout.push_back(w);
            cur = w;
          }
          const VertexSet odd = ws(t, {2, 6}), even = ws(t, {3, 5});
          for (int z = 0; z < p; ++z) {
            std::vector<int> ys;
            for (int e = 0; e < k1; ++e) {
              int qi = z * k1 + e + 1;
              if (e == 0) ys = place_gadget(it, col[z], z);
              cur = block(cur, odd, even, qn + "_" + std::to_string(qi));
              layout.push_back(cur);
              gr.g.add_edge(cur, ys[e]);
            }
          }
          prev = q;
        }
      }
      first = false;
    }
    gr.g.add_edge(prev, yc);
    layout.push_back(yc);
    path.push_back(yc);
    out.clause_paths.push_back(path);
  }
  out.layout = std::move(layout);
  out.instance = ListInstance{std::move(gr.g), h, std::move(gr.lists)};
  if (!is_permutation_of_vertices(out.instance.g, out.layout)) throw std::logic_error("ctw layout is not a permutation");
  out.layout_width = layout_width(out.instance.g, out.layout);
  return out;
}

// Default parameters: S is a maximum incomparable set (fvs) or a maximum
// strongly incomparable set (ctw), and the triple lies in the class of S.
struct ReductionSetup {
  CornerTriple triple;
  VertexSet s;
};

inline ReductionSetup default_setup(const Graph& h, bool strong) {
  if (!is_connected(h) || !is_bipartite(h)) throw precondition_violated("target must be connected and bipartite");
  auto rep = strong ? invariant_mim(h) : invariant_i(h);
  ReductionSetup out;
  out.s = make_set(rep.set1);
  auto bp = bipartition(h);
  out.triple = find_corner_triple(h, out.s.empty() ? 0 : bp.side[out.s[0]]);
  return out;
}

// Largest excess of the emitted layout width over t*p on a fixed family of
// random formulas; cached per (H, S, p, g).
inline int measure_ctw_constant(const Graph& h, const CornerTriple& t, const VertexSet& s, int p, int g,
                                int samples = 12) {
  static std::map<std::string, int> cache;
  std::string key = std::to_string(p) + "/" + std::to_string(g) + "/" + std::to_string(t.alpha) + "/";
  for (int v : s) key += std::to_string(v) + ",";
  for (auto [u, v] : h.edges()) key += std::to_string(u) + "-" + std::to_string(v) + ";";
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::mt19937_64 rng(0xC0FFEE);
  int best = 0;
  for (int i = 0; i < samples; ++i) {
    int n = 1 + static_cast<int>(rng() % 10), m = 1 + static_cast<int>(rng() % 15);
    Cnf f = random_cnf(rng, n, m);
    auto r = reduce_sat_ctw(f, h, t, s, p, g);
    best = std::max(best, r.layout_width - r.t * r.p);
  }
  cache[key] = best;
  return best;
}

}  // namespace lhom
