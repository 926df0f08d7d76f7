#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "common.hpp"
#include "csp.hpp"
#include "field.hpp"
#include "graph.hpp"
#include "instance.hpp"
#include "layouts.hpp"

namespace lhom {

struct StepStats {
  int position = 0;
  int frontier = 0;          // |X_i|
  std::size_t before = 0;    // table size before reduction
  std::size_t after = 0;     // table size after reduction
  double log2_degree_bound = 0;  // log2 of prod (deg + 1)^K
  double log2_width_bound = 0;   // K * width
  bool within_bounds = true;
};

struct SolveStats {
  std::string engine;
  long nodes = 0;
  int k = 0;
  int width = 0;
  std::size_t max_table = 0;
  long bound_violations = 0;
  std::vector<StepStats> steps;
  double seconds = 0;
};

struct SolveResult {
  bool satisfiable = false;
  std::optional<std::vector<int>> assignment;  // values, one per variable
  SolveStats stats;
};

#ifdef LHOM_INJECT_FAULT
inline constexpr bool kInjectFault = true;
#else
inline constexpr bool kInjectFault = false;
#endif

namespace detail {

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace detail

// Exact search (MAC with a trail). Throws budget_exceeded when the node
// budget runs out.
inline SolveResult brute_force(const BcspInstance& input, long budget = -1, const Deadline& deadline = {}) {
  auto t0 = Clock::now();
  if (budget < 0) budget = caps().brute_nodes;
  BcspInstance b = input;
  normalize(b);
  auto c = detail::compile(b);
  detail::MacSolver solver(c);
  SolveResult r;
  r.stats.engine = "brute";
  auto sol = solver.solve(c.init, budget, deadline);
  r.stats.nodes = solver.nodes();
  if (sol) {
    r.satisfiable = true;
    std::vector<int> a(b.n);
    for (int v = 0; v < b.n; ++v) a[v] = c.values[v][(*sol)[v]];
    r.assignment = std::move(a);
  }
  r.stats.seconds = detail::seconds_since(t0);
  return r;
}

namespace detail {

// One left-to-right sweep over a layout. Step i introduces variable i (the
// model is already in layout order). Tables hold assignments of the
// frontier X_i = {j <= i : j has a neighbour after i}.
struct SweepModel {
  int n = 0;
  std::vector<std::vector<int>> values;     // candidate values of each step's variable
  std::vector<std::vector<int>> neighbors;  // step indices, sorted
  // Compatibility of (i, value index a) with an earlier neighbour (j, index b).
  std::function<bool(int, int, int, int)> compatible;
  int k = 0;
  int width = 0;
};

inline SolveResult run_sweep(const SweepModel& m, bool reduce, const Deadline& deadline) {
  SolveResult r;
  r.stats.k = m.k;
  r.stats.width = m.width;
  for (int i = 0; i < m.n; ++i)
    if (m.values[i].empty()) return r;
  std::vector<int> last(m.n, -1);
  for (int i = 0; i < m.n; ++i)
    for (int j : m.neighbors[i]) last[i] = std::max(last[i], j);

  using Row = std::vector<std::uint8_t>;
  std::vector<int> frontier;  // step indices, ascending
  std::vector<Row> rows{Row{}};
  // Per step: for every kept row, (parent row, chosen value index).
  std::vector<std::vector<std::pair<int, int>>> parents(m.n);

  for (int i = 0; i < m.n; ++i) {
    deadline.check();
    std::vector<std::pair<int, int>> checks;  // (slot in frontier, neighbour step)
    for (std::size_t s = 0; s < frontier.size(); ++s)
      if (std::binary_search(m.neighbors[i].begin(), m.neighbors[i].end(), frontier[s]))
        checks.emplace_back(static_cast<int>(s), frontier[s]);
    std::vector<int> next;
    std::vector<int> keep_slots;
    for (std::size_t s = 0; s < frontier.size(); ++s)
      if (last[frontier[s]] > i) {
        next.push_back(frontier[s]);
        keep_slots.push_back(static_cast<int>(s));
      }
    bool keep_self = last[i] > i;
    if (keep_self) next.push_back(i);

    std::vector<Row> new_rows;
    std::vector<std::pair<int, int>> new_parents;
    std::unordered_map<std::string, int> seen;
    for (std::size_t ri = 0; ri < rows.size(); ++ri) {
      const Row& row = rows[ri];
      for (int a = 0; a < static_cast<int>(m.values[i].size()); ++a) {
        bool ok = true;
        for (auto [slot, j] : checks)
          if (!m.compatible(i, a, j, row[slot])) {
            ok = false;
            break;
          }
        if (!ok) continue;
        Row nr;
        nr.reserve(next.size());
        for (int s : keep_slots) nr.push_back(row[s]);
        if (keep_self) nr.push_back(static_cast<std::uint8_t>(a));
        std::string key(nr.begin(), nr.end());
        if (seen.emplace(key, static_cast<int>(new_rows.size())).second) {
          new_rows.push_back(std::move(nr));
          new_parents.emplace_back(static_cast<int>(ri), a);
        }
      }
    }

    StepStats st;
    st.position = i;
    st.frontier = static_cast<int>(next.size());
    st.before = new_rows.size();

    if (reduce && new_rows.size() > 1) {
      // Columns: monomials prod x_u^{e_u}, 0 <= e_u <= min(K deg(u), |D_u| - 1),
      // deg(u) = number of neighbours of u after step i.
      std::vector<int> range;
      std::size_t cols = 1;
      for (int u : next) {
        int deg = 0;
        for (int w : m.neighbors[u])
          if (w > i) ++deg;
        int e = std::min<long>(static_cast<long>(m.k) * deg, static_cast<long>(m.values[u].size()) - 1);
        range.push_back(e + 1);
        cols *= static_cast<std::size_t>(e + 1);
      }
      // powers[slot][value index][e]
      std::vector<std::vector<std::vector<std::uint64_t>>> powers(next.size());
      for (std::size_t s = 0; s < next.size(); ++s) {
        const auto& vals = m.values[next[s]];
        powers[s].resize(vals.size());
        for (std::size_t a = 0; a < vals.size(); ++a) {
          powers[s][a].resize(range[s]);
          std::uint64_t x = 1;
          for (int e = 0; e < range[s]; ++e) {
            powers[s][a][e] = x;
            x = PrimeField::mul(x, static_cast<std::uint64_t>(vals[a]) % PrimeField::p);
          }
        }
      }
      RowBasis basis(cols);
      std::vector<Row> kept;
      std::vector<std::pair<int, int>> kept_parents;
      std::vector<std::uint64_t> vec(cols);
      std::vector<int> digit(next.size());
      for (std::size_t ri = 0; ri < new_rows.size(); ++ri) {
        if (kept.size() == cols) break;  // full rank: nothing else can be independent
        std::fill(digit.begin(), digit.end(), 0);
        for (std::size_t col = 0; col < cols; ++col) {
          std::uint64_t v = 1;
          for (std::size_t s = 0; s < next.size(); ++s)
            v = PrimeField::mul(v, powers[s][new_rows[ri][s]][digit[s]]);
          vec[col] = v;
          for (std::size_t s = next.size(); s-- > 0;) {
            if (++digit[s] < range[s]) break;
            digit[s] = 0;
          }
        }
        if (basis.insert(vec)) {
          kept.push_back(new_rows[ri]);
          kept_parents.push_back(new_parents[ri]);
        }
      }
      new_rows = std::move(kept);
      new_parents = std::move(kept_parents);
    }
    if constexpr (kInjectFault) {
      if (reduce && i + 1 == m.n) new_rows.clear();
    }

    st.after = new_rows.size();
    for (int u : next) {
      int deg = 0;
      for (int w : m.neighbors[u])
        if (w > i) ++deg;
      st.log2_degree_bound += m.k * std::log2(static_cast<double>(deg) + 1.0);
    }
    st.log2_width_bound = static_cast<double>(m.k) * m.width;
    if (reduce) {
      double got = st.after == 0 ? -1.0 : std::log2(static_cast<double>(st.after));
      st.within_bounds = got <= st.log2_degree_bound + 1e-9 && got <= st.log2_width_bound + 1e-9;
      if (!st.within_bounds) ++r.stats.bound_violations;
    }
    r.stats.max_table = std::max(r.stats.max_table, std::max(st.before, st.after));
    r.stats.steps.push_back(st);

    rows = std::move(new_rows);
    parents[i] = std::move(new_parents);
    frontier = std::move(next);
    if (rows.empty()) return r;
  }
  // The final frontier is empty, so exactly one row remains.
  r.satisfiable = true;
  std::vector<int> choice(m.n);
  int row = 0;
  for (int i = m.n - 1; i >= 0; --i) {
    auto [p, a] = parents[i][row];
    choice[i] = a;
    row = p;
  }
  r.assignment = std::move(choice);  // value indices; callers map them
  return r;
}

inline SweepModel bcsp_model(const BcspInstance& b, const CompiledCsp& c, const std::vector<int>& order,
                             std::vector<int>& pos_out) {
  SweepModel m;
  m.n = b.n;
  std::vector<int> pos(b.n);
  for (int i = 0; i < b.n; ++i) pos[order[i]] = i;
  pos_out = pos;
  m.values.resize(b.n);
  m.neighbors.resize(b.n);
  for (int i = 0; i < b.n; ++i) {
    int v = order[i];
    for (std::uint64_t d = c.init[v]; d; d &= d - 1) m.values[i].push_back(b.domains[v][lowbit(d)]);
    for (const auto& arc : c.arcs[v]) m.neighbors[i].push_back(pos[arc.to]);
    std::sort(m.neighbors[i].begin(), m.neighbors[i].end());
    m.neighbors[i].erase(std::unique(m.neighbors[i].begin(), m.neighbors[i].end()), m.neighbors[i].end());
  }
  // allowed[(i, j)] as value-index bit tables, for j earlier than i.
  auto local_index = std::make_shared<std::vector<std::vector<int>>>(b.n);
  for (int i = 0; i < b.n; ++i) {
    int v = order[i];
    (*local_index)[i].assign(b.domains[v].size(), -1);
    int idx = 0;
    for (std::uint64_t d = c.init[v]; d; d &= d - 1) (*local_index)[i][lowbit(d)] = idx++;
  }
  // Compatibility tables keyed by (i, j): table[a] = mask of value indices of j.
  auto tables = std::make_shared<std::unordered_map<std::uint64_t, std::vector<std::uint64_t>>>();
  for (int i = 0; i < b.n; ++i) {
    int v = order[i];
    for (const auto& arc : c.arcs[v]) {
      int j = pos[arc.to];
      std::uint64_t key = static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(b.n) + static_cast<std::uint64_t>(j);
      auto& t = (*tables)[key];
      if (t.empty()) t.assign(m.values[i].size(), ~std::uint64_t{0});
      for (std::uint64_t d = c.init[v]; d; d &= d - 1) {
        int la = lowbit(d);
        std::uint64_t raw = c.tables[arc.table][la], mapped = 0;
        for (; raw; raw &= raw - 1) {
          int lb = (*local_index)[j][lowbit(raw)];
          if (lb >= 0) mapped |= std::uint64_t{1} << lb;
        }
        t[(*local_index)[i][la]] &= mapped;
      }
    }
  }
  const auto n = static_cast<std::uint64_t>(b.n);
  m.compatible = [tables, n](int i, int a, int j, int bb) {
    const auto& t = tables->at(static_cast<std::uint64_t>(i) * n + static_cast<std::uint64_t>(j));
    return ((t[a] >> bb) & 1) != 0;
  };
  return m;
}

inline SolveResult sweep_bcsp(const BcspInstance& input, const std::vector<int>& order, bool reduce,
                              const Deadline& deadline) {
  auto t0 = Clock::now();
  BcspInstance b = input;
  normalize(b);
  Graph g = primal_graph(b);
  if (!is_permutation_of_vertices(g, order)) throw invalid_input("layout is not a permutation of the variables");
  auto c = compile(b);
  std::vector<int> pos;
  SweepModel m = bcsp_model(b, c, order, pos);
  m.k = compute_k_and_slices(b).k;
  m.width = layout_width(g, order);
  SolveResult r = run_sweep(m, reduce, deadline);
  if (r.assignment) {
    std::vector<int> a(b.n);
    for (int i = 0; i < b.n; ++i) a[order[i]] = m.values[i][(*r.assignment)[i]];
    r.assignment = std::move(a);
  }
  r.stats.engine = reduce ? "repset" : "dp";
  r.stats.seconds = seconds_since(t0);
  return r;
}

}  // namespace detail

// Plain dynamic programming over a linear layout (no reduction).
inline SolveResult layout_dp(const BcspInstance& b, const std::vector<int>& order, const Deadline& deadline = {}) {
  return detail::sweep_bcsp(b, order, false, deadline);
}

// Dynamic programming over a linear layout with representative-set
// reduction: after every step only rows independent over F_p are kept.
inline SolveResult repset_solve(const BcspInstance& b, const std::vector<int>& order,
                                const Deadline& deadline = {}) {
  return detail::sweep_bcsp(b, order, true, deadline);
}

// Instance on the associated bipartite graphs: g* -> h* with
// L*(v') = {x' : x in L(v)} and L*(v'') = {x'' : x in L(v)}.
inline ListInstance associated_instance(const ListInstance& inst) {
  ListInstance out;
  out.g = associated_bipartite(inst.g);
  out.h = associated_bipartite(inst.h);
  const int n = inst.g.size(), hn = inst.h.size();
  out.lists.resize(2 * n);
  for (int v = 0; v < n; ++v) {
    out.lists[v] = inst.lists[v];
    for (int x : inst.lists[v]) out.lists[n + v].push_back(hn + x);
  }
  return out;
}

// Sweep over g* with the pairs (v', v'') adjacent in the layout. Only
// assignments of the clean form (v' -> x', v'' -> x'') are tracked, so a
// state is an assignment of original vertices to V(h). Assignment values are
// h indices + 1.
inline SolveResult clean_repset_solve(const ListInstance& inst, const std::vector<int>& order,
                                      const Deadline& deadline = {}) {
  auto t0 = Clock::now();
  validate(inst);
  const Graph& g = inst.g;
  const Graph& h = inst.h;
  if (!is_permutation_of_vertices(g, order)) throw invalid_input("layout is not a permutation of V(g)");
  const int n = g.size();
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[order[i]] = i;

  detail::SweepModel m;
  m.n = n;
  m.values.resize(n);
  m.neighbors.resize(n);
  for (int i = 0; i < n; ++i) {
    int v = order[i];
    for (int x : inst.lists[v])
      if (!g.has_loop(v) || h.has_loop(x)) m.values[i].push_back(x + 1);
    for (int w : g.neighbors(v))
      if (w != v) m.neighbors[i].push_back(pos[w]);
    std::sort(m.neighbors[i].begin(), m.neighbors[i].end());
  }
  m.compatible = [&m, &h](int i, int a, int j, int bb) {
    return h.has_edge(m.values[i][a] - 1, m.values[j][bb] - 1);
  };
  ListInstance star = associated_instance(inst);
  m.k = compute_k_and_slices(lhom_to_bcsp(star)).k;
  std::vector<int> star_order;
  for (int v : order) {
    star_order.push_back(v);
    star_order.push_back(n + v);
  }
  m.width = layout_width(star.g, star_order);

  SolveResult r = detail::run_sweep(m, true, deadline);
  if (r.assignment) {
    std::vector<int> a(n);
    for (int i = 0; i < n; ++i) a[order[i]] = m.values[i][(*r.assignment)[i]];
    r.assignment = std::move(a);
  }
  r.stats.engine = "clean";
  r.stats.seconds = detail::seconds_since(t0);
  return r;
}

// Dynamic programming over a tree decomposition of the primal graph.
inline SolveResult tree_decomposition_dp(const BcspInstance& input, const TreeDecomposition& td,
                                         const Deadline& deadline = {}) {
  auto t0 = Clock::now();
  BcspInstance b = input;
  normalize(b);
  Graph g = primal_graph(b);
  auto check = validate_decomposition(g, td);
  if (!check.ok) throw invalid_input("invalid tree decomposition: " + check.failure);
  SolveResult r;
  r.stats.engine = "td";
  r.stats.width = td.width();
  for (const auto& d : b.domains)
    if (d.empty()) return r;
  auto c = detail::compile(b);

  const int nb = static_cast<int>(td.bags.size());
  std::vector<std::vector<int>> adj(nb);
  for (auto [x, y] : td.tree_edges) {
    adj[x].push_back(y);
    adj[y].push_back(x);
  }
  std::vector<int> parent(nb, -1), order{0};
  std::vector<char> seen(nb, 0);
  seen[0] = 1;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int y : adj[order[i]])
      if (!seen[y]) {
        seen[y] = 1;
        parent[y] = order[i];
        order.push_back(y);
      }
  std::vector<std::vector<int>> children(nb);
  for (int x : order)
    if (parent[x] >= 0) children[parent[x]].push_back(x);

  using Row = std::vector<std::uint8_t>;  // local value indices, bag order
  std::vector<std::vector<Row>> tables(nb);
  // Keys of child rows projected onto the parent bag.
  auto project = [&](int from, const Row& row, int onto) {
    std::string key;
    const auto& bf = td.bags[from];
    for (std::size_t s = 0; s < bf.size(); ++s)
      if (std::binary_search(td.bags[onto].begin(), td.bags[onto].end(), bf[s]))
        key.push_back(static_cast<char>(row[s]));
    return key;
  };
  auto compat = [&](int u, int a, int v, int bb) {
    for (const auto& arc : c.arcs[u])
      if (arc.to == v && !((c.tables[arc.table][a] >> bb) & 1)) return false;
    return true;
  };
  for (int oi = nb - 1; oi >= 0; --oi) {
    deadline.check();
    int x = order[oi];
    const auto& bag = td.bags[x];
    std::vector<std::unordered_map<std::string, int>> child_keys(children[x].size());
    for (std::size_t ci = 0; ci < children[x].size(); ++ci) {
      int ch = children[x][ci];
      for (const Row& row : tables[ch]) child_keys[ci].emplace(project(ch, row, x), 0);
    }
    Row cur(bag.size());
    std::vector<Row>& out = tables[x];
    std::function<void(std::size_t)> rec = [&](std::size_t s) {
      if (s == bag.size()) {
        for (std::size_t ci = 0; ci < children[x].size(); ++ci) {
          int ch = children[x][ci];
          std::string key;
          for (std::size_t t = 0; t < bag.size(); ++t)
            if (std::binary_search(td.bags[ch].begin(), td.bags[ch].end(), bag[t]))
              key.push_back(static_cast<char>(cur[t]));
          if (!child_keys[ci].count(key)) return;
        }
        out.push_back(cur);
        return;
      }
      int v = bag[s];
      for (std::uint64_t d = c.init[v]; d; d &= d - 1) {
        int a = lowbit(d);
        bool ok = true;
        for (std::size_t t = 0; t < s && ok; ++t) ok = compat(v, a, bag[t], cur[t]);
        if (!ok) continue;
        cur[s] = static_cast<std::uint8_t>(a);
        rec(s + 1);
      }
    };
    rec(0);
    r.stats.max_table = std::max(r.stats.max_table, out.size());
    if (out.empty()) {
      r.stats.seconds = detail::seconds_since(t0);
      return r;
    }
  }
  r.satisfiable = true;
  std::vector<int> local(b.n, -1);
  std::vector<int> chosen(nb, -1);
  for (int x : order) {
    const auto& bag = td.bags[x];
    for (std::size_t ri = 0; ri < tables[x].size(); ++ri) {
      const Row& row = tables[x][ri];
      bool ok = true;
      for (std::size_t s = 0; s < bag.size() && ok; ++s)
        if (local[bag[s]] >= 0 && local[bag[s]] != row[s]) ok = false;
      if (ok) {
        chosen[x] = static_cast<int>(ri);
        for (std::size_t s = 0; s < bag.size(); ++s) local[bag[s]] = row[s];
        break;
      }
    }
  }
  std::vector<int> a(b.n);
  for (int v = 0; v < b.n; ++v) a[v] = b.domains[v][local[v] >= 0 ? local[v] : lowbit(c.init[v])];
  r.assignment = std::move(a);
  r.stats.seconds = detail::seconds_since(t0);
  return r;
}

// Decides a list homomorphism instance with bipartite h by normalising it
// and solving every component orientation with the given engine.
enum class Engine { brute, dp, repset };

inline SolveResult solve_lhom(const ListInstance& inst, Engine engine, const Deadline& deadline = {}) {
  auto t0 = Clock::now();
  SolveResult total;
  total.stats.engine = engine == Engine::brute ? "brute" : engine == Engine::dp ? "dp" : "repset";
  ConsistencyReport rep = normalize_consistent(inst);
  std::vector<int> f(inst.g.size(), -1);
  for (const auto& comp : rep.components) {
    if (comp.rejected) {
      total.stats.seconds = detail::seconds_since(t0);
      return total;
    }
    bool any = false;
    for (const auto& o : comp.orientations) {
      if (o.trivially_no) continue;
      BcspInstance b = lhom_to_bcsp(o.instance);
      SolveResult r;
      if (engine == Engine::brute) {
        r = brute_force(b, -1, deadline);
      } else {
        Graph pg = primal_graph(b);
        auto order = pg.size() <= caps().exact_cutwidth ? exact_cutwidth(pg).order : greedy_layout(pg).order;
        r = engine == Engine::dp ? layout_dp(b, order, deadline) : repset_solve(b, order, deadline);
      }
      total.stats.nodes += r.stats.nodes;
      total.stats.k = std::max(total.stats.k, r.stats.k);
      total.stats.width = std::max(total.stats.width, r.stats.width);
      total.stats.max_table = std::max(total.stats.max_table, r.stats.max_table);
      total.stats.bound_violations += r.stats.bound_violations;
      for (auto s : r.stats.steps) total.stats.steps.push_back(s);
      if (r.satisfiable) {
        for (std::size_t i = 0; i < comp.vertices.size(); ++i) f[comp.vertices[i]] = (*r.assignment)[i] - 1;
        any = true;
        break;
      }
    }
    if (!any) {
      total.stats.seconds = detail::seconds_since(t0);
      return total;
    }
  }
  total.satisfiable = true;
  total.assignment = f;  // h indices
  total.stats.seconds = detail::seconds_since(t0);
  return total;
}

}  // namespace lhom
