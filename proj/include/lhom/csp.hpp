#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "common.hpp"
#include "graph.hpp"
#include "instance.hpp"

namespace lhom {

using Clock = std::chrono::steady_clock;

struct Deadline {
  std::optional<Clock::time_point> at;
  void check() const {
    if (at && Clock::now() > *at) throw deadline_exceeded("deadline exceeded");
  }
  static Deadline after_ms(long ms) {
    Deadline d;
    if (ms > 0) d.at = Clock::now() + std::chrono::milliseconds(ms);
    return d;
  }
};

namespace detail {

// Binary CSP with variable domains stored as bitmasks over local value
// indices (at most 64 values per variable).
struct CompiledCsp {
  struct Arc {
    int to;
    int table;  // table[a] = mask of local values of `to` compatible with a
  };
  int n = 0;
  std::vector<std::vector<int>> values;  // local index -> value
  std::vector<std::uint64_t> init;
  std::vector<std::vector<Arc>> arcs;
  std::vector<std::vector<std::uint64_t>> tables;

  std::uint64_t compat(int from, int to_arc, int a) const {
    return tables[arcs[from][to_arc].table][a];
  }
};

inline CompiledCsp compile(const BcspInstance& b) {
  CompiledCsp c;
  c.n = b.n;
  c.values = b.domains;
  c.arcs.resize(b.n);
  for (int v = 0; v < b.n; ++v) {
    if (b.domains[v].size() > 64) throw size_cap_exceeded("domain larger than 64 values");
    std::uint64_t m = b.domains[v].size() == 64 ? ~std::uint64_t{0}
                                                : ((std::uint64_t{1} << b.domains[v].size()) - 1);
    c.init.push_back(m);
  }
  auto local = [&](int var, int value) {
    const auto& d = b.domains[var];
    auto it = std::lower_bound(d.begin(), d.end(), value);
    if (it == d.end() || *it != value) return -1;
    return static_cast<int>(it - d.begin());
  };
  for (const auto& con : b.constraints) {
    if (con.u == con.v) {
      std::uint64_t keep = 0;
      for (auto [x, y] : con.allowed)
        if (x == y && local(con.u, x) >= 0) keep |= std::uint64_t{1} << local(con.u, x);
      c.init[con.u] &= keep;
      continue;
    }
    std::vector<std::uint64_t> fwd(b.domains[con.u].size(), 0), bwd(b.domains[con.v].size(), 0);
    for (auto [x, y] : con.allowed) {
      int a = local(con.u, x), w = local(con.v, y);
      if (a < 0 || w < 0) continue;
      fwd[a] |= std::uint64_t{1} << w;
      bwd[w] |= std::uint64_t{1} << a;
    }
    c.arcs[con.u].push_back({con.v, static_cast<int>(c.tables.size())});
    c.tables.push_back(std::move(fwd));
    c.arcs[con.v].push_back({con.u, static_cast<int>(c.tables.size())});
    c.tables.push_back(std::move(bwd));
  }
  return c;
}

// Greedy feedback vertex set of the constraint graph: strip vertices of
// degree at most one, then take a vertex of maximum remaining degree.
inline std::vector<int> greedy_fvs_order(const CompiledCsp& c) {
  const int n = c.n;
  std::vector<std::vector<int>> nb(n);
  for (int v = 0; v < n; ++v) {
    for (const auto& a : c.arcs[v]) nb[v].push_back(a.to);
    std::sort(nb[v].begin(), nb[v].end());
    nb[v].erase(std::unique(nb[v].begin(), nb[v].end()), nb[v].end());
  }
  std::vector<int> deg(n);
  std::vector<char> alive(n, 1);
  for (int v = 0; v < n; ++v) deg[v] = static_cast<int>(nb[v].size());
  std::vector<int> low;
  for (int v = 0; v < n; ++v)
    if (deg[v] <= 1) low.push_back(v);
  std::priority_queue<std::pair<int, int>> heap;  // (degree, -index), lazily updated
  for (int v = 0; v < n; ++v) heap.push({deg[v], -v});
  std::vector<int> fvs;
  int remaining = n;
  auto remove = [&](int v) {
    alive[v] = 0;
    --remaining;
    for (int w : nb[v])
      if (alive[w]) {
        --deg[w];
        if (deg[w] == 1 || deg[w] == 0) low.push_back(w);
        heap.push({deg[w], -w});
      }
  };
  while (remaining > 0) {
    while (!low.empty()) {
      int v = low.back();
      low.pop_back();
      if (alive[v] && deg[v] <= 1) remove(v);
    }
    if (remaining == 0) break;
    while (true) {
      auto [d, negv] = heap.top();
      heap.pop();
      int v = -negv;
      if (alive[v] && deg[v] == d) {
        fvs.push_back(v);
        remove(v);
        break;
      }
    }
  }
  return fvs;
}

// Maintaining arc consistency search with a trail. Branches on the
// feedback-vertex-set variables first (smallest domain first); once they are
// fixed the remaining constraint graph is a forest, where arc consistency
// makes the rest backtrack free.
class MacSolver {
 public:
  explicit MacSolver(const CompiledCsp& c) : c_(c), in_fvs_(c.n, 0) {
    fvs_ = greedy_fvs_order(c);
    for (int v : fvs_) in_fvs_[v] = 1;
    for (int v = 0; v < c.n; ++v)
      if (!in_fvs_[v]) rest_.push_back(v);
  }

  long nodes() const { return nodes_; }

  // Returns local value indices, or nullopt when unsatisfiable.
  std::optional<std::vector<int>> solve(std::vector<std::uint64_t> dom, long budget,
                                        const Deadline& deadline = {}) {
    nodes_ = 0;
    dom_ = std::move(dom);
    trail_.clear();
    std::vector<int> all(c_.n);
    for (int v = 0; v < c_.n; ++v) all[v] = v;
    if (!propagate(all)) return std::nullopt;

    struct Frame {
      int var;
      std::uint64_t untried;
      std::size_t trail_mark;
      std::size_t rest_pos;
    };
    std::vector<Frame> stack;
    std::size_t rest_pos = 0;
    while (true) {
      int var = pick(rest_pos);
      if (var < 0) break;
      stack.push_back({var, dom_[var], trail_.size(), rest_pos});
      while (true) {
        if (stack.empty()) return std::nullopt;
        Frame& f = stack.back();
        undo(f.trail_mark);
        rest_pos = f.rest_pos;
        if (f.untried == 0) {
          stack.pop_back();
          continue;
        }
        if (++nodes_ > budget) throw budget_exceeded("search node budget exceeded");
        if ((nodes_ & 1023) == 0) deadline.check();
        int a = lowbit(f.untried);
        f.untried &= f.untried - 1;
        int v = f.var;
        set(v, std::uint64_t{1} << a);
        if (propagate({v})) break;
      }
    }
    std::vector<int> out(c_.n);
    for (int v = 0; v < c_.n; ++v) out[v] = lowbit(dom_[v]);
    return out;
  }

 private:
  int pick(std::size_t& rest_pos) {
    int best = -1, best_size = 65;
    for (int v : fvs_) {
      int s = popcount64(dom_[v]);
      if (s > 1 && s < best_size) {
        best = v;
        best_size = s;
      }
    }
    if (best >= 0) return best;
    while (rest_pos < rest_.size() && popcount64(dom_[rest_[rest_pos]]) == 1) ++rest_pos;
    if (rest_pos < rest_.size()) return rest_[rest_pos];
    return -1;
  }

  void set(int v, std::uint64_t m) {
    trail_.push_back({v, dom_[v]});
    dom_[v] = m;
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      dom_[trail_.back().first] = trail_.back().second;
      trail_.pop_back();
    }
  }

  bool propagate(std::vector<int> queue) {
    for (int v : queue)
      if (dom_[v] == 0) return false;
    std::vector<char>& queued = queued_;
    if (static_cast<int>(queued.size()) != c_.n) queued.assign(c_.n, 0);
    for (int v : queue) queued[v] = 1;
    std::size_t head = 0;
    auto fail = [&] {
      for (std::size_t i = head; i < queue.size(); ++i) queued[queue[i]] = 0;
      return false;
    };
    while (head < queue.size()) {
      int v = queue[head++];
      queued[v] = 0;
      for (std::size_t ai = 0; ai < c_.arcs[v].size(); ++ai) {
        const auto& arc = c_.arcs[v][ai];
        const auto& table = c_.tables[arc.table];
        std::uint64_t support = 0, m = dom_[v];
        while (m) {
          support |= table[lowbit(m)];
          m &= m - 1;
        }
        std::uint64_t nd = dom_[arc.to] & support;
        if (nd != dom_[arc.to]) {
          if (nd == 0) return fail();
          set(arc.to, nd);
          if (!queued[arc.to]) {
            queued[arc.to] = 1;
            queue.push_back(arc.to);
          }
        }
      }
      if (head > 4096 && head * 2 > queue.size()) {
        queue.erase(queue.begin(), queue.begin() + static_cast<long>(head));
        head = 0;
      }
    }
    return true;
  }

  const CompiledCsp& c_;
  std::vector<char> in_fvs_, queued_;
  std::vector<int> fvs_, rest_;
  std::vector<std::uint64_t> dom_;
  std::vector<std::pair<int, std::uint64_t>> trail_;
  long nodes_ = 0;
};

}  // namespace detail
}  // namespace lhom
