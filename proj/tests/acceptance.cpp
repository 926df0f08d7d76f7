// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "lhom/invariants.hpp"
#include "lhom/layouts.hpp"
#include "lhom/reductions.hpp"
#include "lhom/solvers.hpp"
#include "relation_oracle.hpp"
#include "support.hpp"

using namespace lhom;
namespace lt = lhom::testing;

namespace {

// Pinned tolerances.
constexpr double kCriterion1Seconds = 300.0;
constexpr double kCriterion3Seconds = 600.0;
constexpr double kLog2Slack = 1e-9;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

// ---------------------------------------------------------------------------
// Criteria 1 and 2

// Recomputes the per-step table bounds from the instance and the order alone
// and counts steps whose table exceeds either of them.
long independent_bound_violations(const BcspInstance& input, const std::vector<int>& order, const SolveStats& st) {
  BcspInstance b = input;
  normalize(b);
  const int n = b.n;
  std::vector<std::set<int>> adj(n);
  for (const auto& c : b.constraints)
    if (c.u != c.v) {
      adj[c.u].insert(c.v);
      adj[c.v].insert(c.u);
    }
  int k = 0;
  for (const auto& c : b.constraints) {
    std::set<std::pair<int, int>> allowed(c.allowed.begin(), c.allowed.end());
    for (int a : b.domains[c.u]) {
      int bad = 0;
      for (int w : b.domains[c.v]) bad += !allowed.count({a, w});
      k = std::max(k, bad);
    }
    for (int w : b.domains[c.v]) {
      int bad = 0;
      for (int a : b.domains[c.u]) bad += !allowed.count({a, w});
      k = std::max(k, bad);
    }
  }
  std::vector<int> pos(n);
  for (int i = 0; i < n; ++i) pos[order[i]] = i;
  int width = 0;
  for (int i = 0; i < n; ++i) {
    int cut = 0;
    for (int u = 0; u < n; ++u)
      for (int w : adj[u])
        if (u < w && std::min(pos[u], pos[w]) <= i && std::max(pos[u], pos[w]) > i) ++cut;
    width = std::max(width, cut);
  }
  long bad = 0;
  for (const auto& step : st.steps) {
    const int i = step.position;
    double log2_prod = 0;
    for (int u = 0; u < n; ++u) {
      if (pos[u] > i) continue;
      int later = 0;
      for (int w : adj[u]) later += pos[w] > i;
      if (later > 0) log2_prod += k * std::log2(later + 1.0);
    }
    if (step.after == 0) continue;
    double got = std::log2(static_cast<double>(step.after));
    if (got > log2_prod + kLog2Slack || got > static_cast<double>(k) * width + kLog2Slack) ++bad;
  }
  return bad;
}

void criteria_1_and_2() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  int mismatches = 0, sat = 0;
  long reported = 0, recomputed = 0, repset_runs = 0;
  for (int it = 0; it < 1000; ++it) {
    const int n = 1 + it % 8;
    const double density = 0.1 + 0.9 * ((it / 8) % 10) / 9.0;
    BcspInstance b = lt::random_bcsp(rng, n, 4, density, 0.6);
    normalize(b);
    auto order = exact_cutwidth(primal_graph(b)).order;
    auto oracle = lt::naive_solve(b);
    auto br = brute_force(b);
    auto dp = layout_dp(b, order);
    auto rs = repset_solve(b, order);
    ++repset_runs;
    bool want = oracle.has_value();
    for (const auto* r : {&br, &dp, &rs})
      if (r->satisfiable != want || (r->assignment && !satisfies(b, *r->assignment))) ++mismatches;
    sat += want;
    reported += rs.stats.bound_violations;
    recomputed += independent_bound_violations(b, order, rs.stats);
  }

  int clean_mismatches = 0, clean_sat = 0, done = 0;
  while (done < 300) {
    const int hn = 3 + static_cast<int>(rng() % 4);
    Graph h = lt::random_connected_graph(rng, hn, 0.5);
    if (rng() % 3 == 0) h.add_edge(0, 0);
    if (is_bipartite(h)) continue;
    Graph g = lt::random_graph(rng, 1 + static_cast<int>(rng() % 7), 0.1 + 0.1 * (done % 7));
    ListInstance inst{g, h, {}};
    for (int v = 0; v < g.size(); ++v) {
      VertexSet l;
      for (int x = 0; x < hn; ++x)
        if (rng() % 3) l.push_back(x);
      inst.lists.push_back(l);
    }
    auto r = clean_repset_solve(inst, greedy_layout(g).order);
    ++repset_runs;
    bool want = brute_force(lhom_to_bcsp(inst)).satisfiable;
    if (want != lt::naive_lhom(inst)) ++clean_mismatches;  // reference disagrees with enumeration
    if (r.satisfiable != want) ++clean_mismatches;
    if (r.assignment) {
      std::vector<int> f;
      for (int x : *r.assignment) f.push_back(x - 1);
      if (!is_list_homomorphism(inst, f)) ++clean_mismatches;
    }
    reported += r.stats.bound_violations;
    clean_sat += want;
    ++done;
  }
  double secs = since(t0);
  report(1, mismatches == 0 && clean_mismatches == 0 && secs < kCriterion1Seconds,
         fmt("bcsp 1000 (sat %d) mismatches %d; clean 300 (sat %d) mismatches %d; %.1fs < %.0fs", sat, mismatches,
             clean_sat, clean_mismatches, secs, kCriterion1Seconds));
  report(2, reported == 0 && recomputed == 0,
         fmt("%ld repset runs; violations reported %ld, recomputed %ld", repset_runs, reported, recomputed));
}

// ---------------------------------------------------------------------------
// Criterion 3

void criterion_3() {
  auto t0 = Clock::now();
  int wrong = 0;
  std::string first;
  auto expect = [&](const char* what, int got, int want) {
    if (got != want) {
      ++wrong;
      if (first.empty()) first = fmt("%s = %d, expected %d", what, got, want);
    }
  };
  for (int k = 3; k <= 5; ++k) {
    Graph h = complete_graph(k);
    expect("i*(K_k)", invariant_star(h, InvariantKind::i).value, k);
    expect("mim*(K_k)", invariant_star(h, InvariantKind::mim).value, 2);
    expect("gamma*(K_k)", invariant_star(h, InvariantKind::gamma).value, 1);
  }
  for (int k : {5, 7, 9}) expect("mim*(C_k odd)", invariant_star(cycle_graph(k), InvariantKind::mim).value, 2 * k / 3);
  for (int k : {6, 8}) expect("mim*(C_k even)", invariant_star(cycle_graph(k), InvariantKind::mim).value, k / 3);
  for (int r = 3; r <= 5; ++r) {
    Graph h = crown_graph(r);
    expect("i(crown)", invariant_i(h).value, r);
    expect("gamma(crown)", invariant_gamma(h).value, 1);
  }

  // Every labelled connected bipartite graph on at most 8 vertices, given by
  // its class sizes a <= b and an edge mask.
  long connected = 0, qualifying = 0, chain_bad = 0;
  for (int a = 1; a <= 4; ++a)
    for (int b = a; a + b <= 8; ++b) {
      const int e = a * b;
      for (long m = 0; m < (1L << e); ++m) {
        Graph g(a + b);
        for (int i = 0; i < e; ++i)
          if (m >> i & 1) g.add_edge(i / b, a + i % b);
        if (!is_connected(g)) continue;
        ++connected;
        if (!is_undecomposable(g)) continue;
        if (is_complement_circular_arc(g).answer != Tri::no) continue;
        ++qualifying;
        int i = invariant_i(g).value, mm = invariant_mim(g).value, gm = invariant_gamma(g).value;
        if (!(mm - 1 <= gm && gm <= i - 1)) ++chain_bad;
      }
    }
  double secs = since(t0);
  report(3, wrong == 0 && chain_bad == 0 && qualifying > 0 && secs < kCriterion3Seconds,
         fmt("named values wrong %d%s%s; chain violated on %ld of %ld qualifying (of %ld connected); %.1fs < %.0fs",
             wrong, first.empty() ? "" : ": ", first.c_str(), chain_bad, qualifying, connected, secs,
             kCriterion3Seconds));
}

// ---------------------------------------------------------------------------
// Criterion 4

void criterion_4() {
  auto t0 = Clock::now();
  int checked = 0, contract_failures = 0, relation_mismatches = 0;
  std::string first;
  auto note = [&](const std::string& what, const std::vector<std::string>& bad) {
    ++checked;
    if (bad.empty()) return;
    ++contract_failures;
    if (first.empty()) first = what + ": " + bad.front();
  };
  auto cmp = [&](const std::string& what, const Relation& got, const Relation& want) {
    if (got == want) return;
    ++relation_mismatches;
    if (first.empty()) first = what + ": relation differs from oracle";
  };
  for (int len : {6, 8}) {
    Graph h = cycle_graph(len);
    auto t = find_corner_triple(h);
    VertexSet s;
    for (int v = 0; v < len; v += 2) s.push_back(v);  // w1, w3, ...
    const std::string hn = "C" + std::to_string(len);
    for (int g : {4, 8}) {
      const std::string tag = hn + " g=" + std::to_string(g);
      Gadget nand = build_nand2(h, t, g);
      note(tag + " NAND2", check_nand2(h, t, nand, g));
      cmp(tag + " NAND2", gadget_relation(h, nand), lt::path_oracle(h, nand));
      for (int k = 2; k <= 4; ++k) {
        Gadget o = build_or_k(h, t, k, g);
        note(tag + " OR" + std::to_string(k), check_or_k(h, t, o, k, g));
        cmp(tag + " OR" + std::to_string(k), gadget_relation(h, o), lt::oracle_relation(h, o));
      }
      for (int a : s)
        for (int b : s) {
          if (a == b) continue;
          Gadget d = synthesize_distinguisher(h, t, s, a, b, g);
          note(tag + " distinguisher", check_distinguisher(h, t, s, a, b, d, g));
          cmp(tag + " distinguisher", gadget_relation(h, d), lt::path_oracle(h, d));
        }
      for (int u : s) {
        Gadget f = build_detector(h, t, s, u, g);
        note(tag + " detector", check_detector(h, t, s, u, f, g));
        cmp(tag + " detector", gadget_relation(h, f), lt::oracle_relation(h, f));
        Gadget asg = build_assignment(h, t, s, u, g);
        auto bad = check_assignment(h, t, s, u, asg, g);
        const int want_deg = static_cast<int>((s.size() - 1) * (s.size() - 1));
        if (asg.g.degree(asg.port("x")) != want_deg) bad.push_back("deg(x)");
        note(tag + " assignment", bad);
        cmp(tag + " assignment", gadget_relation(h, asg), lt::oracle_relation(h, asg, {asg.port("x")}));
      }
      Gadget sw = build_switching(h, t, g);
      note(tag + " switching", check_switching(h, t, sw, g));
      cmp(tag + " switching", gadget_relation(h, sw), lt::oracle_relation(h, sw));
    }
  }
  report(4, contract_failures == 0 && relation_mismatches == 0,
         fmt("%d gadgets; contract failures %d, relation mismatches %d%s%s; %.1fs", checked, contract_failures,
             relation_mismatches, first.empty() ? "" : "; first: ", first.c_str(), since(t0)));
}

// ---------------------------------------------------------------------------
// Criterion 5

void criterion_5() {
  auto t0 = Clock::now();
  Graph h = cycle_graph(6);
  auto fvs_setup = default_setup(h, false);
  auto ctw_setup = default_setup(h, true);
  std::mt19937_64 rng(5005);
  int agree = 0, fvs_size_bad = 0, fvs_cert_bad = 0, class_bad = 0, width_bad = 0, sat = 0;
  int worst_slack = 1 << 30;
  for (int it = 0; it < 100; ++it) {
    const int n = 1 + static_cast<int>(rng() % 10), m = 1 + static_cast<int>(rng() % 15);
    Cnf f0 = random_cnf(rng, n, m);
    std::ostringstream dimacs;
    write_dimacs(dimacs, f0);
    Cnf f = parse_dimacs(dimacs.str());
    const bool want = brute_force_sat(f).has_value();
    sat += want;

    const int p = 1 + it % 3;
    auto rf = reduce_sat_fvs(f, h, fvs_setup.triple, fvs_setup.s, p);
    validate(rf.instance);
    if (static_cast<int>(rf.fvs.size()) != rf.t * rf.p) ++fvs_size_bad;
    if (!is_forest_without(rf.instance.g, rf.fvs)) ++fvs_cert_bad;
    const bool got_fvs = brute_force(lhom_to_bcsp(rf.instance), -1).satisfiable;

    const int g = it % 2 ? 6 : 4, pc = 1 + it % 2;
    const int c = measure_ctw_constant(h, ctw_setup.triple, ctw_setup.s, pc, g);
    auto rc = reduce_sat_ctw(f, h, ctw_setup.triple, ctw_setup.s, pc, g);
    validate(rc.instance);
    if (!check_sparse_class(rc.instance.g, g).ok()) ++class_bad;
    const int w = layout_width(rc.instance.g, rc.layout);
    if (w != rc.layout_width || w > rc.t * rc.p + c) ++width_bad;
    worst_slack = std::min(worst_slack, rc.t * rc.p + c - w);
    // Plain layout DP along the certificate layout; the reduced engine's
    // matrices get too wide on these frontiers.
    const bool got_ctw = layout_dp(lhom_to_bcsp(rc.instance), rc.layout).satisfiable;

    agree += got_fvs == want && got_ctw == want;
  }
  report(5, agree == 100 && fvs_size_bad == 0 && fvs_cert_bad == 0 && class_bad == 0 && width_bad == 0,
         fmt("equisatisfiable %d/100 (sat %d); fvs size != t*p %d, fvs not a certificate %d; class failures %d, "
             "width over t*p+C %d (min slack %d); %.1fs",
             agree, sat, fvs_size_bad, fvs_cert_bad, class_bad, width_bad, worst_slack, since(t0)));
}

// ---------------------------------------------------------------------------
// Criterion 6

struct Cover {
  Graph g, h;
  std::vector<VertexSet> fibres;
};

// Random cover with clique fibres and a nonempty matching on every edge of g.
Cover random_cover(std::mt19937_64& rng) {
  Cover c;
  do c.g = lt::random_graph(rng, 2 + static_cast<int>(rng() % 5), 0.5);
  while (c.g.num_edges() == 0);
  for (int v = 0; v < c.g.size(); ++v) {
    VertexSet f;
    const int size = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < size; ++i) f.push_back(c.h.add_vertex(c.g.label(v) + "_" + std::to_string(i)));
    for (std::size_t i = 0; i < f.size(); ++i)
      for (std::size_t j = i + 1; j < f.size(); ++j) c.h.add_edge(f[i], f[j]);
    c.fibres.push_back(f);
  }
  for (auto [u, v] : c.g.edges()) {
    std::vector<int> a = c.fibres[u], b = c.fibres[v];
    std::shuffle(a.begin(), a.end(), rng);
    std::shuffle(b.begin(), b.end(), rng);
    const std::size_t pairs = std::min(a.size(), b.size());
    const std::size_t used = 1 + rng() % pairs;
    for (std::size_t i = 0; i < used; ++i) c.h.add_edge(a[i], b[i]);
  }
  return c;
}

// Independent set of size |V(g)| in h, by subset enumeration.
bool has_full_independent_set(const Cover& c) {
  const int n = c.h.size();
  for (std::uint32_t s = 0; s < (1u << n); ++s) {
    if (std::popcount(s) != c.g.size()) continue;
    bool ok = true;
    for (auto [x, y] : c.h.edges())
      if ((s >> x & 1) && (s >> y & 1)) {
        ok = false;
        break;
      }
    if (ok) return true;
  }
  return false;
}

void criterion_6() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(6006);
  int invalid = 0, k_bad = 0, wrong = 0, sat = 0;
  for (int it = 0; it < 100; ++it) {
    Cover c = random_cover(rng);
    try {
      validate_cover(c.g, c.h, c.fibres);
    } catch (const lhom_error&) {
      ++invalid;
      continue;
    }
    BcspInstance b = dp_cover_to_bcsp(c.g, c.h, c.fibres);
    if (compute_k_and_slices(b).k != 1) ++k_bad;
    const bool want = has_full_independent_set(c);
    sat += want;
    auto order = exact_cutwidth(primal_graph(b)).order;
    for (const auto& r : {repset_solve(b, order), layout_dp(b, order), brute_force(b)})
      if (r.satisfiable != want || (r.assignment && !satisfies(b, *r.assignment))) ++wrong;
  }
  report(6, invalid == 0 && k_bad == 0 && wrong == 0,
         fmt("100 covers (sat %d); invalid %d, K != 1 %d, answer mismatches %d; %.1fs", sat, invalid, k_bad, wrong,
             since(t0)));
}

// ---------------------------------------------------------------------------
// Criterion 7

// Independent decomposition check: the bag graph is a tree, every vertex and
// edge is covered, and each vertex's bags are connected.
bool decomposition_ok(const Graph& g, const TreeDecomposition& td) {
  const int nb = static_cast<int>(td.bags.size());
  if (nb == 0) return g.size() == 0;
  if (static_cast<int>(td.tree_edges.size()) != nb - 1) return false;
  std::vector<std::vector<int>> adj(nb);
  for (auto [x, y] : td.tree_edges) {
    if (x < 0 || y < 0 || x >= nb || y >= nb) return false;
    adj[x].push_back(y);
    adj[y].push_back(x);
  }
  auto reach = [&](const std::function<bool(int)>& keep, int start) {
    std::vector<char> seen(nb, 0);
    std::vector<int> stack{start};
    seen[start] = 1;
    int count = 1;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int y : adj[x])
        if (!seen[y] && keep(y)) {
          seen[y] = 1;
          ++count;
          stack.push_back(y);
        }
    }
    return count;
  };
  if (reach([](int) { return true; }, 0) != nb) return false;
  auto contains = [&](int bag, int v) { return std::count(td.bags[bag].begin(), td.bags[bag].end(), v) > 0; };
  for (int v = 0; v < g.size(); ++v) {
    std::vector<int> holding;
    for (int x = 0; x < nb; ++x)
      if (contains(x, v)) holding.push_back(x);
    if (holding.empty()) return false;
    if (reach([&](int x) { return contains(x, v); }, holding[0]) != static_cast<int>(holding.size())) return false;
  }
  for (auto [u, v] : g.edges()) {
    bool covered = false;
    for (int x = 0; x < nb && !covered; ++x) covered = contains(x, u) && contains(x, v);
    if (!covered) return false;
  }
  return true;
}

void criterion_7() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(7007);
  int td_bad = 0, pd_bad = 0;
  for (int it = 0; it < 200; ++it) {
    const int n = 1 + it % 10;
    Graph g = lt::random_graph(rng, n, 0.15 + 0.7 * ((it / 10) % 5) / 4.0);
    VertexSet f = exact_fvs(g);
    auto td = fvs_to_tree_decomposition(g, f);
    if (!is_forest_without(g, f) || td.width() > static_cast<int>(f.size()) + 1 || !decomposition_ok(g, td) ||
        !validate_decomposition(g, td).ok)
      ++td_bad;
    auto order = it % 2 ? greedy_layout(g).order : exact_cutwidth(g).order;
    auto pd = layout_to_path_decomposition(g, order);
    if (pd.width() > layout_width(g, order) || !decomposition_ok(g, pd) || !validate_decomposition(g, pd).ok)
      ++pd_bad;
  }
  report(7, td_bad == 0 && pd_bad == 0,
         fmt("200 graphs; fvs->td failures %d, layout->pd failures %d; %.1fs", td_bad, pd_bad, since(t0)));
}

}  // namespace

int main() {
  auto t0 = Clock::now();
  criteria_1_and_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  std::printf("total %.1fs, %d failing\n", since(t0), failures);
  return failures == 0 ? 0 : 1;
}
