#include <gtest/gtest.h>

#include <random>

#include "lhom/field.hpp"
#include "lhom/layouts.hpp"
#include "lhom/solvers.hpp"
#include "support.hpp"

using namespace lhom;
using lhom::testing::naive_solve;

namespace {

std::vector<int> identity_order(int n) {
  std::vector<int> o(n);
  for (int i = 0; i < n; ++i) o[i] = i;
  return o;
}

}  // namespace

TEST(Field, Arithmetic) {
  using F = PrimeField;
  EXPECT_EQ(F::mul(F::inv(12345), 12345), 1u);
  EXPECT_EQ(F::pow(2, 31), 1u);  // 2^31 = 1 mod 2^31 - 1
  EXPECT_EQ(F::sub(3, 5), F::p - 2);
}

TEST(Field, RowBasisKeepsFirstIndependentRows) {
  RowBasis b(3);
  EXPECT_TRUE(b.insert({1, 2, 3}));
  EXPECT_TRUE(b.insert({2, 4, 7}));
  EXPECT_FALSE(b.insert({3, 6, 10}));  // sum of the first two
  EXPECT_FALSE(b.insert({0, 0, 0}));
  EXPECT_TRUE(b.insert({0, 1, 0}));
  EXPECT_EQ(b.rank(), 3u);
  EXPECT_FALSE(b.insert({5, 5, 5}));
}

TEST(Field, RankMatchesDeterminantOracle) {
  // 2x2 minors decide the rank of random two-row matrices.
  std::mt19937_64 rng(1);
  for (int it = 0; it < 500; ++it) {
    std::uint64_t a = rng() % 4, b = rng() % 4, c = rng() % 4, d = rng() % 4;
    RowBasis basis(2);
    int r = basis.insert({a, b}) + basis.insert({c, d});
    int expected = (a * d != b * c) ? 2 : ((a | b | c | d) ? 1 : 0);
    EXPECT_EQ(r, expected);
  }
}

TEST(BruteForce, AgreesWithEnumeration) {
  std::mt19937_64 rng(41);
  int sat = 0;
  for (int it = 0; it < 400; ++it) {
    int n = 1 + static_cast<int>(rng() % 8);
    double density = 0.2 + 0.7 * (it % 10) / 10.0;
    BcspInstance b = lhom::testing::random_bcsp(rng, n, 4, density, 0.55);
    normalize(b);
    auto expected = naive_solve(b);
    auto r = brute_force(b);
    EXPECT_EQ(r.satisfiable, expected.has_value());
    if (r.satisfiable) EXPECT_TRUE(satisfies(b, *r.assignment));
    sat += r.satisfiable;
  }
  EXPECT_GT(sat, 40);
  EXPECT_LT(sat, 360);
}

TEST(BruteForce, BudgetIsEnforced) {
  // Pigeonhole: 7 pairwise-different variables over 6 values.
  BcspInstance b;
  b.n = 7;
  for (int v = 0; v < 7; ++v) b.domains.push_back({1, 2, 3, 4, 5, 6});
  for (int u = 0; u < 7; ++u)
    for (int v = u + 1; v < 7; ++v) {
      BcspConstraint c{u, v, {}};
      for (int a = 1; a <= 6; ++a)
        for (int w = 1; w <= 6; ++w)
          if (a != w) c.allowed.emplace_back(a, w);
      b.constraints.push_back(c);
    }
  EXPECT_THROW(brute_force(b, 10), budget_exceeded);
  EXPECT_FALSE(brute_force(b).satisfiable);
}

TEST(Sweep, EmptyDomainIsUnsat) {
  BcspInstance b;
  b.n = 2;
  b.domains = {{1}, {}};
  EXPECT_FALSE(layout_dp(b, {0, 1}).satisfiable);
  EXPECT_FALSE(repset_solve(b, {0, 1}).satisfiable);
}

TEST(Sweep, AllAllowedReducesToOneRow) {
  BcspInstance b;
  b.n = 3;
  b.domains = {{1, 2, 3}, {1, 2}, {2, 3}};
  for (auto [u, v] : std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {0, 2}}) {
    BcspConstraint c{u, v, {}};
    for (int a : b.domains[u])
      for (int w : b.domains[v]) c.allowed.emplace_back(a, w);
    b.constraints.push_back(c);
  }
  auto r = repset_solve(b, identity_order(3));
  EXPECT_TRUE(r.satisfiable);
  EXPECT_EQ(r.stats.k, 0);
  for (const auto& s : r.stats.steps) EXPECT_LE(s.after, 1u);
}

TEST(Sweep, EnginesAgreeAndRespectBounds) {
  std::mt19937_64 rng(42);
  for (int it = 0; it < 400; ++it) {
    int n = 1 + static_cast<int>(rng() % 8);
    double density = 0.15 + 0.8 * (it % 8) / 8.0;
    BcspInstance b = lhom::testing::random_bcsp(rng, n, 4, density, 0.5);
    normalize(b);
    bool expected = naive_solve(b).has_value();
    auto order = it % 2 ? exact_cutwidth(primal_graph(b)).order : identity_order(n);
    auto dp = layout_dp(b, order);
    auto rs = repset_solve(b, order);
    EXPECT_EQ(dp.satisfiable, expected);
    EXPECT_EQ(rs.satisfiable, expected);
    if (dp.satisfiable) EXPECT_TRUE(satisfies(b, *dp.assignment));
    if (rs.satisfiable) EXPECT_TRUE(satisfies(b, *rs.assignment));
    EXPECT_EQ(rs.stats.bound_violations, 0);
    for (const auto& s : rs.stats.steps) EXPECT_LE(s.after, s.before);
  }
}

TEST(TreeDecompositionDp, AgreesWithEnumeration) {
  std::mt19937_64 rng(43);
  for (int it = 0; it < 200; ++it) {
    int n = 1 + static_cast<int>(rng() % 8);
    BcspInstance b = lhom::testing::random_bcsp(rng, n, 3, 0.4, 0.55);
    normalize(b);
    Graph g = primal_graph(b);
    auto td = it % 2 ? fvs_to_tree_decomposition(g, exact_fvs(g))
                     : layout_to_path_decomposition(g, greedy_layout(g).order);
    auto r = tree_decomposition_dp(b, td);
    EXPECT_EQ(r.satisfiable, naive_solve(b).has_value());
    if (r.satisfiable) EXPECT_TRUE(satisfies(b, *r.assignment));
  }
}

TEST(CleanRepset, AgreesWithEnumerationOnNonBipartiteTargets) {
  std::mt19937_64 rng(44);
  int done = 0, sat = 0;
  while (done < 150) {
    int hn = 3 + static_cast<int>(rng() % 4);
    Graph h = lhom::testing::random_connected_graph(rng, hn, 0.5);
    if (rng() % 3 == 0) h.add_edge(0, 0);
    if (is_bipartite(h)) continue;
    Graph g = lhom::testing::random_graph(rng, 1 + static_cast<int>(rng() % 6), 0.45);
    ListInstance inst{g, h, {}};
    for (int v = 0; v < g.size(); ++v) {
      VertexSet l;
      for (int x = 0; x < hn; ++x)
        if (rng() % 3) l.push_back(x);
      inst.lists.push_back(l);
    }
    auto r = clean_repset_solve(inst, greedy_layout(g).order);
    bool expected = lhom::testing::naive_lhom(inst);
    EXPECT_EQ(r.satisfiable, expected);
    if (r.satisfiable) {
      std::vector<int> f;
      for (int x : *r.assignment) f.push_back(x - 1);
      EXPECT_TRUE(is_list_homomorphism(inst, f));
    }
    EXPECT_EQ(r.stats.bound_violations, 0);
    sat += expected;
    ++done;
  }
  EXPECT_GT(sat, 10);
}

TEST(SolveLhom, EnginesAgreeOnBipartiteTargets) {
  std::mt19937_64 rng(45);
  for (int it = 0; it < 150; ++it) {
    Graph h = lhom::testing::random_connected_graph(rng, 6, 0.4);
    if (!is_bipartite(h)) continue;
    Graph g = lhom::testing::random_graph(rng, 6, 0.35);
    ListInstance inst{g, h, {}};
    for (int v = 0; v < g.size(); ++v) {
      VertexSet l;
      for (int x = 0; x < h.size(); ++x)
        if (rng() % 2) l.push_back(x);
      inst.lists.push_back(l);
    }
    bool expected = lhom::testing::naive_lhom(inst);
    for (Engine e : {Engine::brute, Engine::dp, Engine::repset}) {
      auto r = solve_lhom(inst, e);
      EXPECT_EQ(r.satisfiable, expected);
      if (r.satisfiable) EXPECT_TRUE(is_list_homomorphism(inst, *r.assignment));
    }
  }
}
