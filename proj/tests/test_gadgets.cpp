#include <gtest/gtest.h>

#include <random>

#include "lhom/gadgets.hpp"
#include "relation_oracle.hpp"
#include "support.hpp"

using namespace lhom;
using lhom::testing::oracle_relation;
using lhom::testing::path_oracle;

namespace {

Relation join(const Relation& a, const Relation& b) {
  Relation out;
  for (const auto& x : a)
    for (const auto& y : b)
      if (x[1] == y[0]) out.insert({x[0], y[1]});
  return out;
}

int idx(const Graph& h, const std::string& name) { return *h.find(name); }

VertexSet class_set(const Graph& h, std::initializer_list<const char*> names) {
  std::vector<int> v;
  for (auto n : names) v.push_back(idx(h, n));
  return make_set(v);
}

struct Target {
  Graph h;
  VertexSet s;
};

Target c6() { return {cycle_graph(6), class_set(cycle_graph(6), {"w1", "w3", "w5"})}; }
Target c8() { return {cycle_graph(8), class_set(cycle_graph(8), {"w1", "w3", "w5", "w7"})}; }

}  // namespace

TEST(Walks, AvoidingPairOnC6) {
  Graph h = cycle_graph(6);
  int w1 = idx(h, "w1"), w5 = idx(h, "w5");
  auto r = find_avoiding_walks(h, {{w1, w5}, {w5, w1}}, {{0, 1}});
  ASSERT_TRUE(r.has_value());
  const auto& x = (*r)[0];
  const auto& y = (*r)[1];
  ASSERT_EQ(x.size(), y.size());
  EXPECT_EQ((x.size() - 1) % 2, 0u);
  EXPECT_TRUE(is_walk(h, x) && is_walk(h, y));
  for (std::size_t i = 0; i + 1 < x.size(); ++i) EXPECT_FALSE(h.has_edge(x[i], y[i + 1]));
  EXPECT_NE(x[0], y[0]);
}

TEST(Walks, ReversalSwapsAvoidance) {
  std::mt19937_64 rng(51);
  int found = 0;
  for (int it = 0; it < 300; ++it) {
    Graph h = lhom::testing::random_connected_graph(rng, 4 + static_cast<int>(rng() % 5), 0.4);
    int n = h.size();
    int a = static_cast<int>(rng() % n), b = static_cast<int>(rng() % n), c = static_cast<int>(rng() % n),
        d = static_cast<int>(rng() % n);
    auto r = find_avoiding_walks(h, {{a, c}, {b, d}}, {{0, 1}}, 12);
    if (!r) continue;
    ++found;
    EXPECT_TRUE(walk_avoids(h, (*r)[0], (*r)[1]));
    EXPECT_TRUE(walk_avoids(h, reversed((*r)[1]), reversed((*r)[0])));
  }
  EXPECT_GT(found, 30);
}

TEST(Walks, DisconnectedEndpointsGiveNone) {
  Graph h(4);
  h.add_edge(0, 1);
  h.add_edge(2, 3);
  EXPECT_FALSE(find_avoiding_walks(h, {{0, 2}, {1, 0}}, {{0, 1}}).has_value());
  EXPECT_FALSE(find_avoiding_walks(h, {{0, 1}, {0, 1}}, {{0, 1}}).has_value());  // equal starts
}

TEST(CornerTriples, CycleCases) {
  for (int len : {6, 8}) {
    Graph h = cycle_graph(len);
    auto t = find_corner_triple(h);
    EXPECT_EQ(t.kind, len == 6 ? TripleCase::c6 : TripleCase::c8);
    EXPECT_EQ(h.label(t.alpha), "w1");
    EXPECT_EQ(h.label(t.beta), "w5");
    EXPECT_EQ(h.label(t.gamma), "w3");
    EXPECT_EQ(verify_corner_triple(h, t), "");
  }
}

TEST(CornerTriples, CrownIsC6Case) {
  Graph h = crown_graph(3);
  auto t = find_corner_triple(h);
  EXPECT_EQ(t.kind, TripleCase::c6);
  EXPECT_EQ(verify_corner_triple(h, t), "");
}

TEST(CornerTriples, LongCycleIsStronglyIncomparable) {
  for (int len : {10, 12}) {
    Graph h = cycle_graph(len);
    auto t = find_corner_triple(h);
    EXPECT_EQ(t.kind, TripleCase::strong);
    EXPECT_EQ(verify_corner_triple(h, t), "");
    auto broken = t;
    std::swap(broken.fam[0][0], broken.fam[0][2]);
    EXPECT_NE(verify_corner_triple(h, broken), "");
  }
}

TEST(CornerTriples, RejectsCircularArcComplement) {
  EXPECT_THROW(find_corner_triple(path_graph(5)), precondition_violated);
}

TEST(WalkPaths, SingletonsWithMutualAvoidance) {
  Graph h = cycle_graph(10);
  auto t = find_corner_triple(h);
  const auto& f = t.fam[2];
  Gadget p = build_walk_path(h, {f[0]}, {f[2]}, true);
  Relation want{{f[0].front(), f[0].back()}, {f[2].front(), f[2].back()}};
  EXPECT_EQ(gadget_relation(h, p), want);
  EXPECT_EQ(path_oracle(h, p), want);
}

TEST(WalkPaths, SingleWalkContainsItsEnds) {
  Graph h = cycle_graph(6);
  Walk w{0, 1, 2, 3};
  Gadget p = build_walk_path(h, {w}, {}, false);
  EXPECT_TRUE(gadget_relation(h, p).count({0, 3}));
}

TEST(WalkPaths, PreconditionsChecked) {
  Graph h = cycle_graph(6);
  EXPECT_THROW(build_walk_path(h, {{0, 1, 2}}, {{0, 5, 4}}, false), precondition_violated);  // shared start
  EXPECT_THROW(build_walk_path(h, {{0, 1}}, {{2, 3, 4}}, false), precondition_violated);     // lengths differ
  EXPECT_THROW(build_walk_path(h, {{0, 2}}, {}, false), precondition_violated);              // not a walk
  EXPECT_THROW(build_walk_path(h, {{0, 1, 2}}, {{4, 3, 2}}, false), precondition_violated);  // shared end
}

TEST(WalkPaths, CompositionIsRelationalJoin) {
  for (int len : {10, 12}) {
    Graph h = cycle_graph(len);
    auto t = find_corner_triple(h);
    std::vector<Gadget> parts;
    for (int c = 0; c < 3; ++c) {
      const auto& f = t.fam[c];
      parts.push_back(build_walk_path(h, {f[0], f[1]}, {f[2]}, true));
      parts.push_back(build_walk_path(h, {reversed(f[0]), reversed(f[1])}, {reversed(f[2])}, true));
    }
    int checked = 0;
    for (const auto& a : parts)
      for (const auto& b : parts) {
        if (a.lists[a.port("out")] != b.lists[b.port("in")]) continue;
        Gadget ab = chain("ab", {a, b});
        Relation r = gadget_relation(h, ab);
        EXPECT_EQ(r, join(path_oracle(h, a), path_oracle(h, b)));
        EXPECT_EQ(r, path_oracle(h, ab));
        ++checked;
      }
    EXPECT_GT(checked, 5);
  }
}

TEST(RelationGadgets, ExplicitNandLists) {
  Graph h = cycle_graph(6);
  auto t = find_corner_triple(h);
  Gadget n = build_nand2(h, t);
  std::vector<std::vector<std::string>> want{{"w1", "w5"}, {"w2", "w6"}, {"w1", "w3"}, {"w2", "w4"}, {"w1", "w5"}};
  ASSERT_EQ(n.size(), 5);
  for (int i = 0; i < 5; ++i) {
    std::vector<std::string> got;
    for (int v : n.lists[i]) got.push_back(h.label(v));
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, want[i]);
  }
}

TEST(RelationGadgets, NandAndOrContracts) {
  for (auto tg : {c6(), c8(), Target{cycle_graph(10), {}}}) {
    const Graph& h = tg.h;
    auto t = find_corner_triple(h);
    for (int g : {4, 8}) {
      Gadget n = build_nand2(h, t, g);
      EXPECT_TRUE(check_nand2(h, t, n, g).empty()) << h.size() << " g=" << g;
      EXPECT_EQ(gadget_relation(h, n), path_oracle(h, n));
      for (int k = 2; k <= 4; ++k) {
        Gadget o = build_or_k(h, t, k, g);
        auto bad = check_or_k(h, t, o, k, g);
        EXPECT_TRUE(bad.empty()) << h.size() << " k=" << k << " g=" << g << " " << (bad.empty() ? "" : bad[0]);
        EXPECT_EQ(gadget_relation(h, o), oracle_relation(h, o));
      }
    }
  }
}

TEST(RelationGadgets, OrTwoFromOrThree) {
  Graph h = cycle_graph(6);
  auto t = find_corner_triple(h);
  Gadget o = build_or_k(h, t, 2);
  Relation want{{t.alpha, t.beta}, {t.beta, t.alpha}, {t.beta, t.beta}};
  EXPECT_EQ(gadget_relation(h, o), want);
}

TEST(Distinguishers, AllPairsOnCycles) {
  for (auto tg : {c6(), c8()}) {
    auto t = find_corner_triple(tg.h);
    for (int a : tg.s)
      for (int b : tg.s) {
        if (a == b) continue;
        Gadget d = synthesize_distinguisher(tg.h, t, tg.s, a, b, 4);
        auto bad = check_distinguisher(tg.h, t, tg.s, a, b, d, 4);
        EXPECT_TRUE(bad.empty()) << bad.front();
        EXPECT_EQ(gadget_relation(tg.h, d), path_oracle(tg.h, d));
      }
  }
}

TEST(Distinguishers, SpecificC6Instance) {
  auto tg = c6();
  auto t = find_corner_triple(tg.h);
  int w3 = idx(tg.h, "w3"), w5 = idx(tg.h, "w5"), w1 = idx(tg.h, "w1");
  Gadget d = synthesize_distinguisher(tg.h, t, tg.s, w3, w5);
  auto rel = path_oracle(tg.h, d);
  EXPECT_TRUE(rel.count({w1, t.alpha}) || rel.count({w1, t.beta}));
  EXPECT_FALSE(rel.count({w3, t.beta}));
  EXPECT_THROW(synthesize_distinguisher(tg.h, t, tg.s, w3, w3), precondition_violated);
}

TEST(AssignmentGadgets, DetectorContracts) {
  for (auto tg : {c6(), c8()}) {
    auto t = find_corner_triple(tg.h);
    for (int g : {4, 8})
      for (int u : tg.s) {
        Gadget f = build_detector(tg.h, t, tg.s, u, g);
        auto bad = check_detector(tg.h, t, tg.s, u, f, g);
        EXPECT_TRUE(bad.empty()) << bad.front();
        EXPECT_EQ(gadget_relation(tg.h, f), oracle_relation(tg.h, f));
      }
  }
}

TEST(AssignmentGadgets, AssignmentContracts) {
  for (auto tg : {c6(), c8()}) {
    auto t = find_corner_triple(tg.h);
    for (int g : {4, 8})
      for (int v : tg.s) {
        Gadget a = build_assignment(tg.h, t, tg.s, v, g);
        auto bad = check_assignment(tg.h, t, tg.s, v, a, g);
        EXPECT_TRUE(bad.empty()) << bad.front();
        EXPECT_EQ(a.g.degree(a.port("x")), static_cast<int>((tg.s.size() - 1) * (tg.s.size() - 1)));
        EXPECT_EQ(gadget_relation(tg.h, a), oracle_relation(tg.h, a, {a.port("x")}));
      }
  }
}

TEST(AssignmentGadgets, PathPu) {
  for (auto tg : {c6(), c8(), Target{cycle_graph(10), {}}}) {
    auto t = find_corner_triple(tg.h);
    Gadget p = build_pu(tg.h, t, 6);
    const int a = t.alpha, b = t.beta, c = t.gamma;
    Relation want{{a, a}, {a, b}, {a, c}, {b, a}, {b, b}};
    EXPECT_EQ(gadget_relation(tg.h, p), want);
    EXPECT_GE(distance(p.g, p.port("c"), p.port("y")), 6);
  }
}

TEST(SwitchingGadgets, Contracts) {
  for (auto tg : {c6(), c8(), Target{cycle_graph(10), {}}}) {
    auto t = find_corner_triple(tg.h);
    for (int g : {4, 8}) {
      Gadget s = build_switching(tg.h, t, g);
      auto bad = check_switching(tg.h, t, s, g);
      EXPECT_TRUE(bad.empty()) << bad.front();
      EXPECT_EQ(gadget_relation(tg.h, s), oracle_relation(tg.h, s));
    }
  }
}

TEST(GeneralCase, AssignmentOnTenCycle) {
  Graph h = cycle_graph(10);
  auto t = find_corner_triple(h);
  auto bp = bipartition(h);
  VertexSet s = bp.side[t.alpha] == 0 ? bp.x : bp.y;
  for (int v : {s.front(), s.back()}) {
    Gadget a = build_assignment(h, t, s, v, 4);
    auto bad = check_assignment(h, t, s, v, a, 4);
    EXPECT_TRUE(bad.empty()) << bad.front();
  }
}
