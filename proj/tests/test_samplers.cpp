#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "colorlimits/colorlimits.hpp"
#include "colorlimits/worked_examples.hpp"

using namespace colorlimits;

namespace {

std::size_t loops(const MultiGraph& g) {
  std::size_t n = 0;
  for (const auto& e : g.edges()) n += e.u == e.v ? 1 : 0;
  return n;
}

bool simple(const MultiGraph& g) {
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const auto& e : g.edges()) {
    if (e.u == e.v) return false;
    if (!seen.emplace(std::min(e.u, e.v), std::max(e.u, e.v)).second) return false;
  }
  return true;
}

std::multiset<TypeId> neighbor_types(const MultiGraph& g, const std::vector<TypeId>& types, NodeId v) {
  std::multiset<TypeId> out;
  for (auto w : g.neighbors(v)) out.insert(types[w]);
  return out;
}

std::multiset<TypeId> as_set(const Multiset& m) {
  const auto xs = m.expanded();
  return {xs.begin(), xs.end()};
}

}  // namespace

TEST(Rng, DeterministicAndSubstreamsDiffer) {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 10; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
  }
  const Rng root(1);
  auto s1 = root.substream({1, 2});
  auto s1b = root.substream({1, 2});
  auto s2 = root.substream({2, 1});
  EXPECT_EQ(s1(), s1b());
  EXPECT_NE(root.substream({1, 2})(), s2());
}

TEST(Rng, BelowIsRoughlyUniform) {
  Rng rng(3);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[rng.below(7)];
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  EXPECT_LT(chi2, 30.0);  // 6 dof; p < 1e-4 above this
}

TEST(Cm, PointMassesAreExact) {
  Rng rng(1);
  const auto empty = sample_cm(50, DegreePmf::point(0), rng);
  EXPECT_EQ(empty.edge_count(), 0u);
  const auto two = sample_cm(200, DegreePmf::point(2), rng);
  for (NodeId v = 0; v < 200; ++v) EXPECT_EQ(two.degree(v), 2u);
  const auto three = sample_cm(201, DegreePmf::point(3), rng);  // odd stub count drops one
  std::size_t short_nodes = 0;
  for (NodeId v = 0; v < 201; ++v) {
    EXPECT_GE(three.degree(v) + 1, 3u);
    short_nodes += three.degree(v) == 2 ? 1 : 0;
  }
  EXPECT_EQ(short_nodes, 1u);
}

TEST(Cm, DegreesMatchDrawsUpToOneStub) {
  Rng rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    const auto s = sample_cm_detailed(500, DegreePmf::poisson(2.0), rng);
    std::size_t drawn = 0, missing = 0;
    for (NodeId v = 0; v < 500; ++v) {
      ASSERT_LE(s.graph.degree(v), s.drawn_degrees[v]);
      missing += s.drawn_degrees[v] - s.graph.degree(v);
      drawn += s.drawn_degrees[v];
    }
    EXPECT_EQ(missing, drawn % 2);
  }
}

TEST(Cm, ExpectedLoopCountForTwoRegular) {
  // 2t stubs paired uniformly: each node closes a loop with probability 1 / (2t - 1)
  Rng rng(4);
  const std::size_t t = 30;
  const int reps = 4000;
  double total = 0.0;
  for (int r = 0; r < reps; ++r) total += static_cast<double>(loops(sample_cm(t, DegreePmf::point(2), rng)));
  const double expected = static_cast<double>(t) / (2.0 * t - 1.0);
  EXPECT_NEAR(total / reps, expected, 4.0 * std::sqrt(expected / reps));
}

TEST(Cm, PoissonDegreeAndSizeBiasedNeighborDegree) {
  Rng rng(5);
  const double lambda = 2.0;
  const auto g = sample_cm(200000, DegreePmf::poisson(lambda), rng);
  std::vector<double> deg(12, 0.0), nbr(12, 0.0);
  double endpoints = 0.0;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (g.degree(v) < 12) deg[g.degree(v)] += 1.0 / static_cast<double>(g.node_count());
    for (auto w : g.neighbors(v)) {
      if (g.degree(w) >= 1 && g.degree(w) - 1 < 12) nbr[g.degree(w) - 1] += 1.0;
      endpoints += 1.0;
    }
  }
  // the forward degree of a neighbor is again Poisson(lambda)
  double p = std::exp(-lambda);
  for (std::size_t d = 0; d < 8; ++d) {
    if (d > 0) p *= lambda / static_cast<double>(d);
    EXPECT_NEAR(deg[d], p, 0.005) << d;
    EXPECT_NEAR(nbr[d] / endpoints, p, 0.005) << d;
  }
}

TEST(Bcm, BipartiteAndSmallerSideExact) {
  Rng rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    const auto s = sample_bcm_detailed(400, DegreePmf::point(3), DegreePmf::poisson(1.5), rng);
    std::size_t left = 0, right = 0;
    for (NodeId v = 0; v < 400; ++v) (s.is_left[v] ? left : right) += s.drawn_degrees[v];
    for (const auto& e : s.graph.edges()) EXPECT_NE(s.is_left[e.u], s.is_left[e.v]);
    EXPECT_EQ(s.graph.edge_count(), std::min(left, right));
    const bool left_small = left <= right;
    for (NodeId v = 0; v < 400; ++v) {
      if (s.is_left[v] == left_small) {
        EXPECT_EQ(s.graph.degree(v), s.drawn_degrees[v]);
      }
    }
  }
}

TEST(Bcm, SideProportions) {
  Rng rng(7);
  const auto s = sample_bcm_detailed(100000, DegreePmf::point(1), DegreePmf::point(3), rng);
  std::size_t left = 0;
  for (bool b : s.is_left) left += b ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(left) / 100000.0, 0.75, 0.01);
}

TEST(Rcm, BalancedAssignmentsAreRealizedExactly) {
  const auto table = examples::five_node_type_table();
  Rng rng(8);
  for (int rep = 0; rep < 50; ++rep) {
    const auto g = rcm_match(table.types, table.neighborhoods, table.type_features, rng);
    for (NodeId v = 0; v < 5; ++v) {
      EXPECT_EQ(neighbor_types(g, table.types, v), as_set(table.neighborhoods[v]));
      EXPECT_EQ(g.feature(v), table.type_features[table.types[v]]);
    }
  }
}

TEST(Rcm, EmptyNeighborhoodsGiveIsolatedNodes) {
  RcmParams p{{"s"}, {Feature("x")}, {{0, Multiset{}, 1.0}}};
  Rng rng(9);
  const auto g = sample_rcm(100, p, rng);
  EXPECT_EQ(g.edge_count(), 0u);
  EXPECT_EQ(g.feature(17), Feature("x"));
}

TEST(Rcm, NeighborTypesNeverExceedRequests) {
  RcmParams p;
  p.type_names = {"r", "b"};
  p.features = {Feature("red"), Feature("blue")};
  p.mu = {{0, Multiset::of({0, 1}), 0.4}, {0, Multiset::of({1, 1, 1}), 0.2}, {1, Multiset::of({0}), 0.3},
          {1, Multiset::of({0, 0, 1}), 0.1}};
  Rng rng(10);
  for (int rep = 0; rep < 20; ++rep) {
    const auto s = sample_rcm_detailed(300, p, rng);
    for (NodeId v = 0; v < 300; ++v) {
      const auto got = neighbor_types(s.graph, s.types, v);
      const auto want = s.neighborhoods[v];
      for (TypeId q = 0; q < 2; ++q) EXPECT_LE(got.count(q), want.count(q));
    }
  }
}

TEST(Rcm, SingleTypeMatchesTwoRegularCm) {
  const auto p = examples::single_type_rcm(DegreePmf::point(2), Feature());
  Rng rng(11);
  const std::size_t t = 30;
  const int reps = 4000;
  double total = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto g = sample_rcm(t, p, rng);
    for (NodeId v = 0; v < t; ++v) ASSERT_EQ(g.degree(v), 2u);
    total += static_cast<double>(loops(g));
  }
  const double expected = static_cast<double>(t) / (2.0 * t - 1.0);
  EXPECT_NEAR(total / reps, expected, 4.0 * std::sqrt(expected / reps));
}

TEST(Rcm, RejectsBadParams) {
  RcmParams p{{"s"}, {Feature()}, {{0, Multiset{}, 0.5}}};
  Rng rng(1);
  EXPECT_THROW(sample_rcm(3, p, rng), InvalidArgument);
  p.mu = {{0, Multiset::of({4}), 1.0}};
  EXPECT_THROW(sample_rcm(3, p, rng), InvalidArgument);
}

TEST(Gwt, TwoColorDepthOneLaw) {
  const auto params = examples::two_color_gwt();
  const auto support = examples::two_color_depth_one_support();
  // root red 0.6 x (2/3, 1/3); root blue 0.4 x (1/2, 1/2)
  const std::vector<double> expected{0.4, 0.2, 0.2, 0.2};
  GwtSampler sampler(params);
  Rng rng(12);
  const int n = 40000;
  std::map<CanonicalTree, int> counts;
  for (int i = 0; i < n; ++i) ++counts[sampler.to_tree(sampler.sample(1, rng))];
  EXPECT_EQ(counts.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    const double sd = std::sqrt(expected[i] * (1 - expected[i]) / n);
    EXPECT_NEAR(counts[support[i]] / static_cast<double>(n), expected[i], 4 * sd) << to_term(support[i]);
  }
}

TEST(Gwt, DepthAndGraphShape) {
  GwtSampler sampler(examples::two_color_gwt());
  Rng rng(13);
  for (int rep = 0; rep < 50; ++rep) {
    const auto s = sampler.sample(3, rng);
    const auto g = sampler.to_graph(s);
    EXPECT_EQ(g.edge_count() + 1, g.node_count());
    for (const auto& n : s.nodes) EXPECT_LE(n.depth, 3u);
    EXPECT_EQ(sampler.to_tree(s).size(), s.nodes.size());
    EXPECT_LE(sampler.to_tree(s).depth(), 3u);
  }
}

TEST(Gwt, BudgetExceeded) {
  GwtParams p;
  p.type_names = {"s"};
  p.features = {Feature()};
  p.root = {1.0};
  p.offspring = {{{Multiset::of({0, 0}), 1.0}}};
  GwtSampler sampler(p, 1000);
  Rng rng(14);
  EXPECT_NO_THROW(sampler.sample(8, rng));
  EXPECT_THROW(sampler.sample(20, rng), BudgetExceeded);
}

TEST(Gwt, ParentEdgeConsumption) {
  // path limit: every node has two neighbors, one of which is its parent
  const auto p = examples::single_type_rcm(DegreePmf::point(2), Feature());
  const auto w = rcm_local_limit(p);
  GwtSampler sampler(w);
  Rng rng(15);
  const auto t = sampler.to_tree(sampler.sample(4, rng));
  EXPECT_EQ(t, parse_term("(_ (_ (_ (_ _))) (_ (_ (_ _))))"));
}

TEST(Pathological, Shapes) {
  Rng rng(16);
  int cycles = 0;
  for (int i = 0; i < 200; ++i) {
    const auto g = sample_pathological(PathologicalKind::isolated_or_cycle, 9, rng);
    EXPECT_TRUE(g.edge_count() == 0 || g.edge_count() == 9);
    cycles += g.edge_count() == 9 ? 1 : 0;
  }
  EXPECT_GT(cycles, 60);
  EXPECT_LT(cycles, 140);
  EXPECT_EQ(sample_pathological(PathologicalKind::three_cycles_or_big_cycle, 9, rng).edge_count(), 9u);
  const auto big = sample_pathological(PathologicalKind::three_cycles_or_big_cycle, 10, rng);
  EXPECT_EQ(big.edge_count(), 10u);
  EXPECT_THROW(sample_pathological(PathologicalKind::isolated_or_cycle, 2, rng), InvalidArgument);
}

TEST(Er, SparseMeanDegreeAndSimplicity) {
  Rng rng(17);
  const auto g = sample_er(20000, 3.0, rng);
  EXPECT_TRUE(simple(g));
  EXPECT_NEAR(2.0 * g.edge_count() / 20000.0, 3.0, 0.08);
}

TEST(Er, DenseEdgeCount) {
  Rng rng(18);
  const std::size_t t = 300;
  const auto g = sample_er_dense(t, 0.1, rng);
  EXPECT_TRUE(simple(g));
  const double pairs = t * (t - 1) / 2.0;
  EXPECT_NEAR(static_cast<double>(g.edge_count()), 0.1 * pairs, 4.0 * std::sqrt(pairs * 0.09));
  EXPECT_EQ(sample_er_dense(20, 1.0, rng).edge_count(), 190u);
  EXPECT_THROW(sample_er_dense(5, 1.5, rng), InvalidArgument);
}

TEST(Sbm, DisconnectedBlocksAndErrors) {
  Rng rng(19);
  const auto g = sample_sbm(5000, {0.5, 0.5}, {{0.0, 4.0}, {4.0, 0.0}}, rng);
  EXPECT_TRUE(simple(g));
  // bipartite between blocks: expected edges = 4 / t * (t/2)^2 = t
  EXPECT_NEAR(static_cast<double>(g.edge_count()), 5000.0, 300.0);
  EXPECT_THROW(sample_sbm(10, {0.5, 0.5}, {{1.0, 2.0}, {1.0, 1.0}}, rng), InvalidArgument);
  EXPECT_THROW(sample_sbm(10, {1.0}, {{1.0, 2.0}}, rng), InvalidArgument);
}

TEST(Samplers, SameSeedSameGraph) {
  const auto draw = [](std::uint64_t seed) {
    Rng rng(seed);
    return std::make_tuple(sample_cm(300, DegreePmf::poisson(2.0), rng).edges(), sample_er(300, 2.0, rng).edges(),
                           sample_rcm(300, examples::single_type_rcm(DegreePmf::poisson(1.0), Feature()), rng).edges());
  };
  EXPECT_EQ(draw(5), draw(5));
  EXPECT_NE(draw(5), draw(6));
}
