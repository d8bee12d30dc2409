#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "colorlimits/colorlimits.hpp"
#include "colorlimits/worked_examples.hpp"

using namespace colorlimits;

namespace {

MultiGraph random_graph(std::size_t n, std::size_t m, std::size_t letters, Rng& rng) {
  std::vector<Feature> features(n);
  for (auto& f : features) f = Feature(std::string(1, static_cast<char>('a' + rng.below(letters))));
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < m; ++i) edges.push_back({static_cast<NodeId>(rng.below(n)), static_cast<NodeId>(rng.below(n))});
  return MultiGraph(std::move(features), std::move(edges));
}

// CR^k(v) written out as a string, recomputed from scratch per node.
std::string cr_string(const MultiGraph& g, NodeId v, std::size_t k) {
  std::string s = "[" + g.feature(v).name();
  if (k > 0) {
    std::vector<std::string> kids;
    for (auto w : g.neighbors(v)) kids.push_back(cr_string(g, w, k - 1));
    std::sort(kids.begin(), kids.end());
    for (const auto& x : kids) s += x;
  }
  return s + "]";
}

// Textbook 1-WL with (own class, neighbor classes) signatures.
std::vector<std::vector<int>> wl_partitions(const MultiGraph& g, std::size_t rounds) {
  std::vector<std::vector<int>> out;
  std::map<std::string, int> ids;
  std::vector<int> cls(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) cls[v] = ids.emplace(g.feature(v).name(), ids.size()).first->second;
  out.push_back(cls);
  for (std::size_t r = 0; r < rounds; ++r) {
    std::map<std::vector<int>, int> sig;
    std::vector<int> next(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v) {
      std::vector<int> key{cls[v]};
      std::vector<int> nb;
      for (auto w : g.neighbors(v)) nb.push_back(cls[w]);
      std::sort(nb.begin(), nb.end());
      key.insert(key.end(), nb.begin(), nb.end());
      next[v] = sig.emplace(key, sig.size()).first->second;
    }
    cls = next;
    out.push_back(cls);
  }
  return out;
}

std::vector<std::uint32_t> normalize(const std::vector<int>& xs) {
  std::vector<ColorId> ids(xs.begin(), xs.end());
  return Coloring::normalize_partition(ids);
}

bool refines(const std::vector<ColorId>& finer, const std::vector<ColorId>& coarser) {
  std::map<ColorId, ColorId> m;
  for (std::size_t v = 0; v < finer.size(); ++v) {
    auto [it, fresh] = m.emplace(finer[v], coarser[v]);
    if (!fresh && it->second != coarser[v]) return false;
  }
  return true;
}

}  // namespace

TEST(Refine, RoundZeroIsFeaturePartition) {
  const auto g = examples::five_node_graph();
  const auto c = refine(g, 0);
  for (NodeId v = 0; v < 5; ++v) {
    for (NodeId w = 0; w < 5; ++w) EXPECT_EQ(c.color(0, v) == c.color(0, w), g.feature(v) == g.feature(w));
  }
}

TEST(Refine, FiveNodeGraphDepthThreeTree) {
  auto registry = std::make_shared<ColorRegistry>();
  const auto c = refine(examples::five_node_graph(), 3, registry);
  EXPECT_EQ(*registry->expand(c.color(3, 3)), examples::depth_three_member());
  EXPECT_EQ(cr_string(examples::five_node_graph(), 3, 3), [&] {
    std::function<std::string(const CanonicalTree&)> enc = [&](const CanonicalTree& t) {
      std::vector<std::string> kids;
      for (const auto& ch : t.children()) kids.push_back(enc(ch));
      std::sort(kids.begin(), kids.end());
      std::string s = "[" + t.root_feature().name();
      for (const auto& x : kids) s += x;
      return s + "]";
    };
    return enc(examples::depth_three_member());
  }());
}

TEST(Refine, TwoRegularGraphsGiveBinaryTrees) {
  auto registry = std::make_shared<ColorRegistry>();
  std::vector<MultiGraph> graphs{cycle_graph(7), MultiGraph::unattributed(1, {{0, 0}}),
                                 MultiGraph::unattributed(2, {{0, 1}, {0, 1}}),
                                 MultiGraph::unattributed(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}})};
  for (std::size_t k = 0; k <= 4; ++k) {
    const auto bt = registry->intern(regular_unrolling(k, 2));
    for (const auto& g : graphs) {
      const auto c = refine(g, k, registry);
      for (NodeId v = 0; v < g.node_count(); ++v) EXPECT_EQ(c.color(k, v), bt);
    }
  }
}

TEST(Refine, MatchesExplicitTreesAndTextbookWl) {
  Rng rng(3);
  for (int rep = 0; rep < 40; ++rep) {
    const auto n = 1 + rng.below(12);
    const auto g = random_graph(n, rng.below(2 * n), 2, rng);
    const std::size_t k = 3;
    const auto c = refine(g, k);
    const auto wl = wl_partitions(g, k);
    for (std::size_t j = 0; j <= k; ++j) {
      EXPECT_EQ(c.partition(j), normalize(wl[j]));
      for (NodeId v = 0; v < n; ++v) {
        for (NodeId w = 0; w < n; ++w) {
          EXPECT_EQ(c.color(j, v) == c.color(j, w), cr_string(g, v, j) == cr_string(g, w, j));
        }
      }
    }
  }
}

TEST(Refine, RoundsRefineEachOther) {
  Rng rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    const auto n = 1 + rng.below(200);
    const auto g = random_graph(n, rng.below(3 * n), 3, rng);
    const auto c = refine(g, 6);
    for (std::size_t j = 0; j < 6; ++j) EXPECT_TRUE(refines(c.round(j + 1), c.round(j)));
  }
}

TEST(Refine, ExpandedColorsHaveBoundedDepthAndRootFeature) {
  Rng rng(6);
  auto registry = std::make_shared<ColorRegistry>();
  const auto g = random_graph(60, 90, 3, rng);
  const auto c = refine(g, 3, registry);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto t = registry->expand(c.color(3, v));
    EXPECT_LE(t->depth(), 3u);
    EXPECT_EQ(t->root_feature(), g.feature(v));
    EXPECT_EQ(registry->truncate(c.color(3, v), 1), c.color(1, v));
  }
}

TEST(StableColoring, AgreesWithTextbookWl) {
  // oracle: least j whose partition equals the next one
  const auto oracle = [](const MultiGraph& g) {
    const auto wl = wl_partitions(g, g.node_count() + 1);
    for (std::size_t j = 0;; ++j) {
      if (normalize(wl[j]) == normalize(wl[j + 1])) return j;
    }
  };
  std::vector<MultiGraph> graphs;
  std::vector<Edge> complete;
  for (NodeId a = 0; a < 5; ++a) {
    for (NodeId b = a + 1; b < 5; ++b) complete.push_back({a, b});
  }
  graphs.push_back(MultiGraph::unattributed(5, complete));
  graphs.push_back(MultiGraph::unattributed(4, {{0, 1}, {1, 2}, {2, 3}}));
  graphs.push_back(MultiGraph::unattributed(7, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}}));
  graphs.push_back(examples::five_node_graph());
  Rng rng(8);
  for (int rep = 0; rep < 30; ++rep) graphs.push_back(random_graph(1 + rng.below(30), rng.below(40), 2, rng));
  for (const auto& g : graphs) {
    const auto s = stable_coloring(g);
    EXPECT_EQ(s.k0, oracle(g));
    EXPECT_LE(s.k0, g.node_count());
  }
  EXPECT_EQ(stable_coloring(graphs[0]).k0, 0u);
  EXPECT_EQ(stable_coloring(graphs[1]).k0, 1u);  // ends vs middle after one round, then stable
  EXPECT_EQ(stable_coloring(graphs[2]).k0, 3u);
}

TEST(Mp, MemberAndNonMemberTrees) {
  EXPECT_TRUE(mp_membership(examples::depth_three_member(), 3));
  EXPECT_FALSE(mp_membership(examples::depth_three_non_member(), 3));
  EXPECT_EQ(cr_closure(examples::depth_three_non_member(), 3), examples::depth_three_member());
}

TEST(Mp, ShallowTreesAlwaysMembers) {
  for (const char* term : {"(a)", "(a b)", "(a b c c d)"}) EXPECT_TRUE(mp_membership(parse_term(term), 1));
  EXPECT_THROW(mp_membership(parse_term("(a (b c))"), 1), InvalidArgument);
}

TEST(Mp, LeafClosure) {
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(cr_closure(leaf(Feature("x")), k), leaf(Feature("x")));
}

TEST(Mp, RefinementColorsAreMembersWithWitness) {
  Rng rng(9);
  for (int rep = 0; rep < 25; ++rep) {
    auto registry = std::make_shared<ColorRegistry>();
    const auto n = 2 + rng.below(25);
    const auto g = random_graph(n, rng.below(2 * n), 2, rng);
    for (std::size_t k = 1; k <= 3; ++k) {
      const auto c = refine(g, k, registry);
      for (NodeId v = 0; v < n; ++v) {
        const auto t = *registry->expand(c.color(k, v));
        ASSERT_TRUE(mp_membership(t, k));
        const auto w = mp_witness(t, k);
        EXPECT_EQ(cr_closure(w, k, registry), t);
      }
    }
  }
}

TEST(Mp, WitnessRejectsNonMembers) {
  EXPECT_THROW(mp_witness(examples::depth_three_non_member(), 3), NotInMPk);
}

TEST(Registry, InternExpandBijection) {
  ColorRegistry registry;
  const auto t = examples::depth_three_member();
  const auto id = registry.intern(t);
  EXPECT_EQ(*registry.expand(id), t);
  EXPECT_EQ(registry.intern(t), id);
  EXPECT_EQ(registry.find(t), id);
  EXPECT_FALSE(registry.find(parse_term("(zz)")).has_value());
  for (std::size_t d = 0; d <= 3; ++d) EXPECT_EQ(*registry.expand(registry.truncate(id, d)), t.truncate(d));
  EXPECT_EQ(registry.depth(id), 3u);
  EXPECT_EQ(registry.tree_size(id), t.size());
}

TEST(Registry, ExpandBudget) {
  ColorRegistry registry(10);
  const auto id = registry.intern(regular_unrolling(4, 2));
  EXPECT_THROW(registry.expand(id), BudgetExceeded);
  EXPECT_EQ(registry.tree_size(id), 31u);
}

TEST(Registry, ConcurrentInterningIsConsistent) {
  auto registry = std::make_shared<ColorRegistry>();
  Rng rng(12);
  std::vector<MultiGraph> graphs;
  for (int i = 0; i < 8; ++i) graphs.push_back(random_graph(300, 400, 2, rng));
  const auto colorings = parallel_map(graphs.size(), 4, [&](std::size_t i) { return refine(graphs[i], 3, registry); });
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const auto serial = refine(graphs[i], 3);
    EXPECT_EQ(colorings[i].partition(3), serial.partition(3));
    for (NodeId v = 0; v < 20; ++v) {
      EXPECT_EQ(*registry->expand(colorings[i].color(3, v)), *serial.registry().expand(serial.color(3, v)));
    }
  }
}
