#include <algorithm>
#include <functional>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "colorlimits/colorlimits.hpp"
#include "colorlimits/worked_examples.hpp"

using namespace colorlimits;

namespace {

// Serialization used only by the oracles below.
std::string serialize(const RootedTree& t) {
  std::string s = "[" + t.feature.name();
  for (const auto& c : t.children) s += serialize(c);
  return s + "]";
}

// Minimum serialization over every ordering of every child list, enumerated in full.
std::vector<std::string> all_serializations(const RootedTree& t) {
  std::vector<std::vector<std::string>> per_child;
  for (const auto& c : t.children) per_child.push_back(all_serializations(c));
  std::vector<std::size_t> order(t.children.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::string> out;
  do {
    std::vector<std::string> partial{"[" + t.feature.name()};
    for (auto i : order) {
      std::vector<std::string> next;
      for (const auto& p : partial) {
        for (const auto& s : per_child[i]) next.push_back(p + s);
      }
      partial = std::move(next);
    }
    for (auto& p : partial) out.push_back(p + "]");
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

std::string brute_force_min(const RootedTree& t) {
  const auto all = all_serializations(t);
  return *std::min_element(all.begin(), all.end());
}

// Recursive sorted-string code, for trees too large to enumerate.
std::string sorted_code(const RootedTree& t) {
  std::vector<std::string> kids;
  for (const auto& c : t.children) kids.push_back(sorted_code(c));
  std::sort(kids.begin(), kids.end());
  std::string s = "[" + t.feature.name();
  for (const auto& k : kids) s += k;
  return s + "]";
}

RootedTree shuffled(const RootedTree& t, Rng& rng) {
  RootedTree out{t.feature, {}};
  for (const auto& c : t.children) out.children.push_back(shuffled(c, rng));
  shuffle(out.children, rng);
  return out;
}

RootedTree random_tree(std::size_t nodes, Rng& rng) {
  const std::vector<Feature> alphabet{Feature("a"), Feature("b"), Feature("c")};
  std::vector<std::size_t> parent(nodes, 0);
  for (std::size_t i = 1; i < nodes; ++i) parent[i] = rng.below(i);
  std::vector<RootedTree> built(nodes);
  for (std::size_t i = 0; i < nodes; ++i) built[i].feature = alphabet[rng.below(alphabet.size())];
  for (std::size_t i = nodes; i-- > 1;) built[parent[i]].children.push_back(std::move(built[i]));
  return std::move(built[0]);
}

MultiGraph random_multigraph(std::size_t n, std::size_t m, Rng& rng) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < m; ++i) {
    edges.push_back({static_cast<NodeId>(rng.below(n)), static_cast<NodeId>(rng.below(n))});
  }
  return MultiGraph::unattributed(n, std::move(edges));
}

// Ball oracle: BFS node set, then induced edge count with multiplicity.
bool ball_has_cycle(const MultiGraph& g, NodeId v, std::size_t k, std::size_t& ball_size) {
  std::vector<int> dist(g.node_count(), -1);
  std::queue<NodeId> q;
  dist[v] = 0;
  q.push(v);
  std::set<NodeId> members{v};
  while (!q.empty()) {
    auto u = q.front();
    q.pop();
    if (static_cast<std::size_t>(dist[u]) == k) continue;
    for (auto w : g.neighbors(u)) {
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        members.insert(w);
        q.push(w);
      }
    }
  }
  std::size_t induced = 0;
  for (const auto& e : g.edges()) induced += members.count(e.u) && members.count(e.v) ? 1 : 0;
  ball_size = members.size();
  return induced >= members.size();
}

}  // namespace

TEST(Feature, EqualityIsTokenEquality) {
  EXPECT_EQ(Feature("red"), Feature("red"));
  EXPECT_NE(Feature("red"), Feature("Red"));
  EXPECT_EQ(Feature().name(), "_");
}

TEST(MultiGraph, HandshakeWithLoopsAndMultiEdges) {
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const auto g = random_multigraph(1 + rng.below(40), rng.below(120), rng);
    std::size_t sum = 0;
    for (NodeId v = 0; v < g.node_count(); ++v) sum += g.degree(v);
    EXPECT_EQ(sum, 2 * g.edge_count());
  }
}

TEST(MultiGraph, LoopAppearsTwiceAndMultiEdgesKeepMultiplicity) {
  const auto g = MultiGraph::unattributed(2, {{0, 0}, {0, 1}, {0, 1}, {0, 1}});
  EXPECT_EQ(g.degree(0), 5u);
  EXPECT_EQ(std::count(g.neighbors(0).begin(), g.neighbors(0).end(), 0u), 2);
  EXPECT_EQ(std::count(g.neighbors(0).begin(), g.neighbors(0).end(), 1u), 3);
  EXPECT_EQ(g.degree(1), 3u);
}

TEST(MultiGraph, RejectsDanglingEndpoint) {
  EXPECT_THROW(MultiGraph::unattributed(2, {{0, 2}}), InvalidArgument);
}

TEST(Canonical, LeafAndChildOrder) {
  EXPECT_EQ(to_term(canonical_encode(RootedTree{Feature("red"), {}})), "(red)");
  const RootedTree a{Feature("red"), {{Feature("blue"), {}}, {Feature("red"), {}}}};
  const RootedTree b{Feature("red"), {{Feature("red"), {}}, {Feature("blue"), {}}}};
  EXPECT_EQ(canonical_encode(a), canonical_encode(b));
}

TEST(Canonical, MemberTreeShuffledMatchesBruteForce) {
  const auto t = to_rooted(examples::depth_three_member());
  const auto reference = canonical_encode(t);
  const auto oracle = brute_force_min(t);
  Rng rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    const auto s = shuffled(t, rng);
    EXPECT_EQ(canonical_encode(s), reference);
    EXPECT_EQ(brute_force_min(s), oracle);
  }
  // the encoding is a representative of the same isomorphism class
  EXPECT_EQ(brute_force_min(to_rooted(reference)), oracle);
}

TEST(Canonical, RandomTreesIdempotentAndOrderInvariant) {
  Rng rng(17);
  for (int rep = 0; rep < 200; ++rep) {
    const auto t = random_tree(1 + rng.below(100), rng);
    const auto c = canonical_encode(t);
    EXPECT_EQ(canonical_encode(to_rooted(c)), c);
    EXPECT_EQ(canonical_encode(shuffled(t, rng)), c);
    EXPECT_EQ(sorted_code(to_rooted(c)), sorted_code(t));
    EXPECT_EQ(c.size(), [&] {
      std::function<std::size_t(const RootedTree&)> n = [&](const RootedTree& x) {
        std::size_t s = 1;
        for (const auto& ch : x.children) s += n(ch);
        return s;
      };
      return n(t);
    }());
  }
}

TEST(Canonical, EqualCodesIffIsomorphic) {
  Rng rng(23);
  for (int rep = 0; rep < 300; ++rep) {
    const auto a = random_tree(1 + rng.below(8), rng);
    const auto b = random_tree(1 + rng.below(8), rng);
    EXPECT_EQ(canonical_encode(a) == canonical_encode(b), brute_force_min(a) == brute_force_min(b));
  }
}

TEST(Canonical, DepthAndTruncate) {
  const auto t = examples::depth_three_member();
  EXPECT_EQ(t.depth(), 3u);
  EXPECT_EQ(t.truncate(1), parse_term("(red red red)"));
  EXPECT_EQ(t.truncate(0), leaf(Feature("red")));
}

TEST(Term, RoundTripAndErrors) {
  const auto t = examples::depth_three_member();
  EXPECT_EQ(parse_term(to_term(t)), t);
  EXPECT_EQ(parse_term("(a (b) c)"), parse_term("(a c b)"));
  EXPECT_THROW(parse_term("(a"), ParseError);
  EXPECT_THROW(parse_term("(a) b"), ParseError);
  EXPECT_THROW(parse_term("()"), ParseError);
}

TEST(Ball, SmallCases) {
  const auto isolated = MultiGraph::unattributed(1, {});
  EXPECT_EQ(std::get<CanonicalTree>(ball(isolated, 0, 3)), leaf(default_feature()));

  const auto path = MultiGraph::unattributed(3, {{0, 1}, {1, 2}});
  EXPECT_EQ(std::get<CanonicalTree>(ball(path, 1, 1)), parse_term("(_ _ _)"));

  const auto triangle = MultiGraph::unattributed(3, {{0, 1}, {1, 2}, {2, 0}});
  EXPECT_TRUE(is_cyclic(ball(triangle, 0, 1)));
  EXPECT_TRUE(is_cyclic(ball(MultiGraph::unattributed(1, {{0, 0}}), 0, 1)));
  EXPECT_TRUE(is_cyclic(ball(MultiGraph::unattributed(2, {{0, 1}, {0, 1}}), 0, 1)));
  EXPECT_THROW(ball(path, 7, 1), InvalidArgument);
}

TEST(Ball, MatchesBfsOracleOnRandomGraphs) {
  Rng rng(29);
  for (int rep = 0; rep < 200; ++rep) {
    const auto n = 1 + rng.below(50);
    const auto g = random_multigraph(n, rng.below(n + 5), rng);
    const auto v = static_cast<NodeId>(rng.below(n));
    const auto k = rng.below(4);
    std::size_t size = 0;
    const bool cyclic = ball_has_cycle(g, v, k, size);
    const auto b = ball(g, v, k);
    ASSERT_EQ(is_cyclic(b), cyclic);
    if (!cyclic) {
      EXPECT_EQ(std::get<CanonicalTree>(b).size(), size);
      EXPECT_LE(std::get<CanonicalTree>(b).depth(), k);
    }
  }
}

TEST(GraphIo, EmptyGraph) {
  std::stringstream ss("t 0\n");
  const auto g = read_graph(ss);
  EXPECT_EQ(g.node_count(), 0u);
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST(GraphIo, FiveNodeGraphRoundTrip) {
  const auto g = examples::five_node_graph();
  std::stringstream ss;
  write_graph(g, ss);
  const auto h = read_graph(ss);
  ASSERT_EQ(h.node_count(), 5u);
  EXPECT_EQ(h.edges(), g.edges());
  for (NodeId v = 0; v < 5; ++v) EXPECT_EQ(h.feature(v), g.feature(v));
}

TEST(GraphIo, LoopAndTripleEdgeKeepMultiplicity) {
  const auto g = MultiGraph::unattributed(3, {{0, 0}, {1, 2}, {1, 2}, {2, 1}});
  std::stringstream ss;
  write_graph(g, ss);
  const auto h = read_graph(ss);
  auto key = [](const MultiGraph& x) {
    std::multiset<std::pair<NodeId, NodeId>> s;
    for (const auto& e : x.edges()) s.emplace(std::min(e.u, e.v), std::max(e.u, e.v));
    return s;
  };
  EXPECT_EQ(key(h), key(g));
  EXPECT_EQ(h.degree(0), 2u);
}

TEST(GraphIo, DefaultFeatureAndErrors) {
  std::stringstream ok("# comment\nt 2\ne 0 1\n");
  const auto g = read_graph(ok);
  EXPECT_EQ(g.feature(0), default_feature());
  for (const char* bad : {"t 2\ne 0 5\n", "t 2\nn 0 a\nn 0 b\n", "t 2\nx 1\n", "e 0 1\n", "t 2\ne 0\n", "t two\n"}) {
    std::stringstream ss(bad);
    EXPECT_THROW(read_graph(ss), ParseError) << bad;
  }
}
