#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "colorlimits/errors.hpp"
#include "colorlimits/multigraph.hpp"
#include "colorlimits/params.hpp"
#include "colorlimits/pmf.hpp"
#include "colorlimits/rng.hpp"
#include "colorlimits/tree.hpp"

namespace colorlimits {

namespace detail {

// Uniform perfect matching on a stub list; an odd leftover stub (uniform after the
// shuffle) is discarded.
inline void pair_stubs(std::vector<NodeId>& stubs, Rng& rng, std::vector<Edge>& edges) {
  shuffle(stubs, rng);
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) edges.push_back({stubs[i], stubs[i + 1]});
}

// Uniform matching between two stub lists until one side runs out.
inline void match_sides(std::vector<NodeId>& left, std::vector<NodeId>& right, Rng& rng, std::vector<Edge>& edges) {
  shuffle(left, rng);
  shuffle(right, rng);
  const auto n = std::min(left.size(), right.size());
  for (std::size_t i = 0; i < n; ++i) edges.push_back({left[i], right[i]});
}

// Pairs (a, b) of `members_a` x `members_b` (or unordered pairs within one list when
// `same`), each present independently with probability p.
inline void bernoulli_pairs(const std::vector<NodeId>& members_a, const std::vector<NodeId>& members_b, bool same,
                            double p, Rng& rng, std::vector<Edge>& edges) {
  if (p <= 0.0) return;
  if (same) {
    const auto n = static_cast<std::int64_t>(members_a.size());
    std::int64_t v = 1, w = -1;
    while (v < n) {
      const auto skip = rng.geometric(p);
      if (skip >= static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n)) break;
      w += 1 + static_cast<std::int64_t>(skip);
      while (w >= v && v < n) {
        w -= v;
        ++v;
      }
      if (v < n) edges.push_back({members_a[v], members_a[w]});
    }
  } else {
    const auto nb = static_cast<std::uint64_t>(members_b.size());
    const auto total = static_cast<std::uint64_t>(members_a.size()) * nb;
    std::uint64_t idx = 0;
    bool first = true;
    for (;;) {
      const auto skip = rng.geometric(p);
      if (skip >= total) break;
      idx = first ? skip : idx + 1 + skip;
      first = false;
      if (idx >= total) break;
      edges.push_back({members_a[idx / nb], members_b[idx % nb]});
    }
  }
}

}  // namespace detail

// --- configuration models ---

struct CmSample {
  MultiGraph graph;
  std::vector<std::size_t> drawn_degrees;
};

/// CM_t(mu): i.i.d. degrees, stubs paired uniformly; at most one stub is dropped.
inline CmSample sample_cm_detailed(std::size_t t, const DegreePmf& mu, Rng& rng) {
  AliasTable table(mu.probs());
  std::vector<std::size_t> degrees(t);
  std::vector<NodeId> stubs;
  for (std::size_t v = 0; v < t; ++v) {
    degrees[v] = table.sample(rng);
    stubs.insert(stubs.end(), degrees[v], static_cast<NodeId>(v));
  }
  std::vector<Edge> edges;
  edges.reserve(stubs.size() / 2);
  detail::pair_stubs(stubs, rng, edges);
  return {MultiGraph::unattributed(t, std::move(edges)), std::move(degrees)};
}

inline MultiGraph sample_cm(std::size_t t, const DegreePmf& mu, Rng& rng) {
  return sample_cm_detailed(t, mu, rng).graph;
}

struct BcmSample {
  MultiGraph graph;
  std::vector<bool> is_left;
  std::vector<std::size_t> drawn_degrees;
};

/// BCM_t(muL, muR). Nodes join L with probability E[muR] / (E[muL] + E[muR]);
/// the surplus stubs of the larger side are dropped.
inline BcmSample sample_bcm_detailed(std::size_t t, const DegreePmf& mu_left, const DegreePmf& mu_right, Rng& rng) {
  const double ml = mu_left.mean();
  const double mr = mu_right.mean();
  if (ml + mr <= 0.0) return {MultiGraph::unattributed(t, {}), std::vector<bool>(t, true), std::vector<std::size_t>(t, 0)};
  const double p_left = mr / (ml + mr);
  AliasTable left_table(mu_left.probs());
  AliasTable right_table(mu_right.probs());
  std::vector<bool> is_left(t);
  std::vector<std::size_t> degrees(t);
  std::vector<NodeId> left, right;
  for (std::size_t v = 0; v < t; ++v) {
    is_left[v] = rng.bernoulli(p_left);
    degrees[v] = is_left[v] ? left_table.sample(rng) : right_table.sample(rng);
    (is_left[v] ? left : right).insert((is_left[v] ? left : right).end(), degrees[v], static_cast<NodeId>(v));
  }
  std::vector<Edge> edges;
  detail::match_sides(left, right, rng, edges);
  return {MultiGraph::unattributed(t, std::move(edges)), std::move(is_left), std::move(degrees)};
}

inline MultiGraph sample_bcm(std::size_t t, const DegreePmf& mu_left, const DegreePmf& mu_right, Rng& rng) {
  return sample_bcm_detailed(t, mu_left, mu_right, rng).graph;
}

// --- refined configuration model ---

/// Matching stage of the RCM for given (type, neighbor multiset) assignments: one
/// CM per type on its own stubs, one BCM per unordered pair of distinct types.
inline MultiGraph rcm_match(const std::vector<TypeId>& types, const std::vector<Multiset>& neighborhoods,
                            const std::vector<Feature>& type_features, Rng& rng) {
  if (types.size() != neighborhoods.size()) throw InvalidArgument("rcm_match: size mismatch");
  const auto t = types.size();
  const auto key = [](TypeId own, TypeId other) { return (static_cast<std::uint64_t>(own) << 32) | other; };
  std::unordered_map<std::uint64_t, std::vector<NodeId>> buckets;
  std::vector<Feature> features(t);
  std::size_t stub_count = 0;
  for (std::size_t v = 0; v < t; ++v) {
    features[v] = type_features.at(types[v]);
    for (const auto& [q, c] : neighborhoods[v].items()) {
      auto& bucket = buckets[key(types[v], q)];
      bucket.insert(bucket.end(), c, static_cast<NodeId>(v));
      stub_count += c;
    }
  }
  std::vector<std::uint64_t> keys;
  keys.reserve(buckets.size());
  for (const auto& [k, _] : buckets) keys.push_back(k);
  std::sort(keys.begin(), keys.end());

  std::vector<Edge> edges;
  edges.reserve(stub_count / 2);
  std::vector<NodeId> empty;
  for (auto k : keys) {
    const auto own = static_cast<TypeId>(k >> 32);
    const auto other = static_cast<TypeId>(k & 0xFFFFFFFFu);
    if (own == other) {
      detail::pair_stubs(buckets[k], rng, edges);
    } else if (own < other) {
      auto it = buckets.find(key(other, own));
      detail::match_sides(buckets[k], it == buckets.end() ? empty : it->second, rng, edges);
    }
    // own > other: matched from the (other, own) side, or dropped if that side is empty
  }
  return MultiGraph(std::move(features), std::move(edges));
}

struct RcmSample {
  MultiGraph graph;
  std::vector<TypeId> types;
  std::vector<Multiset> neighborhoods;
};

inline RcmSample sample_rcm_detailed(std::size_t t, const RcmParams& params, Rng& rng) {
  params.validate();
  std::vector<double> weights;
  weights.reserve(params.mu.size());
  for (const auto& e : params.mu) weights.push_back(e.p);
  AliasTable table(weights);
  std::vector<TypeId> types(t);
  std::vector<Multiset> neighborhoods(t);
  for (std::size_t v = 0; v < t; ++v) {
    const auto& e = params.mu[table.sample(rng)];
    types[v] = e.type;
    neighborhoods[v] = e.neighbors;
  }
  auto graph = rcm_match(types, neighborhoods, params.features, rng);
  return {std::move(graph), std::move(types), std::move(neighborhoods)};
}

inline MultiGraph sample_rcm(std::size_t t, const RcmParams& params, Rng& rng) {
  return sample_rcm_detailed(t, params, rng).graph;
}

// --- Galton-Watson trees ---

struct GwtNode {
  std::uint32_t parent;  // self for the root
  TypeId type;
  std::uint32_t depth;
};

/// Sampled tree in BFS order; node 0 is the root.
struct GwtSample {
  std::vector<GwtNode> nodes;
};

class GwtSampler {
 public:
  static constexpr std::size_t kDefaultBudget = 10'000'000;

  explicit GwtSampler(GwtParams params, std::size_t budget = kDefaultBudget)
      : params_(std::move(params)), budget_(budget) {
    params_.validate();
    root_ = AliasTable(params_.root);
    offspring_.resize(params_.type_count());
    for (TypeId t = 0; t < params_.type_count(); ++t) {
      if (params_.offspring[t].empty()) continue;
      std::vector<double> w;
      for (const auto& e : params_.offspring[t]) w.push_back(e.p);
      offspring_[t] = AliasTable(w);
    }
    if (params_.consume_parent_edge) {
      const auto& layout = *params_.layout;
      parent_edge_type_.assign(params_.type_count(), std::nullopt);
      for (TypeId t = 0; t < params_.type_count(); ++t) {
        const auto [p, q] = layout.pair_of_type[t];
        if (p >= 0) parent_edge_type_[t] = layout.type_of(static_cast<std::int64_t>(q), static_cast<TypeId>(p));
      }
    }
  }

  const GwtParams& params() const noexcept { return params_; }

  GwtSample sample(std::size_t depth, Rng& rng) const {
    GwtSample out;
    out.nodes.push_back({0, static_cast<TypeId>(root_.sample(rng)), 0});
    for (std::size_t i = 0; i < out.nodes.size(); ++i) {
      const auto node = out.nodes[i];
      if (node.depth >= depth) continue;
      if (params_.offspring[node.type].empty()) {
        throw InvalidArgument("GWT: type " + params_.type_names[node.type] + " has no offspring distribution");
      }
      const auto& entry = params_.offspring[node.type][offspring_[node.type].sample(rng)];
      const Multiset* children = &entry.children;
      Multiset reduced;
      if (params_.consume_parent_edge && i != 0) {
        const auto echo = parent_edge_type_[node.type];
        if (!echo || entry.children.count(*echo) == 0) {
          throw InvalidArgument("GWT: offspring of " + params_.type_names[node.type] + " lacks the parent edge");
        }
        reduced = entry.children.without_one(*echo);
        children = &reduced;
      }
      for (const auto& [c, m] : children->items()) {
        for (std::uint32_t r = 0; r < m; ++r) {
          out.nodes.push_back({static_cast<std::uint32_t>(i), c, node.depth + 1});
        }
      }
      if (out.nodes.size() > budget_) {
        throw BudgetExceeded("GWT sample exceeded " + std::to_string(budget_) + " nodes");
      }
    }
    return out;
  }

  MultiGraph to_graph(const GwtSample& s) const {
    std::vector<Feature> features;
    std::vector<Edge> edges;
    features.reserve(s.nodes.size());
    for (std::uint32_t i = 0; i < s.nodes.size(); ++i) {
      features.push_back(params_.features[s.nodes[i].type]);
      if (i != 0) edges.push_back({s.nodes[i].parent, i});
    }
    return MultiGraph(std::move(features), std::move(edges));
  }

  CanonicalTree to_tree(const GwtSample& s) const {
    std::vector<std::vector<CanonicalTree>> pending(s.nodes.size());
    std::vector<CanonicalTree> built(s.nodes.size());
    for (auto i = s.nodes.size(); i-- > 0;) {
      built[i] = CanonicalTree::from_children(params_.features[s.nodes[i].type], std::move(pending[i]));
      if (i != 0) pending[s.nodes[i].parent].push_back(std::move(built[i]));
    }
    return std::move(built[0]);
  }

 private:
  GwtParams params_;
  std::size_t budget_;
  AliasTable root_;
  std::vector<AliasTable> offspring_;
  std::vector<std::optional<TypeId>> parent_edge_type_;
};

/// W_depth as a canonical attributed tree.
inline CanonicalTree sample_gwt(const GwtParams& params, std::size_t depth, Rng& rng) {
  GwtSampler sampler(params);
  return sampler.to_tree(sampler.sample(depth, rng));
}

// --- baselines and pathological processes ---

/// G(t, p) with p = min(c / t, 1); simple graph.
inline MultiGraph sample_er(std::size_t t, double mean_degree, Rng& rng) {
  if (mean_degree < 0.0) throw InvalidArgument("ER: negative mean degree");
  const double p = t == 0 ? 0.0 : std::min(mean_degree / static_cast<double>(t), 1.0);
  std::vector<NodeId> all(t);
  for (std::size_t v = 0; v < t; ++v) all[v] = static_cast<NodeId>(v);
  std::vector<Edge> edges;
  detail::bernoulli_pairs(all, all, true, p, rng, edges);
  return MultiGraph::unattributed(t, std::move(edges));
}

/// G(t, p) with a fixed edge probability (dense regime).
inline MultiGraph sample_er_dense(std::size_t t, double p, Rng& rng) {
  if (p < 0.0 || p > 1.0) throw InvalidArgument("ER: edge probability outside [0, 1]");
  std::vector<NodeId> all(t);
  for (std::size_t v = 0; v < t; ++v) all[v] = static_cast<NodeId>(v);
  std::vector<Edge> edges;
  detail::bernoulli_pairs(all, all, true, p, rng, edges);
  return MultiGraph::unattributed(t, std::move(edges));
}

/// Sparse SBM: i.i.d. blocks, pair (a, b) present with probability min(rates[a][b] / t, 1).
inline MultiGraph sample_sbm(std::size_t t, const std::vector<double>& block_pmf,
                             const std::vector<std::vector<double>>& rates, Rng& rng) {
  const auto blocks = block_pmf.size();
  if (rates.size() != blocks) throw InvalidArgument("SBM: rate matrix size mismatch");
  for (std::size_t a = 0; a < blocks; ++a) {
    if (rates[a].size() != blocks) throw InvalidArgument("SBM: rate matrix must be square");
    for (std::size_t b = 0; b < blocks; ++b) {
      if (rates[a][b] < 0.0) throw InvalidArgument("SBM: negative rate");
      if (rates[a][b] != rates[b][a]) throw InvalidArgument("SBM: rate matrix must be symmetric");
    }
  }
  AliasTable table(block_pmf);
  std::vector<std::vector<NodeId>> members(blocks);
  for (std::size_t v = 0; v < t; ++v) members[table.sample(rng)].push_back(static_cast<NodeId>(v));
  std::vector<Edge> edges;
  const double scale = t == 0 ? 0.0 : 1.0 / static_cast<double>(t);
  for (std::size_t a = 0; a < blocks; ++a) {
    for (std::size_t b = a; b < blocks; ++b) {
      detail::bernoulli_pairs(members[a], members[b], a == b, std::min(rates[a][b] * scale, 1.0), rng, edges);
    }
  }
  return MultiGraph::unattributed(t, std::move(edges));
}

enum class PathologicalKind { isolated_or_cycle, three_cycles_or_big_cycle };

inline MultiGraph cycle_graph(std::size_t t) {
  std::vector<Edge> edges;
  for (std::size_t v = 0; v < t; ++v) edges.push_back({static_cast<NodeId>(v), static_cast<NodeId>((v + 1) % t)});
  return MultiGraph::unattributed(t, std::move(edges));
}

/// isolated-or-cycle: a fair coin picks t isolated nodes or one t-cycle.
/// three-cycles-or-big-cycle: t/3 triangles when 3 | t, one t-cycle otherwise.
inline MultiGraph sample_pathological(PathologicalKind kind, std::size_t t, Rng& rng) {
  if (t < 3) throw InvalidArgument("pathological processes need t >= 3");
  if (kind == PathologicalKind::isolated_or_cycle) {
    return rng.coin() ? cycle_graph(t) : MultiGraph::unattributed(t, {});
  }
  if (t % 3 != 0) return cycle_graph(t);
  std::vector<Edge> edges;
  for (std::size_t b = 0; b < t; b += 3) {
    const auto v = static_cast<NodeId>(b);
    edges.push_back({v, v + 1});
    edges.push_back({v + 1, v + 2});
    edges.push_back({v + 2, v});
  }
  return MultiGraph::unattributed(t, std::move(edges));
}

}  // namespace colorlimits
