#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "colorlimits/multigraph.hpp"
#include "colorlimits/tree.hpp"

namespace colorlimits {

/// Marker for a ball that is not a simple tree (contains a cycle, loop or multi-edge).
struct Cyclic {
  friend bool operator==(Cyclic, Cyclic) noexcept { return true; }
};

using BallResult = std::variant<CanonicalTree, Cyclic>;

inline bool is_cyclic(const BallResult& r) noexcept { return std::holds_alternative<Cyclic>(r); }

/// Reusable workspace for extracting many balls from one graph.
class BallExtractor {
 public:
  explicit BallExtractor(const MultiGraph& g) : g_(g), dist_(g.node_count(), kUnseen) {}

  BallResult operator()(NodeId root, std::size_t k) {
    g_.check(root);
    order_.clear();
    order_.push_back(root);
    dist_[root] = 0;
    for (std::size_t head = 0; head < order_.size(); ++head) {
      const auto u = order_[head];
      if (dist_[u] == k) continue;
      for (auto w : g_.neighbors(u)) {
        if (dist_[w] == kUnseen) {
          dist_[w] = dist_[u] + 1;
          order_.push_back(w);
        }
      }
    }
    // The ball is connected, so it is a tree iff its induced edge count is nodes - 1.
    // Loops and multi-edges push the count to >= nodes.
    std::size_t incidences = 0;
    for (auto u : order_) {
      for (auto w : g_.neighbors(u)) incidences += dist_[w] != kUnseen ? 1 : 0;
    }
    const bool tree = incidences / 2 + 1 == order_.size();
    BallResult result = tree ? BallResult(build(root)) : BallResult(Cyclic{});
    for (auto u : order_) dist_[u] = kUnseen;
    return result;
  }

 private:
  static constexpr std::uint32_t kUnseen = UINT32_MAX;

  CanonicalTree build(NodeId u) const {
    std::vector<CanonicalTree> children;
    for (auto w : g_.neighbors(u)) {
      if (dist_[w] != kUnseen && dist_[w] == dist_[u] + 1) children.push_back(build(w));
    }
    return CanonicalTree::from_children(g_.feature(u), std::move(children));
  }

  const MultiGraph& g_;
  std::vector<std::uint32_t> dist_;
  std::vector<NodeId> order_;
};

/// B_k(v) as a canonical rooted tree, or Cyclic.
inline BallResult ball(const MultiGraph& g, NodeId v, std::size_t k) { return BallExtractor(g)(v, k); }

}  // namespace colorlimits
