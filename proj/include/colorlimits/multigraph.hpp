#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "colorlimits/errors.hpp"
#include "colorlimits/feature.hpp"

namespace colorlimits {

using NodeId = std::uint32_t;

struct Edge {
  NodeId u;
  NodeId v;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Finite undirected multigraph with loops, multi-edges and one feature per node.
/// Immutable after construction. Adjacency is stored in CSR form; a loop at v
/// lists v twice in N(v), a k-fold edge lists the endpoint k times.
class MultiGraph {
 public:
  MultiGraph() : offsets_(1, 0) {}

  MultiGraph(std::vector<Feature> features, std::vector<Edge> edges)
      : features_(std::move(features)), edges_(std::move(edges)) {
    const auto n = features_.size();
    offsets_.assign(n + 1, 0);
    for (const auto& e : edges_) {
      if (e.u >= n || e.v >= n) {
        throw InvalidArgument("edge endpoint out of range: " + std::to_string(e.u) + " " + std::to_string(e.v));
      }
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    adjacency_.resize(offsets_[n]);
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges_) {
      adjacency_[cursor[e.u]++] = e.v;
      adjacency_[cursor[e.v]++] = e.u;
    }
  }

  static MultiGraph unattributed(std::size_t n, std::vector<Edge> edges) {
    return MultiGraph(std::vector<Feature>(n, default_feature()), std::move(edges));
  }

  std::size_t node_count() const noexcept { return features_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  Feature feature(NodeId v) const { return features_.at(v); }
  const std::vector<Feature>& features() const noexcept { return features_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::span<const NodeId> neighbors(NodeId v) const {
    check(v);
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }

  std::size_t degree(NodeId v) const {
    check(v);
    return offsets_[v + 1] - offsets_[v];
  }

  void check(NodeId v) const {
    if (v >= node_count()) throw InvalidArgument("invalid node id " + std::to_string(v));
  }

 private:
  std::vector<Feature> features_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
};

}  // namespace colorlimits
