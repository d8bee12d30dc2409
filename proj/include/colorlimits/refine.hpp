#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <unordered_map>
#include <utility>
#include <vector>

#include "colorlimits/errors.hpp"
#include "colorlimits/multigraph.hpp"
#include "colorlimits/registry.hpp"

namespace colorlimits {

/// Per-round refinement colors of one graph. rounds()[j][v] is the ColorId of CR^j(v).
class Coloring {
 public:
  Coloring(std::shared_ptr<ColorRegistry> registry, std::vector<std::vector<ColorId>> rounds)
      : registry_(std::move(registry)), rounds_(std::move(rounds)) {}

  std::size_t max_round() const noexcept { return rounds_.empty() ? 0 : rounds_.size() - 1; }
  const std::vector<std::vector<ColorId>>& rounds() const noexcept { return rounds_; }
  const std::vector<ColorId>& round(std::size_t k) const { return rounds_.at(k); }
  ColorId color(std::size_t k, NodeId v) const { return rounds_.at(k).at(v); }

  ColorRegistry& registry() const noexcept { return *registry_; }
  const std::shared_ptr<ColorRegistry>& registry_ptr() const noexcept { return registry_; }

  /// Class index per node at round k, numbered by first appearance.
  std::vector<std::uint32_t> partition(std::size_t k) const { return normalize_partition(round(k)); }

  static std::vector<std::uint32_t> normalize_partition(const std::vector<ColorId>& colors) {
    std::unordered_map<ColorId, std::uint32_t> first;
    std::vector<std::uint32_t> out;
    out.reserve(colors.size());
    for (auto c : colors) out.push_back(first.try_emplace(c, static_cast<std::uint32_t>(first.size())).first->second);
    return out;
  }

 private:
  std::shared_ptr<ColorRegistry> registry_;
  std::vector<std::vector<ColorId>> rounds_;
};

namespace detail {

inline std::vector<ColorId> refine_step(const MultiGraph& g, const std::vector<ColorId>& prev, ColorRegistry& registry) {
  std::vector<ColorId> next(g.node_count());
  std::vector<ColorId> buf;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    buf.clear();
    for (auto w : g.neighbors(v)) buf.push_back(prev[w]);
    next[v] = registry.intern(g.feature(v), buf);
  }
  return next;
}

inline std::size_t class_count(const std::vector<ColorId>& colors) {
  std::vector<ColorId> sorted(colors);
  std::sort(sorted.begin(), sorted.end());
  return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

}  // namespace detail

/// k rounds of color refinement: round 0 is the feature leaf, round j+1 is the
/// feature with the multiset of neighbors' round-j colors (a loop contributes twice).
inline Coloring refine(const MultiGraph& g, std::size_t k, std::shared_ptr<ColorRegistry> registry) {
  std::vector<std::vector<ColorId>> rounds;
  rounds.reserve(k + 1);
  std::vector<ColorId> base(g.node_count());
  for (NodeId v = 0; v < g.node_count(); ++v) base[v] = registry->intern(g.feature(v), {});
  rounds.push_back(std::move(base));
  for (std::size_t j = 0; j < k; ++j) rounds.push_back(detail::refine_step(g, rounds.back(), *registry));
  return Coloring(std::move(registry), std::move(rounds));
}

inline Coloring refine(const MultiGraph& g, std::size_t k) { return refine(g, k, std::make_shared<ColorRegistry>()); }

struct StableColoring {
  Coloring coloring;  // rounds 0..k0+1
  std::size_t k0;
};

/// Least k0 whose partition equals the partition of round k0 + 1. Because each
/// round refines the previous one, equal class counts imply equal partitions.
inline StableColoring stable_coloring(const MultiGraph& g, std::shared_ptr<ColorRegistry> registry) {
  auto coloring = refine(g, 0, registry);
  std::vector<std::vector<ColorId>> rounds = coloring.rounds();
  std::size_t prev_classes = detail::class_count(rounds.back());
  for (std::size_t j = 0;; ++j) {
    rounds.push_back(detail::refine_step(g, rounds.back(), *registry));
    const auto classes = detail::class_count(rounds.back());
    if (classes == prev_classes) return {Coloring(std::move(registry), std::move(rounds)), j};
    prev_classes = classes;
  }
}

inline StableColoring stable_coloring(const MultiGraph& g) {
  return stable_coloring(g, std::make_shared<ColorRegistry>());
}

}  // namespace colorlimits
