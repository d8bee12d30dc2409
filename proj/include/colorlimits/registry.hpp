#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "colorlimits/errors.hpp"
#include "colorlimits/feature.hpp"
#include "colorlimits/tree.hpp"

namespace colorlimits {

using ColorId = std::uint32_t;

/// Interning table for refinement colors. A color is keyed exactly by
/// (root feature, sorted multiset of child ColorIds), so ColorId <-> CanonicalTree
/// is a bijection within one registry and there is nothing to collide.
///
/// Reads take a shared lock, inserts an exclusive one. ColorIds depend on
/// insertion order and are only meaningful together with their registry.
class ColorRegistry {
 private:
  struct Key {
    Feature feature;
    std::vector<ColorId> children;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ k.feature.id();
      for (auto c : k.children) h = (h ^ c) * 0x100000001B3ULL + (h >> 29);
      return static_cast<std::size_t>(h);
    }
  };
  struct Entry {
    Feature feature;
    std::vector<ColorId> children;
    std::uint32_t depth = 0;
    std::uint64_t size = 1;
  };

  static std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) noexcept {
    return a > UINT64_MAX - b ? UINT64_MAX : a + b;
  }

  template <typename Fn>
  auto with_entry(ColorId id, Fn&& fn) const {
    std::shared_lock lock(mutex_);
    if (id >= entries_.size()) throw InvalidArgument("unknown color id " + std::to_string(id));
    return fn(entries_[id]);
  }

  Entry entry(ColorId id) const {
    return with_entry(id, [](const Entry& e) { return e; });
  }


 public:
  static constexpr std::uint64_t kDefaultExpandBudget = 1'000'000;

  explicit ColorRegistry(std::uint64_t expand_budget = kDefaultExpandBudget) : expand_budget_(expand_budget) {}

  ColorRegistry(const ColorRegistry&) = delete;
  ColorRegistry& operator=(const ColorRegistry&) = delete;

  /// `children` may be in any order.
  ColorId intern(Feature root, std::vector<ColorId> children) {
    std::sort(children.begin(), children.end());
    Key key{root, std::move(children)};
    {
      std::shared_lock lock(mutex_);
      if (auto it = index_.find(key); it != index_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    const auto id = static_cast<ColorId>(entries_.size());
    Entry entry;
    entry.feature = key.feature;
    entry.children = key.children;
    entry.depth = 0;
    entry.size = 1;
    for (auto c : key.children) {
      entry.depth = std::max(entry.depth, entries_[c].depth + 1);
      entry.size = saturating_add(entry.size, entries_[c].size);
    }
    entries_.push_back(std::move(entry));
    index_.emplace(std::move(key), id);
    return id;
  }

  ColorId intern(const CanonicalTree& tree) {
    std::vector<ColorId> children;
    children.reserve(tree.degree());
    for (const auto& c : tree.children()) children.push_back(intern(c));
    return intern(tree.root_feature(), std::move(children));
  }

  /// Id of an already-interned tree, if present.
  std::optional<ColorId> find(const CanonicalTree& tree) const {
    std::vector<ColorId> children;
    for (const auto& c : tree.children()) {
      auto id = find(c);
      if (!id) return std::nullopt;
      children.push_back(*id);
    }
    std::sort(children.begin(), children.end());
    std::shared_lock lock(mutex_);
    if (auto it = index_.find(Key{tree.root_feature(), std::move(children)}); it != index_.end()) return it->second;
    return std::nullopt;
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
  }

  Feature feature(ColorId id) const { return with_entry(id, [](const Entry& e) { return e.feature; }); }
  std::vector<ColorId> children(ColorId id) const { return with_entry(id, [](const Entry& e) { return e.children; }); }
  std::size_t degree(ColorId id) const { return with_entry(id, [](const Entry& e) { return e.children.size(); }); }
  std::uint32_t depth(ColorId id) const { return with_entry(id, [](const Entry& e) { return e.depth; }); }
  /// Node count of the expanded tree, saturating at UINT64_MAX.
  std::uint64_t tree_size(ColorId id) const { return with_entry(id, [](const Entry& e) { return e.size; }); }

  /// Color of T|_d.
  ColorId truncate(ColorId id, std::uint32_t d) {
    const auto e = entry(id);
    if (e.depth <= d) return id;
    {
      std::shared_lock lock(mutex_);
      if (auto it = truncations_.find({id, d}); it != truncations_.end()) return it->second;
    }
    std::vector<ColorId> children;
    if (d > 0) {
      children.reserve(e.children.size());
      for (auto c : e.children) children.push_back(truncate(c, d - 1));
    }
    const auto out = intern(e.feature, std::move(children));
    std::unique_lock lock(mutex_);
    truncations_.emplace(std::pair{id, d}, out);
    return out;
  }

  /// Materialized tree; refuses trees above the node budget.
  std::shared_ptr<const CanonicalTree> expand(ColorId id) {
    const auto e = entry(id);
    if (e.size > expand_budget_) {
      throw BudgetExceeded("color " + std::to_string(id) + " expands to " + std::to_string(e.size) +
                           " nodes, budget is " + std::to_string(expand_budget_));
    }
    {
      std::shared_lock lock(mutex_);
      if (auto it = expanded_.find(id); it != expanded_.end()) return it->second;
    }
    std::vector<CanonicalTree> children;
    children.reserve(e.children.size());
    for (auto c : e.children) children.push_back(*expand(c));
    auto tree = std::make_shared<const CanonicalTree>(CanonicalTree::from_children(e.feature, std::move(children)));
    std::unique_lock lock(mutex_);
    return expanded_.emplace(id, std::move(tree)).first->second;
  }

  std::string term(ColorId id) { return to_term(*expand(id)); }

  std::uint64_t expand_budget() const noexcept { return expand_budget_; }

 private:
  std::uint64_t expand_budget_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<Key, ColorId, KeyHash> index_;
  std::deque<Entry> entries_;
  std::map<std::pair<ColorId, std::uint32_t>, ColorId> truncations_;
  std::unordered_map<ColorId, std::shared_ptr<const CanonicalTree>> expanded_;
};

}  // namespace colorlimits
