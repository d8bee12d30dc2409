#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

namespace colorlimits {

namespace detail {

class FeatureTable {
 public:
  static FeatureTable& instance() {
    static FeatureTable table;
    return table;
  }

  std::uint32_t intern(std::string_view name) {
    {
      std::shared_lock lock(mutex_);
      if (auto it = index_.find(std::string(name)); it != index_.end()) return it->second;
    }
    std::unique_lock lock(mutex_);
    auto [it, inserted] = index_.try_emplace(std::string(name), static_cast<std::uint32_t>(names_.size()));
    if (inserted) names_.emplace_back(name);
    return it->second;
  }

  // deque references stay valid across inserts
  const std::string& name(std::uint32_t id) const {
    std::shared_lock lock(mutex_);
    return names_[id];
  }

 private:
  FeatureTable() = default;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::deque<std::string> names_;
};

}  // namespace detail

/// Discrete node label. Interned process-wide; equality is token equality and
/// ordering is lexicographic on the token, so it does not depend on interning order.
class Feature {
 public:
  Feature() : Feature(std::string_view("_")) {}
  explicit Feature(std::string_view token) : id_(detail::FeatureTable::instance().intern(token)) {}

  const std::string& name() const { return detail::FeatureTable::instance().name(id_); }
  std::uint32_t id() const noexcept { return id_; }

  friend bool operator==(Feature a, Feature b) noexcept { return a.id_ == b.id_; }
  friend std::strong_ordering operator<=>(Feature a, Feature b) {
    if (a.id_ == b.id_) return std::strong_ordering::equal;
    return a.name().compare(b.name()) <=> 0;
  }

 private:
  std::uint32_t id_;
};

inline Feature default_feature() { return Feature("_"); }

}  // namespace colorlimits

template <>
struct std::hash<colorlimits::Feature> {
  std::size_t operator()(colorlimits::Feature f) const noexcept { return std::hash<std::uint32_t>{}(f.id()); }
};
