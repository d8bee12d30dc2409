#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "colorlimits/errors.hpp"
#include "colorlimits/feature.hpp"
#include "colorlimits/pmf.hpp"

namespace colorlimits {

using TypeId = std::uint32_t;

/// Finite multiset of types as sorted (type, count) pairs with positive counts.
class Multiset {
 public:
  Multiset() = default;

  static Multiset of(std::vector<TypeId> items) {
    std::sort(items.begin(), items.end());
    Multiset m;
    for (auto t : items) {
      if (!m.items_.empty() && m.items_.back().first == t) {
        ++m.items_.back().second;
      } else {
        m.items_.emplace_back(t, 1);
      }
    }
    return m;
  }

  static Multiset from_counts(std::map<TypeId, std::uint32_t> counts) {
    Multiset m;
    for (auto [t, c] : counts) {
      if (c > 0) m.items_.emplace_back(t, c);
    }
    return m;
  }

  std::uint32_t count(TypeId t) const {
    auto it = std::lower_bound(items_.begin(), items_.end(), std::pair<TypeId, std::uint32_t>{t, 0});
    return it != items_.end() && it->first == t ? it->second : 0;
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [t, c] : items_) n += c;
    return n;
  }

  bool empty() const noexcept { return items_.empty(); }

  /// One occurrence of t removed; t must be present.
  Multiset without_one(TypeId t) const {
    Multiset m = *this;
    for (auto it = m.items_.begin(); it != m.items_.end(); ++it) {
      if (it->first == t) {
        if (--it->second == 0) m.items_.erase(it);
        return m;
      }
    }
    throw InvalidArgument("multiset does not contain type " + std::to_string(t));
  }

  std::vector<TypeId> expanded() const {
    std::vector<TypeId> out;
    for (const auto& [t, c] : items_) out.insert(out.end(), c, t);
    return out;
  }

  const std::vector<std::pair<TypeId, std::uint32_t>>& items() const noexcept { return items_; }

  friend bool operator==(const Multiset&, const Multiset&) = default;
  friend auto operator<=>(const Multiset&, const Multiset&) = default;

 private:
  std::vector<std::pair<TypeId, std::uint32_t>> items_;
};

/// PMF over degrees {0, 1, ..., n-1}; countable laws are truncated before use.
class DegreePmf {
 public:
  DegreePmf() : probs_{1.0} {}

  explicit DegreePmf(std::vector<double> probs, double truncated_mass = 0.0)
      : probs_(std::move(probs)), truncated_mass_(truncated_mass) {
    if (probs_.empty()) throw InvalidArgument("degree PMF has empty support");
    double total = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0)) throw InvalidArgument("negative degree probability");
      total += p;
    }
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
      throw InvalidArgument("degree PMF does not normalize: total " + std::to_string(total));
    }
  }

  static DegreePmf point(std::size_t d) {
    std::vector<double> p(d + 1, 0.0);
    p[d] = 1.0;
    return DegreePmf(std::move(p));
  }

  /// Poisson(lambda) restricted to the smallest prefix {0..n} carrying >= 1 - tail
  /// mass, renormalized; the dropped mass is kept in truncated_mass().
  static DegreePmf poisson(double lambda, double tail = 1e-8, std::size_t max_support = 1u << 20) {
    if (!(lambda >= 0.0)) throw InvalidArgument("Poisson rate must be non-negative");
    std::vector<double> p;
    double term = std::exp(-lambda);
    double cumulative = 0.0;
    for (std::size_t d = 0; d < max_support; ++d) {
      if (d > 0) term *= lambda / static_cast<double>(d);
      p.push_back(term);
      cumulative += term;
      if (cumulative >= 1.0 - tail && static_cast<double>(d) >= lambda) break;
    }
    const double dropped = std::max(0.0, 1.0 - cumulative);
    for (double& x : p) x /= cumulative;
    return DegreePmf(std::move(p), dropped);
  }

  double operator()(std::size_t d) const { return d < probs_.size() ? probs_[d] : 0.0; }
  const std::vector<double>& probs() const noexcept { return probs_; }
  std::size_t max_degree() const noexcept { return probs_.size() - 1; }
  double truncated_mass() const noexcept { return truncated_mass_; }

  double mean() const {
    double m = 0.0;
    for (std::size_t d = 0; d < probs_.size(); ++d) m += static_cast<double>(d) * probs_[d];
    return m;
  }

 private:
  std::vector<double> probs_;
  double truncated_mass_ = 0.0;
};

struct RcmEntry {
  TypeId type;
  Multiset neighbors;
  double p;
};

/// Refined configuration model parameter: types with features, and a PMF over
/// (own type, multiset of neighbor types).
struct RcmParams {
  std::vector<std::string> type_names;
  std::vector<Feature> features;
  std::vector<RcmEntry> mu;

  std::size_t type_count() const noexcept { return type_names.size(); }

  std::optional<TypeId> find_type(const std::string& name) const {
    for (TypeId t = 0; t < type_names.size(); ++t) {
      if (type_names[t] == name) return t;
    }
    return std::nullopt;
  }

  void validate() const {
    if (features.size() != type_names.size()) throw InvalidArgument("RCM: one feature per type required");
    if (mu.empty()) throw InvalidArgument("RCM: empty PMF");
    double total = 0.0;
    for (const auto& e : mu) {
      if (e.type >= type_count()) throw InvalidArgument("RCM: unknown type id");
      for (const auto& [t, c] : e.neighbors.items()) {
        if (t >= type_count()) throw InvalidArgument("RCM: multiset mentions unknown type");
      }
      if (!(e.p >= 0.0)) throw InvalidArgument("RCM: negative probability");
      total += e.p;
    }
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
      throw InvalidArgument("RCM: PMF does not normalize: total " + std::to_string(total));
    }
  }
};

/// Type set of a simplified unimodular tree: every type is (parent base type or
/// none for the root, own base type).
struct PairLayout {
  static constexpr std::int64_t kNoParent = -1;

  std::vector<std::string> base_names;
  std::vector<Feature> base_features;
  std::vector<std::pair<std::int64_t, TypeId>> pair_of_type;  // (parent base or -1, own base)

  void reindex() {
    index.clear();
    for (TypeId t = 0; t < pair_of_type.size(); ++t) {
      if (!index.emplace(pair_of_type[t], t).second) throw InvalidArgument("pair layout: duplicate pair type");
    }
  }

  std::optional<TypeId> type_of(std::int64_t parent, TypeId own) const {
    if (auto it = index.find({parent, own}); it != index.end()) return it->second;
    return std::nullopt;
  }

  std::map<std::pair<std::int64_t, TypeId>, TypeId> index;

  /// Dense layout: type id = (parent + 1) * n + own.
  static PairLayout dense(std::vector<std::string> names, std::vector<Feature> features) {
    PairLayout layout;
    const auto n = static_cast<std::int64_t>(names.size());
    for (std::int64_t p = -1; p < n; ++p) {
      for (TypeId q = 0; q < static_cast<TypeId>(n); ++q) layout.pair_of_type.emplace_back(p, q);
    }
    layout.base_names = std::move(names);
    layout.base_features = std::move(features);
    layout.reindex();
    return layout;
  }

  bool is_dense() const {
    const auto n = static_cast<std::int64_t>(base_names.size());
    if (static_cast<std::int64_t>(pair_of_type.size()) != (n + 1) * n) return false;
    for (TypeId t = 0; t < pair_of_type.size(); ++t) {
      const auto [p, q] = pair_of_type[t];
      if ((p + 1) * n + q != static_cast<std::int64_t>(t)) return false;
    }
    return true;
  }
};

struct OffspringEntry {
  Multiset children;
  double p;
};

/// Multi-type Galton-Watson tree parameters.
///
/// With `consume_parent_edge`, a non-root node of pair type (s0, s1) reads its
/// sampled multiset as its full neighborhood: one (s1, s0) element stands for the
/// edge to the parent and is not attached as a child. This needs a layout.
struct GwtParams {
  std::vector<std::string> type_names;
  std::vector<Feature> features;
  std::vector<double> root;                           // mu_0 over types
  std::vector<std::vector<OffspringEntry>> offspring;  // per type; empty = never expanded
  bool consume_parent_edge = false;
  std::optional<PairLayout> layout;

  std::size_t type_count() const noexcept { return type_names.size(); }

  void validate() const {
    const auto n = type_count();
    if (features.size() != n || root.size() != n || offspring.size() != n) {
      throw InvalidArgument("GWT: per-type vectors must all have one entry per type");
    }
    double total = 0.0;
    for (double p : root) {
      if (!(p >= 0.0)) throw InvalidArgument("GWT: negative root probability");
      total += p;
    }
    if (std::abs(total - 1.0) > kNormalizationTolerance) throw InvalidArgument("GWT: root PMF does not normalize");
    for (TypeId t = 0; t < n; ++t) {
      if (offspring[t].empty()) continue;
      double s = 0.0;
      for (const auto& e : offspring[t]) {
        if (!(e.p >= 0.0)) throw InvalidArgument("GWT: negative offspring probability");
        for (const auto& [c, m] : e.children.items()) {
          if (c >= n) throw InvalidArgument("GWT: offspring mentions unknown type");
        }
        s += e.p;
      }
      if (std::abs(s - 1.0) > kNormalizationTolerance) {
        throw InvalidArgument("GWT: offspring PMF of type " + type_names[t] + " does not normalize");
      }
    }
    if (consume_parent_edge && !layout) throw InvalidArgument("GWT: parent-edge consumption needs a pair layout");
    if (layout && layout->pair_of_type.size() != n) throw InvalidArgument("GWT: layout size mismatch");
  }
};

}  // namespace colorlimits
