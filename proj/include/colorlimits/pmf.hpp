#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "colorlimits/errors.hpp"
#include "colorlimits/rng.hpp"

namespace colorlimits {

inline constexpr double kNormalizationTolerance = 1e-9;

/// Probability mass function with finite support, ordered by outcome.
template <typename X>
class Pmf {
 public:
  Pmf() = default;
  explicit Pmf(std::map<X, double> entries) : entries_(std::move(entries)) {}

  static Pmf point(const X& x) { return Pmf(std::map<X, double>{{x, 1.0}}); }

  double operator()(const X& x) const {
    auto it = entries_.find(x);
    return it == entries_.end() ? 0.0 : it->second;
  }

  void add(const X& x, double p) { entries_[x] += p; }

  double mass() const {
    double total = 0.0;
    for (const auto& [x, p] : entries_) total += p;
    return total;
  }

  /// Throws unless every probability is >= 0 and the total is 1 within `tol`.
  void validate(double tol = kNormalizationTolerance) const {
    for (const auto& [x, p] : entries_) {
      if (!(p >= 0.0)) throw InvalidArgument("negative or NaN probability in PMF");
    }
    if (std::abs(mass() - 1.0) > tol) {
      throw InvalidArgument("PMF does not normalize: total mass " + std::to_string(mass()));
    }
  }

  const std::map<X, double>& entries() const noexcept { return entries_; }
  std::size_t support_size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  std::map<X, double> entries_;
};

/// Frequencies over a finite population, kept as exact counts.
template <typename X>
struct EmpiricalPmf {
  std::map<X, std::uint64_t> counts;
  std::uint64_t total = 0;

  void add(const X& x, std::uint64_t n = 1) {
    counts[x] += n;
    total += n;
  }

  double operator()(const X& x) const {
    auto it = counts.find(x);
    return it == counts.end() || total == 0 ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
  }

  Pmf<X> to_pmf() const {
    std::map<X, double> out;
    for (const auto& [x, n] : counts) out.emplace(x, static_cast<double>(n) / static_cast<double>(total));
    return Pmf<X>(std::move(out));
  }
};

/// Half the L1 distance over the union of supports.
template <typename X>
double tv_distance(const Pmf<X>& p, const Pmf<X>& q) {
  double sum = 0.0;
  auto a = p.begin();
  auto b = q.begin();
  while (a != p.end() || b != q.end()) {
    if (b == q.end() || (a != p.end() && a->first < b->first)) {
      sum += std::abs(a->second);
      ++a;
    } else if (a == p.end() || b->first < a->first) {
      sum += std::abs(b->second);
      ++b;
    } else {
      sum += std::abs(a->second - b->second);
      ++a;
      ++b;
    }
  }
  return 0.5 * sum;
}

/// Walker/Vose alias table: O(n) build, O(1) draws.
class AliasTable {
 public:
  AliasTable() = default;

  explicit AliasTable(const std::vector<double>& weights) {
    const auto n = weights.size();
    if (n == 0) throw InvalidArgument("alias table needs at least one outcome");
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) throw InvalidArgument("alias table weights sum to zero");
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
      if (weights[i] < 0.0) throw InvalidArgument("negative weight");
      scaled[i] = weights[i] * static_cast<double>(n) / total;
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
      const auto s = small.back();
      small.pop_back();
      const auto l = large.back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] = (scaled[l] + scaled[s]) - 1.0;
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (auto i : large) prob_[i] = 1.0;
    for (auto i : small) prob_[i] = 1.0;  // rounding leftovers
  }

  std::size_t size() const noexcept { return prob_.size(); }

  std::size_t sample(Rng& rng) const {
    const auto i = static_cast<std::size_t>(rng.below(prob_.size()));
    return rng.uniform() < prob_[i] ? i : alias_[i];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace colorlimits
