#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "colorlimits/ball.hpp"
#include "colorlimits/errors.hpp"
#include "colorlimits/mp.hpp"
#include "colorlimits/params.hpp"
#include "colorlimits/pmf.hpp"
#include "colorlimits/refine.hpp"
#include "colorlimits/registry.hpp"
#include "colorlimits/samplers.hpp"

namespace colorlimits {

// ---------------------------------------------------------------------------
// Empirical distributions
// ---------------------------------------------------------------------------

inline EmpiricalPmf<ColorId> color_dist(const Coloring& coloring, std::size_t k) {
  EmpiricalPmf<ColorId> out;
  for (auto c : coloring.round(k)) out.add(c);
  return out;
}

/// c_{k,t}: frequencies of round-k colors over all nodes.
inline EmpiricalPmf<ColorId> empirical_color_dist(const MultiGraph& g, std::size_t k,
                                                  const std::shared_ptr<ColorRegistry>& registry) {
  return color_dist(refine(g, k, registry), k);
}

struct BallDistribution {
  EmpiricalPmf<CanonicalTree> trees;
  std::uint64_t cyclic = 0;
  std::uint64_t total = 0;

  double cyclic_fraction() const { return total == 0 ? 0.0 : static_cast<double>(cyclic) / static_cast<double>(total); }
  double tree_probability(const CanonicalTree& t) const {
    auto it = trees.counts.find(t);
    return it == trees.counts.end() || total == 0 ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
  }
};

/// b_{k,t} restricted to tree balls, plus the Cyclic bucket. Tree and cyclic
/// masses together sum to one.
inline BallDistribution empirical_ball_dist(const MultiGraph& g, std::size_t k) {
  BallDistribution out;
  BallExtractor extract(g);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    auto b = extract(v, k);
    if (auto* tree = std::get_if<CanonicalTree>(&b)) {
      out.trees.add(std::move(*tree));
    } else {
      ++out.cyclic;
    }
  }
  out.total = g.node_count();
  return out;
}

// ---------------------------------------------------------------------------
// Edge-type marginals and involution invariance
// ---------------------------------------------------------------------------

/// Average degree and the PMF of ordered endpoint types of a uniform edge endpoint.
/// For color PMFs the pair components are ColorIds of depth k-1; for RCM
/// parameters they are TypeIds.
struct EdgeTypeMarginal {
  double d = 0.0;
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> marginal;
  double asymmetry = 0.0;  // max |m(a, b) - m(b, a)|
  bool divergent = false;
  double degree_mass = 0.0;   // sum of weight * degree
  double total_weight = 0.0;  // sum of weights; d = degree_mass / total_weight

  double operator()(std::uint32_t a, std::uint32_t b) const {
    auto it = marginal.find({a, b});
    return it == marginal.end() ? 0.0 : it->second;
  }
};

namespace detail {

template <typename W>
EdgeTypeMarginal finish_marginal(const std::map<std::pair<std::uint32_t, std::uint32_t>, W>& numerators, W degree_sum,
                                 double d, double degree_bound) {
  EdgeTypeMarginal out;
  out.d = d;
  out.degree_mass = static_cast<double>(degree_sum);
  if (!(d <= degree_bound) || !std::isfinite(d)) {
    out.divergent = true;
    return out;
  }
  if (degree_sum == W{}) return out;
  const double denom = static_cast<double>(degree_sum);
  for (const auto& [pair, num] : numerators) {
    out.marginal.emplace(pair, static_cast<double>(num) / denom);
    const auto rev = numerators.find({pair.second, pair.first});
    const W other = rev == numerators.end() ? W{} : rev->second;
    // exact for integer weights: the difference is formed before division
    const double diff = num >= other ? static_cast<double>(num - other) : static_cast<double>(other - num);
    out.asymmetry = std::max(out.asymmetry, diff / denom);
  }
  return out;
}

}  // namespace detail

/// Edge-type marginal of a weighted set of MP_k colors. Weights are probabilities
/// (double) or exact counts (integer); with counts d is sum(weight * degree) / sum(weight)
/// and the asymmetry is computed without rounding.
template <typename W>
EdgeTypeMarginal edge_type_marginal_colors(const std::map<ColorId, W>& weights, std::size_t k, ColorRegistry& registry,
                                           bool check_membership = true,
                                           double degree_bound = std::numeric_limits<double>::infinity()) {
  static_assert(std::is_arithmetic_v<W>);
  if (k < 1) throw InvalidArgument("edge-type marginal needs k >= 1");
  std::map<std::pair<std::uint32_t, std::uint32_t>, W> numerators;
  W degree_sum{};
  W total{};
  for (const auto& [color, w] : weights) {
    if (check_membership && !mp_membership(*registry.expand(color), k)) {
      throw NotInMPk("support element " + registry.term(color) + " is not in MP_" + std::to_string(k));
    }
    total += w;
    if (w == W{}) continue;
    const auto base = registry.truncate(color, static_cast<std::uint32_t>(k - 1));
    const auto children = registry.children(color);
    degree_sum += static_cast<W>(children.size()) * w;
    for (std::size_t i = 0; i < children.size();) {
      std::size_t j = i;
      while (j < children.size() && children[j] == children[i]) ++j;
      numerators[{base, children[i]}] += static_cast<W>(j - i) * w;
      i = j;
    }
  }
  const double d = total == W{} ? 0.0 : static_cast<double>(degree_sum) / static_cast<double>(total);
  auto out = detail::finish_marginal(numerators, degree_sum, d, degree_bound);
  out.total_weight = static_cast<double>(total);
  return out;
}

inline EdgeTypeMarginal edge_type_marginal_colors(const Pmf<ColorId>& mu, std::size_t k, ColorRegistry& registry,
                                                  bool check_membership = true) {
  return edge_type_marginal_colors(mu.entries(), k, registry, check_membership);
}

inline EdgeTypeMarginal edge_type_marginal_colors(const EmpiricalPmf<ColorId>& mu, std::size_t k,
                                                  ColorRegistry& registry, bool check_membership = false) {
  return edge_type_marginal_colors(mu.counts, k, registry, check_membership);
}

/// Edge-type marginal of an RCM parameter over S x S.
inline EdgeTypeMarginal edge_type_marginal_rcm(const RcmParams& params,
                                               double degree_bound = std::numeric_limits<double>::infinity()) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> numerators;
  double degree_sum = 0.0;
  for (const auto& e : params.mu) {
    degree_sum += static_cast<double>(e.neighbors.size()) * e.p;
    for (const auto& [q, c] : e.neighbors.items()) numerators[{e.type, q}] += static_cast<double>(c) * e.p;
  }
  auto out = detail::finish_marginal(numerators, degree_sum, degree_sum, degree_bound);
  out.total_weight = 1.0;
  return out;
}

struct InvolutionVerdict {
  enum class Kind { invariant, asymmetric, divergent };
  Kind kind;
  double score;

  bool invariant() const noexcept { return kind == Kind::invariant; }
};

inline InvolutionVerdict check_involution_invariance(const EdgeTypeMarginal& m, double tol) {
  if (m.divergent) return {InvolutionVerdict::Kind::divergent, std::numeric_limits<double>::infinity()};
  if (m.asymmetry <= tol) return {InvolutionVerdict::Kind::invariant, m.asymmetry};
  return {InvolutionVerdict::Kind::asymmetric, m.asymmetry};
}

inline std::string to_string(InvolutionVerdict::Kind k) {
  switch (k) {
    case InvolutionVerdict::Kind::invariant: return "invariant";
    case InvolutionVerdict::Kind::asymmetric: return "asymmetric";
    case InvolutionVerdict::Kind::divergent: return "divergent";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// RCM -> GWT local limit and its inverse
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<OffspringEntry> sorted_entries(std::map<Multiset, double> m) {
  std::vector<OffspringEntry> out;
  out.reserve(m.size());
  for (auto& [ms, p] : m) out.push_back({ms, p});
  return out;
}

// Offspring of (s0, s1) from the root offspring of (none, s1): size-biased by the
// number of (s1, s0) elements. Empty when no root neighborhood of s1 contains s0.
inline std::vector<OffspringEntry> size_biased(const std::vector<OffspringEntry>& root_offspring, TypeId echo_type) {
  std::map<Multiset, double> out;
  double norm = 0.0;
  for (const auto& e : root_offspring) {
    const double w = static_cast<double>(e.children.count(echo_type)) * e.p;
    if (w > 0.0) {
      out[e.children] += w;
      norm += w;
    }
  }
  if (norm <= 0.0) return {};
  for (auto& [ms, p] : out) p /= norm;
  return sorted_entries(std::move(out));
}

}  // namespace detail

/// Local limit of RCM_t(mu): a GWT over (parent type or none) x own type with
///   root (none, s) ~ Z_s,
///   offspring of (none, s) = mu(s, .) / Z_s lifted to pair types (s, q),
///   offspring of (s0, s1) = offspring of (none, s1) size-biased by its count of (s1, s0).
/// Non-root nodes consume one (s1, s0) element for the edge to their parent.
/// Types with Z_s = 0 are dropped.
inline GwtParams rcm_local_limit(const RcmParams& params, double tol = kNormalizationTolerance) {
  params.validate();
  const auto marginal = edge_type_marginal_rcm(params);
  if (marginal.divergent || !std::isfinite(marginal.d)) throw InfiniteDegree("RCM parameter has infinite mean degree");
  if (marginal.asymmetry > tol) {
    throw NotInvolutionInvariant("RCM parameter is not involution invariant (asymmetry " +
                                 std::to_string(marginal.asymmetry) + ")");
  }
  std::vector<double> z(params.type_count(), 0.0);
  for (const auto& e : params.mu) z[e.type] += e.p;
  std::vector<std::int64_t> remap(params.type_count(), -1);
  std::vector<std::string> names;
  std::vector<Feature> features;
  for (TypeId s = 0; s < params.type_count(); ++s) {
    if (z[s] > 0.0) {
      remap[s] = static_cast<std::int64_t>(names.size());
      names.push_back(params.type_names[s]);
      features.push_back(params.features[s]);
    }
  }
  for (const auto& e : params.mu) {
    if (e.p <= 0.0) continue;
    for (const auto& [q, c] : e.neighbors.items()) {
      if (remap[q] < 0) {
        throw NotInvolutionInvariant("type " + params.type_names[q] + " carries edge mass but never occurs as a node type");
      }
    }
  }
  const auto n = static_cast<TypeId>(names.size());
  auto layout = PairLayout::dense(names, features);
  const auto pair_type = [n](std::int64_t parent, TypeId own) { return static_cast<TypeId>((parent + 1) * n + own); };

  GwtParams out;
  const auto total_types = static_cast<std::size_t>(n + 1) * n;
  out.type_names.resize(total_types);
  out.features.resize(total_types);
  out.root.assign(total_types, 0.0);
  out.offspring.resize(total_types);
  for (TypeId t = 0; t < total_types; ++t) {
    const auto [p, q] = layout.pair_of_type[t];
    out.type_names[t] = (p < 0 ? std::string("^") : names[p]) + "/" + names[q];
    out.features[t] = features[q];
  }

  std::vector<std::map<Multiset, double>> root_offspring(n);
  for (const auto& e : params.mu) {
    if (e.p <= 0.0) continue;
    const auto s = static_cast<TypeId>(remap[e.type]);
    std::vector<TypeId> children;
    for (const auto& [q, c] : e.neighbors.items()) {
      children.insert(children.end(), c, pair_type(s, static_cast<TypeId>(remap[q])));
    }
    root_offspring[s][Multiset::of(std::move(children))] += e.p / z[e.type];
  }
  for (TypeId s0 = 0; s0 < params.type_count(); ++s0) {
    if (remap[s0] >= 0) out.root[pair_type(-1, static_cast<TypeId>(remap[s0]))] = z[s0];
  }
  for (TypeId s = 0; s < n; ++s) out.offspring[pair_type(-1, s)] = detail::sorted_entries(std::move(root_offspring[s]));
  for (TypeId s0 = 0; s0 < n; ++s0) {
    for (TypeId s1 = 0; s1 < n; ++s1) {
      out.offspring[pair_type(s0, s1)] = detail::size_biased(out.offspring[pair_type(-1, s1)], pair_type(s1, s0));
    }
  }
  out.consume_parent_edge = true;
  out.layout = std::move(layout);
  return out;
}

struct SuVerdict {
  enum class Clause { none, layout, normalization, root_support, child_parent, root_to_child, edge_symmetry };
  Clause clause = Clause::none;
  std::string detail;

  bool ok() const noexcept { return clause == Clause::none; }
};

inline std::string to_string(SuVerdict::Clause c) {
  switch (c) {
    case SuVerdict::Clause::none: return "ok";
    case SuVerdict::Clause::layout: return "layout";
    case SuVerdict::Clause::normalization: return "normalization";
    case SuVerdict::Clause::root_support: return "root-support";
    case SuVerdict::Clause::child_parent: return "child-parent";
    case SuVerdict::Clause::root_to_child: return "root-to-child";
    case SuVerdict::Clause::edge_symmetry: return "edge-symmetry";
  }
  return "?";
}

/// Checks the simplified unimodular form: pair-type layout, root mass only on
/// (none, s), children of (p, q) all of the form (q, .), non-root offspring equal
/// to the size-biased root offspring, and a symmetric edge-type marginal.
inline SuVerdict validate_su_gwt(const GwtParams& w, double tol = kNormalizationTolerance) {
  using C = SuVerdict::Clause;
  if (!w.layout) return {C::layout, "type set is not factored into (parent, own) pairs"};
  try {
    w.validate();
  } catch (const Error& e) {
    return {C::normalization, e.what()};
  }
  const auto& layout = *w.layout;
  for (TypeId t = 0; t < w.type_count(); ++t) {
    if (layout.pair_of_type[t].first != PairLayout::kNoParent && w.root[t] > 0.0) {
      return {C::root_support, "root mass on non-root type " + w.type_names[t]};
    }
  }
  for (TypeId t = 0; t < w.type_count(); ++t) {
    const auto own = static_cast<std::int64_t>(layout.pair_of_type[t].second);
    for (const auto& e : w.offspring[t]) {
      if (e.p <= 0.0) continue;
      for (const auto& [c, m] : e.children.items()) {
        if (layout.pair_of_type[c].first != own) {
          return {C::child_parent, "child " + w.type_names[c] + " of " + w.type_names[t] + " has the wrong parent"};
        }
      }
    }
  }
  for (TypeId t = 0; t < w.type_count(); ++t) {
    const auto [s0, s1] = layout.pair_of_type[t];
    if (s0 == PairLayout::kNoParent) continue;
    const auto root_type = layout.type_of(PairLayout::kNoParent, s1);
    const auto echo = layout.type_of(static_cast<std::int64_t>(s1), static_cast<TypeId>(s0));
    if (!root_type || !echo) return {C::layout, "missing pair types for " + w.type_names[t]};
    const auto expected = detail::size_biased(w.offspring[*root_type], *echo);
    if (expected.empty()) continue;  // never generated
    std::map<Multiset, double> diff;
    for (const auto& e : expected) diff[e.children] += e.p;
    for (const auto& e : w.offspring[t]) diff[e.children] -= e.p;
    for (const auto& [ms, d] : diff) {
      if (std::abs(d) > tol) {
        return {C::root_to_child, "offspring of " + w.type_names[t] + " differs from the size-biased root offspring by " +
                                      std::to_string(std::abs(d))};
      }
    }
  }
  // edge-type symmetry over base types
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> numerators;
  double degree = 0.0;
  for (TypeId t = 0; t < w.type_count(); ++t) {
    const auto [p, s] = layout.pair_of_type[t];
    if (p != PairLayout::kNoParent || w.root[t] <= 0.0) continue;
    for (const auto& e : w.offspring[t]) {
      degree += static_cast<double>(e.children.size()) * w.root[t] * e.p;
      for (const auto& [c, m] : e.children.items()) {
        numerators[{s, layout.pair_of_type[c].second}] += static_cast<double>(m) * w.root[t] * e.p;
      }
    }
  }
  const auto marginal = detail::finish_marginal(numerators, degree, degree, std::numeric_limits<double>::infinity());
  if (marginal.asymmetry > tol) {
    return {C::edge_symmetry, "edge-type marginal asymmetry " + std::to_string(marginal.asymmetry)};
  }
  return {};
}

/// Inverse of rcm_local_limit on simplified unimodular trees:
/// mu(s, A) = root(none, s) * offspring(none, s)({(s, a) : a in A}).
inline RcmParams gwt_to_rcm(const GwtParams& w, double tol = kNormalizationTolerance) {
  if (auto v = validate_su_gwt(w, tol); !v.ok()) {
    throw NotSimplifiedUnimodular("not simplified unimodular (" + to_string(v.clause) + "): " + v.detail);
  }
  const auto& layout = *w.layout;
  RcmParams out;
  out.type_names = layout.base_names;
  out.features = layout.base_features;
  std::map<std::pair<TypeId, Multiset>, double> mu;
  for (TypeId t = 0; t < w.type_count(); ++t) {
    const auto [p, s] = layout.pair_of_type[t];
    if (p != PairLayout::kNoParent || w.root[t] <= 0.0) continue;
    for (const auto& e : w.offspring[t]) {
      std::vector<TypeId> neighbors;
      for (const auto& [c, m] : e.children.items()) neighbors.insert(neighbors.end(), m, layout.pair_of_type[c].second);
      mu[{s, Multiset::of(std::move(neighbors))}] += w.root[t] * e.p;
    }
  }
  for (auto& [key, p] : mu) out.mu.push_back({key.first, key.second, p});
  return out;
}

/// Largest absolute difference between the PMFs of two GWTs over the same type
/// names; infinity when the type sets differ.
inline double gwt_max_difference(const GwtParams& a, const GwtParams& b) {
  if (a.type_names != b.type_names || a.features != b.features) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t t = 0; t < a.type_count(); ++t) {
    worst = std::max(worst, std::abs(a.root[t] - b.root[t]));
    std::map<Multiset, double> diff;
    for (const auto& e : a.offspring[t]) diff[e.children] += e.p;
    for (const auto& e : b.offspring[t]) diff[e.children] -= e.p;
    for (const auto& [ms, d] : diff) worst = std::max(worst, std::abs(d));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Sofic color PMF -> RCM
// ---------------------------------------------------------------------------

/// RCM parameter over S = depth-(k-1) truncations of the support of nu:
/// mu(T|_{k-1}, {T(c) : c child of the root}) = nu(T). Type names are tree terms.
inline RcmParams rcm_from_sofic(const Pmf<ColorId>& nu, std::size_t k, ColorRegistry& registry,
                                double tol = kNormalizationTolerance) {
  if (k < 1) throw InvalidArgument("rcm_from_sofic needs k >= 1");
  nu.validate();
  for (const auto& [color, p] : nu) {
    const auto tree = registry.expand(color);
    if (tree->depth() > k || !mp_membership(*tree, k)) {
      throw NotInMPk(registry.term(color) + " is not in MP_" + std::to_string(k));
    }
  }
  const auto verdict = check_involution_invariance(edge_type_marginal_colors(nu, k, registry, false), tol);
  if (!verdict.invariant()) {
    throw NotInvolutionInvariant("color PMF is " + to_string(verdict.kind) + " (score " + std::to_string(verdict.score) + ")");
  }
  // collect base types in canonical tree order so type ids do not depend on ColorIds
  std::map<CanonicalTree, ColorId> ordered;
  for (const auto& [color, p] : nu) {
    const auto base = registry.truncate(color, static_cast<std::uint32_t>(k - 1));
    ordered.emplace(*registry.expand(base), base);
    for (auto c : registry.children(color)) ordered.emplace(*registry.expand(c), c);
  }
  std::map<ColorId, TypeId> type_of;
  RcmParams out;
  for (const auto& [tree, color] : ordered) {
    type_of.emplace(color, static_cast<TypeId>(out.type_names.size()));
    out.type_names.push_back(to_term(tree));
    out.features.push_back(tree.root_feature());
  }
  std::map<std::pair<TypeId, Multiset>, double> mu;
  for (const auto& [color, p] : nu) {
    if (p <= 0.0) continue;
    const auto base = type_of.at(registry.truncate(color, static_cast<std::uint32_t>(k - 1)));
    std::vector<TypeId> neighbors;
    for (auto c : registry.children(color)) neighbors.push_back(type_of.at(c));
    mu[{base, Multiset::of(std::move(neighbors))}] += p;
  }
  for (auto& [key, p] : mu) out.mu.push_back({key.first, key.second, p});
  return out;
}

// ---------------------------------------------------------------------------
// Color distribution of a GWT root
// ---------------------------------------------------------------------------

struct ColorEstimate {
  Pmf<ColorId> pmf;
  std::map<ColorId, double> stderr;        // sqrt(p (1 - p) / n)
  std::map<ColorId, std::pair<double, double>> wilson;  // 95% Wilson interval
  std::size_t samples = 0;
};

inline std::pair<double, double> wilson_interval(double p, double n, double z = 1.96) {
  const double denom = 1.0 + z * z / n;
  const double centre = (p + z * z / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

/// Monte-Carlo estimate of the law of CR^k(root of W_k).
inline ColorEstimate gwt_color_dist(const GwtParams& params, std::size_t k, std::size_t n_samples, Rng& rng,
                                    const std::shared_ptr<ColorRegistry>& registry,
                                    std::size_t budget = GwtSampler::kDefaultBudget) {
  if (n_samples == 0) throw InvalidArgument("gwt_color_dist needs at least one sample");
  GwtSampler sampler(params, budget);
  EmpiricalPmf<ColorId> counts;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const auto s = sampler.sample(k, rng);
    counts.add(refine(sampler.to_graph(s), k, registry).color(k, 0));
  }
  ColorEstimate out;
  out.pmf = counts.to_pmf();
  out.samples = n_samples;
  const auto n = static_cast<double>(n_samples);
  for (const auto& [c, p] : out.pmf) {
    out.stderr[c] = std::sqrt(p * (1.0 - p) / n);
    out.wilson[c] = wilson_interval(p, n);
  }
  return out;
}

}  // namespace colorlimits
