#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "colorlimits/errors.hpp"
#include "colorlimits/learnability.hpp"
#include "colorlimits/params.hpp"
#include "colorlimits/pmf.hpp"
#include "colorlimits/tree.hpp"

namespace colorlimits::io {

using nlohmann::json;

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline void save_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  out << j.dump(2) << '\n';
}

namespace detail {

template <typename T>
T get(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("field '") + key + "': " + e.what());
  }
}

inline std::pair<std::vector<std::string>, std::vector<Feature>> read_types(const json& j) {
  std::vector<std::string> names;
  std::vector<Feature> features;
  std::map<std::string, int> seen;
  for (const auto& t : j) {
    auto name = get<std::string>(t, "name");
    if (!seen.emplace(name, 0).second) throw ParseError("duplicate type name " + name);
    features.emplace_back(t.contains("feature") ? get<std::string>(t, "feature") : name);
    names.push_back(std::move(name));
  }
  return {std::move(names), std::move(features)};
}

inline json write_types(const std::vector<std::string>& names, const std::vector<Feature>& features) {
  json out = json::array();
  for (std::size_t i = 0; i < names.size(); ++i) out.push_back({{"name", names[i]}, {"feature", features[i].name()}});
  return out;
}

inline TypeId lookup(const std::map<std::string, TypeId>& index, const std::string& name) {
  auto it = index.find(name);
  if (it == index.end()) throw ParseError("unknown type " + name);
  return it->second;
}

inline std::map<std::string, TypeId> index_of(const std::vector<std::string>& names) {
  std::map<std::string, TypeId> out;
  for (TypeId i = 0; i < names.size(); ++i) out.emplace(names[i], i);
  return out;
}

inline Multiset read_multiset(const json& j, const std::map<std::string, TypeId>& index) {
  std::vector<TypeId> items;
  for (const auto& x : j) items.push_back(lookup(index, x.get<std::string>()));
  return Multiset::of(std::move(items));
}

inline json write_multiset(const Multiset& m, const std::vector<std::string>& names) {
  json out = json::array();
  for (auto t : m.expanded()) out.push_back(names[t]);
  return out;
}

}  // namespace detail

// DegreePmf: {"pmf": [p0, p1, ...]} | {"poisson": lambda, "tail": 1e-8} | {"point": d}
inline DegreePmf degree_pmf_from_json(const json& j) {
  if (j.contains("pmf")) return DegreePmf(detail::get<std::vector<double>>(j, "pmf"));
  if (j.contains("poisson")) {
    const double tail = j.contains("tail") ? detail::get<double>(j, "tail") : 1e-8;
    return DegreePmf::poisson(detail::get<double>(j, "poisson"), tail);
  }
  if (j.contains("point")) return DegreePmf::point(detail::get<std::size_t>(j, "point"));
  throw ParseError("degree PMF needs one of 'pmf', 'poisson', 'point'");
}

inline json to_json(const DegreePmf& p) { return {{"pmf", p.probs()}}; }

// RcmParams: {"types": [{"name", "feature"}], "mu": [{"type", "neighbors": [names], "p"}]}
inline RcmParams rcm_from_json(const json& j) {
  RcmParams out;
  std::tie(out.type_names, out.features) = detail::read_types(detail::get<json>(j, "types"));
  const auto index = detail::index_of(out.type_names);
  for (const auto& e : detail::get<json>(j, "mu")) {
    out.mu.push_back({detail::lookup(index, detail::get<std::string>(e, "type")),
                      detail::read_multiset(detail::get<json>(e, "neighbors"), index), detail::get<double>(e, "p")});
  }
  out.validate();
  return out;
}

inline json to_json(const RcmParams& p) {
  json mu = json::array();
  for (const auto& e : p.mu) {
    mu.push_back({{"type", p.type_names[e.type]}, {"neighbors", detail::write_multiset(e.neighbors, p.type_names)}, {"p", e.p}});
  }
  return {{"types", detail::write_types(p.type_names, p.features)}, {"mu", mu}};
}

// GwtParams: {"types": [...], "root": {name: p}, "offspring": {name: [{"children": [names], "p"}]},
//             "consume_parent_edge": bool,
//             "layout": {"base": [...], "pairs": [[parent name or null, own name], ...]}}
// Pairs are listed in type order.
inline GwtParams gwt_from_json(const json& j) {
  GwtParams out;
  std::tie(out.type_names, out.features) = detail::read_types(detail::get<json>(j, "types"));
  const auto n = out.type_count();
  const auto index = detail::index_of(out.type_names);
  out.root.assign(n, 0.0);
  out.offspring.resize(n);
  const auto root = detail::get<json>(j, "root");
  for (const auto& [name, p] : root.items()) out.root[detail::lookup(index, name)] = p.get<double>();
  if (j.contains("offspring")) {
    for (const auto& [name, entries] : j.at("offspring").items()) {
      auto& dst = out.offspring[detail::lookup(index, name)];
      for (const auto& e : entries) {
        dst.push_back({detail::read_multiset(detail::get<json>(e, "children"), index), detail::get<double>(e, "p")});
      }
    }
  }
  out.consume_parent_edge = j.value("consume_parent_edge", false);
  if (j.contains("layout")) {
    const auto& l = j.at("layout");
    PairLayout layout;
    std::tie(layout.base_names, layout.base_features) = detail::read_types(detail::get<json>(l, "base"));
    const auto base_index = detail::index_of(layout.base_names);
    for (const auto& pair : detail::get<json>(l, "pairs")) {
      if (!pair.is_array() || pair.size() != 2) throw ParseError("layout pair must be [parent, own]");
      const std::int64_t parent =
          pair[0].is_null() ? PairLayout::kNoParent : detail::lookup(base_index, pair[0].get<std::string>());
      layout.pair_of_type.emplace_back(parent, detail::lookup(base_index, pair[1].get<std::string>()));
    }
    layout.reindex();
    out.layout = std::move(layout);
  }
  out.validate();
  return out;
}

inline json to_json(const GwtParams& p) {
  json root = json::object();
  json offspring = json::object();
  for (std::size_t t = 0; t < p.type_count(); ++t) {
    if (p.root[t] > 0.0) root[p.type_names[t]] = p.root[t];
    if (p.offspring[t].empty()) continue;
    json entries = json::array();
    for (const auto& e : p.offspring[t]) {
      entries.push_back({{"children", detail::write_multiset(e.children, p.type_names)}, {"p", e.p}});
    }
    offspring[p.type_names[t]] = entries;
  }
  json out = {{"types", detail::write_types(p.type_names, p.features)},
              {"root", root},
              {"offspring", offspring},
              {"consume_parent_edge", p.consume_parent_edge}};
  if (p.layout) {
    json pairs = json::array();
    for (const auto& [parent, own] : p.layout->pair_of_type) {
      pairs.push_back({parent < 0 ? json(nullptr) : json(p.layout->base_names[parent]), p.layout->base_names[own]});
    }
    out["layout"] = {{"base", detail::write_types(p.layout->base_names, p.layout->base_features)}, {"pairs", pairs}};
  }
  return out;
}

// Tree PMF: {"k": k, "pmf": {term: p}}; "k" is optional.
struct TreePmf {
  std::optional<std::size_t> k;
  std::map<CanonicalTree, double> pmf;
};

inline TreePmf tree_pmf_from_json(const json& j) {
  TreePmf out;
  if (j.contains("k")) out.k = detail::get<std::size_t>(j, "k");
  const auto entries = detail::get<json>(j, "pmf");
  for (const auto& [term, p] : entries.items()) out.pmf[parse_term(term)] += p.get<double>();
  return out;
}

inline json tree_pmf_to_json(const std::map<CanonicalTree, double>& pmf, std::optional<std::size_t> k = std::nullopt) {
  json entries = json::object();
  for (const auto& [tree, p] : pmf) entries[to_term(tree)] = p;
  json out = {{"pmf", entries}};
  if (k) out["k"] = *k;
  return out;
}

/// Interns every tree of a tree PMF into `registry`.
inline Pmf<ColorId> intern_pmf(const std::map<CanonicalTree, double>& pmf, ColorRegistry& registry) {
  Pmf<ColorId> out;
  for (const auto& [tree, p] : pmf) out.add(registry.intern(tree), p);
  return out;
}

inline std::map<CanonicalTree, double> expand_pmf(const Pmf<ColorId>& pmf, ColorRegistry& registry) {
  std::map<CanonicalTree, double> out;
  for (const auto& [c, p] : pmf) out[*registry.expand(c)] += p;
  return out;
}

// Classifier: {"mode": ..., "k": k, "parameters": {...}, "labels": [...]}
//   constant: {"label"}; table: {"table": {term: label}, "default"}; indicator: {"trees": [terms]}
//   degree-threshold: {"theta"}; degree-parity and hash-injective take none.
inline ColorClassifier classifier_from_json(const json& j) {
  const auto mode = detail::get<std::string>(j, "mode");
  const auto k = detail::get<std::size_t>(j, "k");
  const json params = j.value("parameters", json::object());
  if (mode == "constant") return ColorClassifier::constant(k, params.value("label", Label{0}));
  if (mode == "table") {
    std::map<CanonicalTree, Label> table;
    const auto entries = detail::get<json>(params, "table");
    for (const auto& [term, label] : entries.items()) table.emplace(parse_term(term), label.get<Label>());
    return ColorClassifier::table(k, std::move(table), params.value("default", Label{0}));
  }
  if (mode == "indicator") {
    std::set<CanonicalTree> trees;
    for (const auto& term : detail::get<json>(params, "trees")) trees.insert(parse_term(term.get<std::string>()));
    return ColorClassifier::indicator(k, trees);
  }
  if (mode == "hash-injective") return ColorClassifier::hash_injective(k);
  if (mode == "degree-parity") return ColorClassifier::degree_parity(k);
  if (mode == "degree-threshold") return ColorClassifier::degree_threshold(detail::get<std::size_t>(params, "theta"), k);
  throw ParseError("unknown classifier mode " + mode);
}

}  // namespace colorlimits::io
