#pragma once

#include <string>
#include <vector>

#include "colorlimits/multigraph.hpp"
#include "colorlimits/params.hpp"
#include "colorlimits/tree.hpp"

// Fixtures from the worked examples. Two node colors, written red and blue.
namespace colorlimits::examples {

inline Feature red() { return Feature("red"); }
inline Feature blue() { return Feature("blue"); }

/// Two-type GWT: root red 3/5, blue 2/5; red -> {red, blue} 2/3 or {red, red} 1/3;
/// blue -> {red, red, blue} 1/2 or {blue} 1/2.
inline GwtParams two_color_gwt() {
  GwtParams p;
  p.type_names = {"red", "blue"};
  p.features = {red(), blue()};
  p.root = {0.6, 0.4};
  p.offspring = {
      {{Multiset::of({0, 1}), 2.0 / 3.0}, {Multiset::of({0, 0}), 1.0 / 3.0}},
      {{Multiset::of({0, 0, 1}), 0.5}, {Multiset::of({1}), 0.5}},
  };
  return p;
}

/// Support of W_1 for two_color_gwt, with probabilities 2/5, 1/5, 1/5, 1/5.
inline std::vector<CanonicalTree> two_color_depth_one_support() {
  return {parse_term("(red blue red)"), parse_term("(red red red)"), parse_term("(blue red blue red)"),
          parse_term("(blue blue)")};
}

/// Five nodes v0..v4, colors red blue blue red red, edges 01 03 12 14 34.
inline MultiGraph five_node_graph() {
  return MultiGraph({red(), blue(), blue(), red(), red()}, {{0, 1}, {0, 3}, {1, 2}, {1, 4}, {3, 4}});
}

/// The same five nodes with the alternative matching: edges 01 04 12 14 and a loop at v3.
inline MultiGraph five_node_graph_alternative() {
  return MultiGraph({red(), blue(), blue(), red(), red()}, {{0, 1}, {0, 4}, {1, 2}, {1, 4}, {3, 3}});
}

/// CR^3(v3) in five_node_graph; it is also the member tree of the MP_3 example.
inline CanonicalTree depth_three_member() {
  return parse_term("(red (red (blue red red blue) (red red red)) (red (blue red red blue) (red red red)))");
}

/// The non-member of the MP_3 example; its closure is depth_three_member().
inline CanonicalTree depth_three_non_member() { return parse_term("(red (red (blue red blue)) (red (blue red blue)))"); }

/// Type table of the five-node RCM example: (own type, neighbor types) per node.
struct TypeTable {
  std::vector<Feature> type_features;
  std::vector<TypeId> types;
  std::vector<Multiset> neighborhoods;
};

inline TypeTable five_node_type_table() {
  constexpr TypeId r = 0, b = 1;
  return {{red(), blue()},
          {r, b, b, r, r},
          {Multiset::of({r, b}), Multiset::of({r, b, r}), Multiset::of({b}), Multiset::of({r, r}), Multiset::of({b, r})}};
}

/// Single-type RCM whose neighborhood size follows `degrees`; its RCM is CM(degrees).
inline RcmParams single_type_rcm(const DegreePmf& degrees, Feature f = default_feature()) {
  RcmParams p;
  p.type_names = {"s"};
  p.features = {f};
  for (std::size_t d = 0; d <= degrees.max_degree(); ++d) {
    if (degrees(d) > 0.0) p.mu.push_back({0, Multiset::of(std::vector<TypeId>(d, 0)), degrees(d)});
  }
  return p;
}

}  // namespace colorlimits::examples
