#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "colorlimits/errors.hpp"
#include "colorlimits/refine.hpp"
#include "colorlimits/tree.hpp"

namespace colorlimits {

namespace detail {

// Index of a child c of `node` with T(c) == parent|_{depth(T(c))}, if any.
inline std::optional<std::size_t> find_echo_child(const CanonicalTree& node, const CanonicalTree& parent) {
  for (std::size_t i = 0; i < node.children().size(); ++i) {
    const auto& c = node.children()[i];
    if (c == parent.truncate(c.depth())) return i;
  }
  return std::nullopt;
}

inline bool mp_check(const CanonicalTree& node, const CanonicalTree& parent, std::size_t depth, std::size_t k) {
  if (depth >= k) return true;
  if (!find_echo_child(node, parent)) return false;
  for (const auto& c : node.children()) {
    if (!mp_check(c, node, depth + 1, k)) return false;
  }
  return true;
}

inline CanonicalTree build_witness(const CanonicalTree& node, const CanonicalTree& parent, std::size_t depth,
                                   std::size_t k) {
  if (depth >= k) return node;
  const auto skip = find_echo_child(node, parent);
  if (!skip) throw NotInMPk("tree fails the parent-echo condition");
  std::vector<CanonicalTree> children;
  for (std::size_t i = 0; i < node.children().size(); ++i) {
    if (i == *skip) continue;
    children.push_back(build_witness(node.children()[i], node, depth + 1, k));
  }
  return CanonicalTree::from_children(node.root_feature(), std::move(children));
}

}  // namespace detail

/// Membership in MP_k: every node that is neither the root nor at depth k has a
/// child whose subtree equals the truncation of its parent's subtree to the same depth.
inline bool mp_membership(const CanonicalTree& t, std::size_t k) {
  if (t.depth() > k) throw InvalidArgument("tree depth exceeds k");
  for (const auto& c : t.children()) {
    if (!detail::mp_check(c, t, 1, k)) return false;
  }
  return true;
}

/// CR^k of the root of `t`, with `t` read as an attributed graph.
inline CanonicalTree cr_closure(const CanonicalTree& t, std::size_t k, std::shared_ptr<ColorRegistry> registry) {
  if (t.depth() > k) throw InvalidArgument("tree depth exceeds k");
  auto coloring = refine(tree_to_graph(t), k, registry);
  return *registry->expand(coloring.color(k, 0));
}

inline CanonicalTree cr_closure(const CanonicalTree& t, std::size_t k) {
  return cr_closure(t, k, std::make_shared<ColorRegistry>());
}

/// A tree W with CR^k(root of W) == t, for t in MP_k: every non-root node drops
/// one echo child (the copy of its parent's view) and the rest is rebuilt recursively.
inline CanonicalTree mp_witness(const CanonicalTree& t, std::size_t k) {
  if (!mp_membership(t, k)) throw NotInMPk("tree is not in MP_" + std::to_string(k));
  std::vector<CanonicalTree> children;
  for (const auto& c : t.children()) children.push_back(detail::build_witness(c, t, 1, k));
  return CanonicalTree::from_children(t.root_feature(), std::move(children));
}

}  // namespace colorlimits
