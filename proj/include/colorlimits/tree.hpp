#pragma once

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "colorlimits/errors.hpp"
#include "colorlimits/feature.hpp"
#include "colorlimits/multigraph.hpp"

namespace colorlimits {

/// Rooted attributed tree with children in arbitrary order.
struct RootedTree {
  Feature feature;
  std::vector<RootedTree> children;
};

/// Rooted attributed tree in canonical form: children are sorted ascending by the
/// order below, recursively. Two isomorphic trees have equal canonical forms.
///
/// Order: compare root feature tokens, then the child sequences lexicographically
/// (a proper prefix sorts first).
class CanonicalTree {
 public:
  explicit CanonicalTree(Feature root = default_feature()) : feature_(root) {}

  Feature root_feature() const noexcept { return feature_; }
  const std::vector<CanonicalTree>& children() const noexcept { return children_; }
  std::size_t degree() const noexcept { return children_.size(); }
  bool is_leaf() const noexcept { return children_.empty(); }

  std::size_t depth() const {
    std::size_t d = 0;
    for (const auto& c : children_) d = std::max(d, c.depth() + 1);
    return d;
  }

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& c : children_) n += c.size();
    return n;
  }

  /// T|_d: the subtree of nodes at depth <= d.
  CanonicalTree truncate(std::size_t d) const {
    CanonicalTree out(feature_);
    if (d == 0) return out;
    out.children_.reserve(children_.size());
    for (const auto& c : children_) out.children_.push_back(c.truncate(d - 1));
    // truncation can reorder siblings that differed only below depth d
    std::sort(out.children_.begin(), out.children_.end());
    return out;
  }

  friend bool operator==(const CanonicalTree& a, const CanonicalTree& b) {
    return a.feature_ == b.feature_ && a.children_ == b.children_;
  }

  friend std::strong_ordering operator<=>(const CanonicalTree& a, const CanonicalTree& b) {
    if (auto c = a.feature_ <=> b.feature_; c != 0) return c;
    const auto n = std::min(a.children_.size(), b.children_.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (auto c = a.children_[i] <=> b.children_[i]; c != 0) return c;
    }
    return a.children_.size() <=> b.children_.size();
  }

  /// Builds a node from children that are already canonical, in any order.
  static CanonicalTree from_children(Feature root, std::vector<CanonicalTree> children) {
    CanonicalTree out(root);
    out.children_ = std::move(children);
    std::sort(out.children_.begin(), out.children_.end());
    return out;
  }

  /// Copy of this tree with the i-th child removed.
  CanonicalTree without_child(std::size_t i) const {
    CanonicalTree out(feature_);
    out.children_.reserve(children_.size() - 1);
    for (std::size_t j = 0; j < children_.size(); ++j) {
      if (j != i) out.children_.push_back(children_[j]);
    }
    return out;
  }

 private:
  Feature feature_;
  std::vector<CanonicalTree> children_;
};

inline CanonicalTree canonical_encode(const RootedTree& tree) {
  std::vector<CanonicalTree> children;
  children.reserve(tree.children.size());
  for (const auto& c : tree.children) children.push_back(canonical_encode(c));
  return CanonicalTree::from_children(tree.feature, std::move(children));
}

inline RootedTree to_rooted(const CanonicalTree& tree) {
  RootedTree out{tree.root_feature(), {}};
  for (const auto& c : tree.children()) out.children.push_back(to_rooted(c));
  return out;
}

// --- parenthesized term format: (feature child child ...) ---

namespace detail {

// Nested leaves are written as bare tokens: (red blue) is a red root with one blue leaf.
inline void append_term(const CanonicalTree& t, std::string& out, bool nested = false) {
  if (nested && t.is_leaf()) {
    out += t.root_feature().name();
    return;
  }
  out += '(';
  out += t.root_feature().name();
  for (const auto& c : t.children()) {
    out += ' ';
    append_term(c, out, true);
  }
  out += ')';
}

class TermParser {
 public:
  explicit TermParser(std::string_view text) : text_(text) {}

  RootedTree parse_document() {
    skip_space();
    auto tree = parse_node();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    return tree;
  }

 private:
  std::string_view token() {
    const auto start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')') {
      ++pos_;
    }
    if (pos_ == start) fail("expected feature token");
    return text_.substr(start, pos_ - start);
  }

  RootedTree parse_node() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of term");
    if (text_[pos_] != '(') return RootedTree{Feature(token()), {}};
    ++pos_;
    skip_space();
    RootedTree node{Feature(token()), {}};
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) fail("unterminated term");
      if (text_[pos_] == ')') {
        ++pos_;
        return node;
      }
      node.children.push_back(parse_node());
    }
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("tree term: " + what + " at offset " + std::to_string(pos_));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::string to_term(const CanonicalTree& t) {
  std::string out;
  detail::append_term(t, out);
  return out;
}

inline RootedTree parse_rooted_term(std::string_view text) { return detail::TermParser(text).parse_document(); }

inline CanonicalTree parse_term(std::string_view text) { return canonical_encode(parse_rooted_term(text)); }

/// Tree as an attributed graph; node 0 is the root, nodes in preorder.
inline MultiGraph tree_to_graph(const CanonicalTree& tree) {
  std::vector<Feature> features;
  std::vector<Edge> edges;
  struct Frame {
    const CanonicalTree* node;
    NodeId parent;
  };
  std::vector<Frame> stack{{&tree, 0}};
  while (!stack.empty()) {
    auto [node, parent] = stack.back();
    stack.pop_back();
    const auto id = static_cast<NodeId>(features.size());
    features.push_back(node->root_feature());
    if (id != 0) edges.push_back({parent, id});
    for (auto it = node->children().rbegin(); it != node->children().rend(); ++it) stack.push_back({&*it, id});
  }
  return MultiGraph(std::move(features), std::move(edges));
}

inline CanonicalTree leaf(Feature f) { return CanonicalTree(f); }

/// Refinement color of any node of a `degree`-regular graph with uniform feature
/// after k rounds: every node above depth k has `degree` children. degree = 2
/// gives the perfect binary tree of depth k.
inline CanonicalTree regular_unrolling(std::size_t k, std::size_t degree, Feature f = default_feature()) {
  if (k == 0) return CanonicalTree(f);
  auto child = regular_unrolling(k - 1, degree, f);
  return CanonicalTree::from_children(f, std::vector<CanonicalTree>(degree, child));
}

}  // namespace colorlimits
