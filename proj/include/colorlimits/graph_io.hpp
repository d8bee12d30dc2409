#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "colorlimits/errors.hpp"
#include "colorlimits/multigraph.hpp"

namespace colorlimits {

// Line-oriented graph format:
//   t <node_count>
//   n <id> <feature-token>     (optional; missing nodes get feature "_")
//   e <u> <v>                  (repeat for multiplicity; "e v v" is a loop)
// Blank lines and lines starting with '#' are ignored.

inline MultiGraph read_graph(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t n = 0;
  std::vector<Feature> features;
  std::vector<bool> declared;
  std::vector<Edge> edges;

  auto fail = [&](const std::string& what) -> void {
    throw ParseError("graph line " + std::to_string(line_no) + ": " + what);
  };
  auto parse_id = [&](const std::string& tok) -> NodeId {
    std::size_t used = 0;
    unsigned long long value = 0;
    try {
      value = std::stoull(tok, &used);
    } catch (const std::exception&) {
      fail("bad node id '" + tok + "'");
    }
    if (used != tok.size() || tok.empty() || tok[0] == '-') fail("bad node id '" + tok + "'");
    if (value >= n) fail("dangling node id " + tok);
    return static_cast<NodeId>(value);
  };

  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    std::vector<std::string> args;
    for (std::string tok; ls >> tok;) args.push_back(tok);

    if (tag == "t") {
      if (have_header) fail("duplicate header");
      if (args.size() != 1) fail("expected 't <node_count>'");
      try {
        std::size_t used = 0;
        n = std::stoull(args[0], &used);
        if (used != args[0].size() || args[0][0] == '-') fail("bad node count");
      } catch (const ParseError&) {
        throw;
      } catch (const std::exception&) {
        fail("bad node count");
      }
      have_header = true;
      features.assign(n, default_feature());
      declared.assign(n, false);
    } else if (!have_header) {
      fail("missing 't' header");
    } else if (tag == "n") {
      if (args.size() != 2) fail("expected 'n <id> <feature>'");
      const auto id = parse_id(args[0]);
      if (declared[id]) fail("duplicate node declaration " + args[0]);
      declared[id] = true;
      features[id] = Feature(args[1]);
    } else if (tag == "e") {
      if (args.size() != 2) fail("expected 'e <u> <v>'");
      edges.push_back({parse_id(args[0]), parse_id(args[1])});
    } else {
      fail("unknown record '" + tag + "'");
    }
  }
  if (!have_header) throw ParseError("graph: missing 't' header");
  return MultiGraph(std::move(features), std::move(edges));
}

inline void write_graph(const MultiGraph& g, std::ostream& out) {
  out << "t " << g.node_count() << '\n';
  for (NodeId v = 0; v < g.node_count(); ++v) out << "n " << v << ' ' << g.feature(v).name() << '\n';
  for (const auto& e : g.edges()) out << "e " << e.u << ' ' << e.v << '\n';
}

inline MultiGraph read_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open graph file " + path);
  return read_graph(in);
}

inline void write_graph(const MultiGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write graph file " + path);
  write_graph(g, out);
}

}  // namespace colorlimits
