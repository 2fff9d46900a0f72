#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "recognet/net.hpp"

namespace recognet {

/// Contents of a BNET file.
///
///   node <id> <cardinality> [<state-label> ...]
///   arc <parent-id> <child-id>
///   cpt <node-id>
///   row <parent-state-indices | -> : <p1> ... <pk>
///   evidence <node-id> <state-index>
///   level <node-id> <n>
///
/// One statement per line, '#' starts a comment. Parent order for a node is
/// the order of its `arc` statements. Rows must appear in canonical order
/// (last parent varying fastest) and cover every parent combination.
struct BnetDocument {
  BayesNet net;
  Evidence evidence;
  /// Decomposition level per node (0 = top); empty when the file has none.
  std::map<std::string, std::size_t> levels;
};

BnetDocument parse_bnet(std::string_view text);
BnetDocument load_bnet(const std::filesystem::path& path);

/// Canonical text: nodes, arcs, levels, cpts, evidence, each in node order.
/// Numbers use the shortest representation that round-trips exactly, so
/// parse(serialize(doc)) reproduces `doc` and re-serializes byte for byte.
std::string serialize_bnet(const BnetDocument& doc);

}  // namespace recognet
