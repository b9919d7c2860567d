#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "projgraph/graph.hpp"

namespace projgraph {

// Edge-list text format: a line holding `n`, then one `i j` line per edge
// with 0 <= i < j < n. Several graphs may follow each other in one stream; a
// single-token line starts the next graph. Blank lines and `#` comments are
// ignored.

void write_edge_list(std::ostream& out, const Graph& g);

/// Throws InvalidArgument on self-loops, out-of-range nodes, i >= j,
/// duplicates, or malformed lines.
std::vector<Graph> read_edge_lists(std::istream& in);
std::vector<Graph> read_edge_lists(const std::filesystem::path& path);

/// Exactly one graph expected.
Graph read_edge_list(std::istream& in);

}  // namespace projgraph
