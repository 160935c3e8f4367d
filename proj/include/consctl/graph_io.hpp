#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "consctl/graph.hpp"

namespace consctl {

// Text format, one record per line, '#' starts a comment:
//
//   n <node-count>
//   <src> <dst> [weight]      one-based ids, weight defaults to 1
//
// Errors are reported as Error(Parse) with the offending line number.

DirectedGraph parse_graph(std::string_view text);
DirectedGraph read_graph_file(const std::filesystem::path& path);

/// Writes g in the text format above. Weights use the shortest decimal that
/// round-trips, so parse_graph(format_graph(g)) == g.
std::string format_graph(const DirectedGraph& g);

/// Shortest round-trip decimal for a double.
std::string format_number(double value);

}  // namespace consctl
