#pragma once

#include <string>

#include "consctl/graph.hpp"

namespace fixtures {

using consctl::DirectedGraph;

inline DirectedGraph four_agent() {
  return DirectedGraph(4, {{0, 1, 1}, {0, 2, 1}, {1, 2, 1}, {0, 3, 1}, {1, 3, 1}, {2, 3, 1}});
}

inline DirectedGraph five_agent() {
  return DirectedGraph(5, {{0, 1, 1}, {4, 1, 1}, {1, 2, 1}, {2, 3, 1}, {2, 4, 1}, {3, 4, 1}});
}

inline DirectedGraph cycle(int n) {
  std::vector<consctl::Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
  return DirectedGraph(n, std::move(edges));
}

inline DirectedGraph complete_bidirectional(int n) {
  std::vector<consctl::Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j) edges.push_back({i, j, 1.0});
    }
  }
  return DirectedGraph(n, std::move(edges));
}

inline DirectedGraph path(int n, double w = 1.0) {
  std::vector<consctl::Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, w});
  return DirectedGraph(n, std::move(edges));
}

inline std::string data_file(const char* name) { return std::string(CONSCTL_TEST_DATA) + "/" + name; }

}  // namespace fixtures
