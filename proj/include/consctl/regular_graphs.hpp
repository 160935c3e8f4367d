#pragma once

#include <cstdint>
#include <vector>

#include "consctl/graph.hpp"

namespace consctl {

/// Dense row-major integer matrix. Entries are walk counts, so they stay exact.
struct IntMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::int64_t> data;

  IntMatrix() = default;
  IntMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0) {}
  std::int64_t& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  std::int64_t operator()(int i, int j) const {
    return data[static_cast<std::size_t>(i) * cols + j];
  }
  friend bool operator==(const IntMatrix&, const IntMatrix&) = default;
};

// Every function below requires an in-degree regular graph with unit weights
// and throws Error(NotInDegreeRegular) or Error(UnitWeightsRequired)
// otherwise. Integer overflow throws Error(Overflow).

/// (n-1) x (n-1): entry (i, j) counts walks of length j+1 from node 0 to
/// node i+1. Requires n >= 2.
IntMatrix path_count_matrix(const DirectedGraph& g);

/// det(path_count_matrix) != 0, computed exactly. A single node is trivially
/// controllable.
bool regular_slc_by_agent1(const DirectedGraph& g);

/// S = A + A^2 + ... + A^(n-1) with A the 0/1 adjacency (row = receiver).
IntMatrix walk_sum_matrix(const DirectedGraph& g);

/// Every column of S has a zero away from the diagonal; no single leader can
/// then control the network.
bool regular_never_slc(const DirectedGraph& g);

/// Fewest columns of S whose supports, with each column also covering its own
/// index, cover every node. Throws Error(BudgetExceeded) when more than
/// `budget` column subsets would be examined.
int regular_leader_lower_bound(const DirectedGraph& g, std::uint64_t budget = 2'000'000);

/// Some column of S is nonzero everywhere off the diagonal.
bool regular_structural(const DirectedGraph& g);

}  // namespace consctl
