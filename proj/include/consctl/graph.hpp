#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace consctl {

/// Node index. Zero-based inside the library; text files, reports and the
/// CLI use one-based labels.
using NodeId = int;

/// Edge src -> dst: dst listens to src, so the weight lands in row dst,
/// column src of the adjacency matrix.
struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Weighted digraph without self-loops or parallel edges. Edges are kept
/// sorted by (src, dst), so two graphs with the same edge set compare equal.
class DirectedGraph {
 public:
  DirectedGraph() = default;
  /// Throws Error(InvalidGraph) on self-loops, duplicate pairs, out-of-range
  /// ids or non-positive / non-finite weights.
  explicit DirectedGraph(int n, std::vector<Edge> edges = {});

  int size() const noexcept { return n_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  std::optional<double> weight(NodeId src, NodeId dst) const;
  /// Copy with one existing edge reweighted.
  DirectedGraph with_weight(NodeId src, NodeId dst, double weight) const;

  const std::vector<NodeId>& in_neighbors(NodeId v) const { return in_[v]; }
  const std::vector<NodeId>& out_neighbors(NodeId v) const { return out_[v]; }

  /// Neighbor count per node (the combinatorial in-degree).
  std::vector<int> in_degree() const;
  /// Sum of incoming weights per node (the Laplacian diagonal).
  std::vector<double> weighted_in_degree() const;

  friend bool operator==(const DirectedGraph& a, const DirectedGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<NodeId>> in_;
  std::vector<std::vector<NodeId>> out_;
};

enum class Weighting { Weighted, Indicator };

/// L = D - A with D the weighted in-degree; every row sums to zero.
Eigen::MatrixXd laplacian(const DirectedGraph& g);
Eigen::MatrixXd adjacency(const DirectedGraph& g, Weighting weighting);

struct DistancePartition {
  std::vector<std::vector<NodeId>> cells;  // cells[d] = nodes at distance d
  std::vector<NodeId> unreachable;
};

DistancePartition distance_partition(const DirectedGraph& g, NodeId v);

struct Relabeling {
  std::vector<NodeId> to_new;  // to_new[old] = new label
  std::vector<NodeId> to_old;  // to_old[new] = old label
  DirectedGraph graph;         // g with nodes renamed
};

/// Root becomes node 0, then nodes in order of increasing distance, ties by
/// original index. Throws Error(UnreachableNodes) if some node is unreachable.
Relabeling bfs_relabel(const DirectedGraph& g, NodeId root);

/// Strongly connected components of g.
struct Condensation {
  std::vector<int> component_of;               // node -> component
  std::vector<std::vector<NodeId>> components;  // each sorted ascending
  std::vector<int> sources;  // components without incoming edges, ascending
                             // by smallest member
};

Condensation condense(const DirectedGraph& g);

/// Nodes from which every node is reachable.
std::vector<NodeId> spanning_tree_roots(const DirectedGraph& g);
/// Fewest trees in a spanning forest = number of source components.
int min_forest_root_count(const DirectedGraph& g);
std::vector<NodeId> reachable_set(const DirectedGraph& g,
                                  std::span<const NodeId> sources);

/// Root of a directed tree (n-1 edges, one source, everything reachable).
/// Throws Error(NotATree) otherwise.
NodeId tree_root(const DirectedGraph& t);
/// True iff neither node reaches the other. Throws Error(NotATree).
bool different_branches(const DirectedGraph& t, NodeId a, NodeId b);

bool is_in_degree_regular(const DirectedGraph& g);

}  // namespace consctl
