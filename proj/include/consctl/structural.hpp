#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "consctl/graph.hpp"
#include "consctl/leader_select.hpp"
#include "consctl/tolerances.hpp"

namespace consctl {

/// Some positive weighting of g's edges makes the leaders control the
/// system, i.e. every node is reachable from a leader.
bool structurally_controllable(const DirectedGraph& g, const LeaderSet& leaders);

struct StructuralLeaders {
  int count = 0;       // number of source components
  LeaderSet witness;   // smallest node of each source component
};
StructuralLeaders min_structural_leaders(const DirectedGraph& g);

/// A directed tree driven from its root is controllable iff no two edges
/// whose child nodes sit in different branches carry the same weight.
/// Weights are compared exactly. Throws Error(NotATree) if t is not a tree
/// rooted at root.
bool tree_weight_controllable(const DirectedGraph& t, NodeId root);

/// Eigenvectors of a tree Laplacian in closed form. Nodes are relabeled
/// breadth-first from the root, so every parent precedes its children and L
/// is lower triangular. Then L P = P D with D = diag(L) and P unit lower
/// triangular:
///   p_ij = l_{i,parent(i)} * p_{parent(i),j} / (d_j - l_ii)   for i > j.
struct TreeEigenvectors {
  Relabeling relabel;
  Eigen::MatrixXd L;  // in the new labels
  Eigen::MatrixXd P;
  Eigen::MatrixXd D;
};

/// Throws Error(NotATree), or Error(RepeatedEdgeWeights) when two edges share
/// a weight (the recursion divides by d_j - l_ii).
TreeEigenvectors tree_eig_matrix(const DirectedGraph& t, NodeId root);

struct WeightWitness {
  int trial = 0;        // zero-based index of the successful draw
  DirectedGraph graph;  // g with the sampled weights
};

/// Draws edge weights i.i.d. uniform on [0.5, 1.5) from mt19937_64(seed + trial)
/// and returns the first draw that passes the Kalman test. Returns nullopt
/// without sampling when the topology is not structurally controllable.
std::optional<WeightWitness> certify_by_random_weights(const DirectedGraph& g,
                                                       const LeaderSet& leaders, int trials,
                                                       std::uint64_t seed,
                                                       const Tolerances& tol = {});

}  // namespace consctl
