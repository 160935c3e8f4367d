#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "consctl/graph.hpp"
#include "consctl/leader_select.hpp"
#include "consctl/tolerances.hpp"

namespace consctl {

/// n minus the controllable-subspace dimension with `leader` as the only input.
int rank_deficiency(const Eigen::MatrixXd& L, NodeId leader, const Tolerances& tol = {});

/// Rows that are linear combinations of earlier rows, found by top-down
/// Gram-Schmidt elimination. Earlier rows are always kept, so the list has
/// n - rank(C) entries and never contains row 0 when row 0 is nonzero.
/// rel_tol is relative to the largest row norm.
std::vector<int> dependent_rows(const Eigen::MatrixXd& C, double rel_tol = 1e-9);

struct LaplacianEdge {
  NodeId src = 0;  // column
  NodeId dst = 0;  // row
  friend bool operator==(const LaplacianEdge&, const LaplacianEdge&) = default;
};

/// Edge into `row` from its smallest-index neighbor: the first nonzero of
/// the row. Throws Error(NoOffDiagonalEntry) if that entry is the diagonal.
LaplacianEdge select_edge_for_row(const Eigen::MatrixXd& L, int row);

/// Raises the weight of edge src -> dst by delta: L(dst, src) -= delta,
/// L(dst, dst) += delta. Row sums stay zero.
Eigen::MatrixXd apply_delta(const Eigen::MatrixXd& L, LaplacianEdge edge, double delta);

struct AdjustOptions {
  double theta0 = 0.1;
  int max_iterations = 200;
  std::optional<NodeId> root;  // default: best spanning-tree root
  bool fallback = true;        // greedy edge search if the escalation stalls
  Tolerances tol;
};

struct AdjustedEdge {
  NodeId src = 0;  // original labels
  NodeId dst = 0;
  double old_weight = 0.0;
  double new_weight = 0.0;
};

struct RootProbe {
  NodeId root = 0;
  int rank = 0;
};

struct AdjustmentPlan {
  NodeId root = 0;
  std::vector<NodeId> relabel;  // relabel[original] = breadth-first label
  int initial_rank = 0;
  std::vector<AdjustedEdge> adjusted_edges;
  int iterations = 0;
  int final_rank = 0;
  double theta_final = 0.0;  // step used in the last iteration
  bool converged = false;
  bool used_fallback = false;
  int fallback_trials = 0;
  std::string diagnostic;
  std::vector<RootProbe> probes;  // every candidate root with its rank
};

/// Reweights the fewest edges so that a single spanning-tree root controls
/// the graph. Candidate roots are probed; a fully controllable root ends the
/// search with an empty plan, otherwise the root with the highest rank (ties
/// to the smallest id) is kept. The dependent rows i_1 < ... < i_s of the
/// breadth-first-labelled controllability matrix each get the edge from
/// their smallest-label neighbor; every iteration adds j * theta to the j-th
/// edge and scales theta by 1.1 until the rank is full.
///
/// That choice can stall: when two nodes have identical controllability rows
/// and the later one also feeds another component, reweighting its edge never
/// separates them. If max_iterations pass without full rank and
/// options.fallback is set, a greedy search restarts from the original
/// weights. Each round tries every in-edge of a not yet adjusted row with
/// steps theta0 * 1.1^t (t < min(max_iterations, 20)) and keeps the change
/// with the largest rank gain, ties to the earliest row, column and step.
/// The escalated weights are discarded. The greedy plan can use fewer edges
/// than n minus the initial rank.
///
/// Throws Error(NoSpanningTree). Hitting max_iterations returns the partial
/// plan with converged = false.
AdjustmentPlan adjust_weights(const DirectedGraph& g, const AdjustOptions& options = {});

/// g with the plan's new weights. Throws Error(PlanMismatch) if an adjusted
/// edge is absent.
DirectedGraph apply_plan(const DirectedGraph& g, const AdjustmentPlan& plan);

/// Kalman verdict of the reweighted graph with the plan's root as leader.
ControllabilityVerdict verify_plan(const DirectedGraph& g, const AdjustmentPlan& plan,
                                   const Tolerances& tol = {});

}  // namespace consctl
