#include "consctl/weight_adjust.hpp"

#include <algorithm>
#include <string>

#include "consctl/error.hpp"

namespace consctl {

namespace {

constexpr double kThetaGrowth = 1.1;
constexpr int kFallbackSteps = 20;

int single_leader_rank(const Eigen::MatrixXd& L, NodeId leader, double rel_tol) {
  const Eigen::Index n = L.rows();
  return static_cast<int>(
      controllable_basis(L, Eigen::VectorXd::Unit(n, leader), rel_tol).cols());
}

}  // namespace

int rank_deficiency(const Eigen::MatrixXd& L, NodeId leader, const Tolerances& tol) {
  if (leader < 0 || leader >= L.rows()) {
    throw Error(ErrorKind::InvalidArgument, "leader outside the matrix");
  }
  return static_cast<int>(L.rows()) - single_leader_rank(L, leader, tol.rank);
}

std::vector<int> dependent_rows(const Eigen::MatrixXd& C, double rel_tol) {
  const Eigen::Index n = C.rows();
  const int target = numerical_rank(C);
  double max_row = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) max_row = std::max(max_row, C.row(i).norm());
  const double cutoff = rel_tol * max_row;

  Eigen::MatrixXd basis(C.cols(), std::min(C.rows(), C.cols()));
  Eigen::Index kept = 0;
  std::vector<int> dependent;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd r = C.row(i).transpose();
    for (int pass = 0; pass < 2; ++pass) {
      r -= basis.leftCols(kept) * (basis.leftCols(kept).transpose() * r);
    }
    const double norm = r.norm();
    if (kept < target && norm > cutoff) {
      basis.col(kept++) = r / norm;
    } else {
      dependent.push_back(static_cast<int>(i));
    }
  }
  return dependent;
}

LaplacianEdge select_edge_for_row(const Eigen::MatrixXd& L, int row) {
  if (row < 0 || row >= L.rows()) {
    throw Error(ErrorKind::InvalidArgument, "row outside the matrix");
  }
  for (Eigen::Index j = 0; j < L.cols(); ++j) {
    if (L(row, j) == 0.0) continue;
    if (j == row) break;
    return {static_cast<NodeId>(j), row};
  }
  throw Error(ErrorKind::NoOffDiagonalEntry,
              "row " + std::to_string(row + 1) +
                  " has no neighbor with a smaller label; relabeling is broken or the node "
                  "is disconnected");
}

Eigen::MatrixXd apply_delta(const Eigen::MatrixXd& L, LaplacianEdge edge, double delta) {
  if (L(edge.dst, edge.src) == 0.0 || edge.src == edge.dst) {
    throw Error(ErrorKind::InvalidArgument, "apply_delta: no edge " +
                                                std::to_string(edge.src + 1) + " -> " +
                                                std::to_string(edge.dst + 1));
  }
  if (!(delta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be nonnegative");
  Eigen::MatrixXd out = L;
  out(edge.dst, edge.src) -= delta;
  out(edge.dst, edge.dst) += delta;
  return out;
}

AdjustmentPlan adjust_weights(const DirectedGraph& g, const AdjustOptions& options) {
  if (!(options.theta0 > 0.0)) throw Error(ErrorKind::InvalidArgument, "theta0 must be positive");
  if (options.max_iterations < 0) {
    throw Error(ErrorKind::InvalidArgument, "max_iterations must be nonnegative");
  }
  const int n = g.size();
  std::vector<NodeId> roots = spanning_tree_roots(g);
  if (roots.empty()) {
    throw Error(ErrorKind::NoSpanningTree,
                "graph has " + std::to_string(min_forest_root_count(g)) +
                    " source components; a single leader cannot reach every node");
  }
  if (options.root) {
    if (!std::binary_search(roots.begin(), roots.end(), *options.root)) {
      throw Error(ErrorKind::NoSpanningTree,
                  "node " + std::to_string(*options.root + 1) + " does not reach every node");
    }
    roots = {*options.root};
  }

  AdjustmentPlan plan;
  std::optional<Relabeling> best;
  int best_rank = -1;
  for (NodeId r : roots) {
    Relabeling rl = bfs_relabel(g, r);
    const int rank = single_leader_rank(laplacian(rl.graph), 0, options.tol.rank);
    plan.probes.push_back({r, rank});
    if (rank > best_rank) {
      best_rank = rank;
      best = std::move(rl);
      plan.root = r;
      if (rank == n) break;
    }
  }
  plan.relabel = best->to_new;
  plan.initial_rank = best_rank;
  plan.final_rank = best_rank;
  if (best_rank == n) {
    plan.converged = true;
    return plan;
  }

  const Eigen::MatrixXd L0 = laplacian(best->graph);
  Eigen::MatrixXd L = L0;
  const Eigen::MatrixXd basis =
      controllable_basis(L, Eigen::VectorXd::Unit(n, 0), options.tol.rank);
  const std::vector<int> rows = dependent_rows(basis, options.tol.rank);

  std::vector<LaplacianEdge> chosen;
  for (int row : rows) chosen.push_back(select_edge_for_row(L, row));
  std::vector<double> added(chosen.size(), 0.0);

  double theta = options.theta0;
  while (plan.final_rank < n && plan.iterations < options.max_iterations) {
    for (std::size_t j = 0; j < chosen.size(); ++j) {
      const double delta = static_cast<double>(j + 1) * theta;
      L = apply_delta(L, chosen[j], delta);
      added[j] += delta;
    }
    ++plan.iterations;
    plan.theta_final = theta;
    plan.final_rank = single_leader_rank(L, 0, options.tol.rank);
    theta *= kThetaGrowth;
  }

  if (plan.final_rank < n && options.fallback) {
    // Greedy search from the original weights: each round keeps the
    // in-edge and step with the largest rank gain, one edge per row.
    const int steps = std::min(options.max_iterations, kFallbackSteps);
    std::vector<LaplacianEdge> greedy;
    std::vector<double> greedy_added;
    std::vector<bool> used(n, false);
    Eigen::MatrixXd G = L0;
    int rank = plan.initial_rank;
    double last_delta = 0.0;
    while (rank < n) {
      int best_gain_rank = rank;
      LaplacianEdge pick;
      double pick_delta = 0.0;
      for (int row = 1; row < n && best_gain_rank < n; ++row) {
        if (used[row]) continue;
        for (int col = 0; col < n && best_gain_rank < n; ++col) {
          if (col == row || G(row, col) == 0.0) continue;
          double delta = options.theta0;
          for (int t = 0; t < steps; ++t, delta *= kThetaGrowth) {
            ++plan.fallback_trials;
            const int r = single_leader_rank(apply_delta(G, {col, row}, delta), 0, options.tol.rank);
            if (r > best_gain_rank) {
              best_gain_rank = r;
              pick = {col, row};
              pick_delta = delta;
            }
            if (r > rank) break;
          }
        }
      }
      if (best_gain_rank == rank) break;
      G = apply_delta(G, pick, pick_delta);
      rank = best_gain_rank;
      used[pick.dst] = true;
      greedy.push_back(pick);
      greedy_added.push_back(pick_delta);
      last_delta = pick_delta;
    }
    if (rank == n) {
      chosen = std::move(greedy);
      added = std::move(greedy_added);
      plan.final_rank = rank;
      plan.theta_final = last_delta;
      plan.used_fallback = true;
    }
  }

  for (std::size_t j = 0; j < chosen.size(); ++j) {
    AdjustedEdge e;
    e.src = best->to_old[chosen[j].src];
    e.dst = best->to_old[chosen[j].dst];
    e.old_weight = *g.weight(e.src, e.dst);
    e.new_weight = e.old_weight + added[j];
    plan.adjusted_edges.push_back(e);
  }
  plan.converged = plan.final_rank == n;
  if (!plan.converged) {
    plan.diagnostic = "rank " + std::to_string(plan.final_rank) + " of " + std::to_string(n) +
                      " after " + std::to_string(plan.iterations) + " iterations";
    if (options.fallback) {
      plan.diagnostic += " and " + std::to_string(plan.fallback_trials) + " fallback trials";
    }
  }
  return plan;
}

DirectedGraph apply_plan(const DirectedGraph& g, const AdjustmentPlan& plan) {
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  for (const AdjustedEdge& a : plan.adjusted_edges) {
    auto it = std::find_if(edges.begin(), edges.end(), [&](const Edge& e) {
      return e.src == a.src && e.dst == a.dst;
    });
    if (it == edges.end()) {
      throw Error(ErrorKind::PlanMismatch, "plan adjusts missing edge " +
                                               std::to_string(a.src + 1) + " -> " +
                                               std::to_string(a.dst + 1));
    }
    if (!(a.new_weight > 0.0)) {
      throw Error(ErrorKind::PlanMismatch, "plan assigns a non-positive weight");
    }
    it->weight = a.new_weight;
  }
  return DirectedGraph(g.size(), std::move(edges));
}

ControllabilityVerdict verify_plan(const DirectedGraph& g, const AdjustmentPlan& plan,
                                   const Tolerances& tol) {
  if (plan.root < 0 || plan.root >= g.size()) {
    throw Error(ErrorKind::PlanMismatch, "plan root outside the graph");
  }
  const DirectedGraph adjusted = apply_plan(g, plan);
  return kalman_verdict(laplacian(adjusted), Eigen::VectorXd::Unit(g.size(), plan.root), tol);
}

}  // namespace consctl
