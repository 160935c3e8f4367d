#include <doctest.h>

#include <random>
#include <set>

#include "consctl/error.hpp"
#include "consctl/spectral.hpp"
#include "consctl/weight_adjust.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace consctl;

namespace {

DirectedGraph uniform_star() { return DirectedGraph(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}}); }

}  // namespace

TEST_CASE("rank deficiency") {
  CHECK(rank_deficiency(laplacian(fixtures::five_agent()), 0) == 1);
  CHECK(rank_deficiency(laplacian(fixtures::path(4)), 0) == 0);
  CHECK(rank_deficiency(laplacian(uniform_star()), 0) == 2);
  const NodeId root[] = {0};
  CHECK(oracle::exact_kalman_rank(uniform_star(), root) == 2);
  CHECK_THROWS_AS(rank_deficiency(laplacian(fixtures::path(4)), 4), Error);
}

TEST_CASE("dependent rows") {
  CHECK(dependent_rows(Eigen::MatrixXd::Identity(4, 4)).empty());

  const Eigen::MatrixXd L = laplacian(fixtures::five_agent());
  const Eigen::MatrixXd C = controllability_matrix(L, Eigen::VectorXd::Unit(5, 0));
  const std::vector<int> rows = dependent_rows(C);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0] >= 1);
  CHECK(rows[0] == 4);

  Eigen::MatrixXd twin(4, 4);
  twin << 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0;
  CHECK(dependent_rows(twin) == std::vector<int>{3});
  Eigen::MatrixXd early(4, 3);
  early << 1, 0, 0, 0, 1, 0, 0, 2, 0, 0, 0, 1;
  CHECK(dependent_rows(early) == std::vector<int>{2});
}

TEST_CASE("dependent rows leave a full-rank remainder") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const DirectedGraph g = oracle::random_spanning_digraph(rng, 2 + trial % 6, 0.15);
    const NodeId root = spanning_tree_roots(g).front();
    const Relabeling r = bfs_relabel(g, root);
    const Eigen::MatrixXd C = controllability_matrix(laplacian(r.graph), Eigen::VectorXd::Unit(g.size(), 0));
    const std::vector<int> rows = dependent_rows(C);
    const int rank = numerical_rank(C);
    CHECK(static_cast<int>(rows.size()) == g.size() - rank);
    CHECK(std::find(rows.begin(), rows.end(), 0) == rows.end());
    Eigen::MatrixXd kept(g.size() - rows.size(), C.cols());
    int k = 0;
    for (int i = 0; i < g.size(); ++i) {
      if (std::find(rows.begin(), rows.end(), i) == rows.end()) kept.row(k++) = C.row(i);
    }
    CHECK(numerical_rank(kept) == kept.rows());
  }
}

TEST_CASE("edge selection for a row") {
  const Eigen::MatrixXd L = laplacian(fixtures::five_agent());
  CHECK(select_edge_for_row(L, 4) == LaplacianEdge{2, 4});
  CHECK(select_edge_for_row(laplacian(fixtures::path(3)), 2) == LaplacianEdge{1, 2});
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(5, 5);
  M.row(3) << 0, -2, 0, 3, -1;
  CHECK(select_edge_for_row(M, 3) == LaplacianEdge{1, 3});
  try {
    select_edge_for_row(laplacian(fixtures::path(3)), 0);
    FAIL("expected NoOffDiagonalEntry");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoOffDiagonalEntry);
  }
}

TEST_CASE("applying a weight delta") {
  const Eigen::MatrixXd L = laplacian(fixtures::five_agent());
  const Eigen::MatrixXd adjusted = apply_delta(L, {2, 4}, 0.1);
  CHECK((adjusted - laplacian(fixtures::five_agent().with_weight(2, 4, 1.1))).norm() < 1e-15);
  CHECK(apply_delta(L, {2, 4}, 0.0) == L);
  const Eigen::MatrixXd P = apply_delta(laplacian(fixtures::path(3)), {0, 1}, 1.0);
  CHECK(P.row(1) == Eigen::RowVector3d(-2, 2, 0));
  CHECK(P.rowwise().sum().isZero());
  CHECK_THROWS_AS(apply_delta(L, {3, 0}, 0.1), Error);
  CHECK_THROWS_AS(apply_delta(L, {2, 4}, -1.0), Error);
}

TEST_CASE("five-agent adjustment plan") {
  const DirectedGraph g = fixtures::five_agent();
  const AdjustmentPlan plan = adjust_weights(g);
  CHECK(plan.root == 0);
  CHECK(plan.initial_rank == 4);
  REQUIRE(plan.adjusted_edges.size() == 1);
  CHECK(plan.adjusted_edges[0].src == 2);
  CHECK(plan.adjusted_edges[0].dst == 4);
  CHECK(plan.adjusted_edges[0].old_weight == 1.0);
  CHECK(plan.adjusted_edges[0].new_weight == doctest::Approx(1.1));
  CHECK(plan.final_rank == 5);
  CHECK(plan.converged);
  CHECK(plan.iterations == 1);
  CHECK(plan.theta_final == doctest::Approx(0.1));

  const ControllabilityVerdict v = verify_plan(g, plan);
  CHECK(v.controllable);
  CHECK(v.rank == plan.final_rank);
  const Spectrum s = eigen_decompose(laplacian(apply_plan(g, plan)));
  const Complex expected[] = {{0, 0}, {0.2493, 0}, {1.8930, 0}, {1.9788, -0.7305}, {1.9788, 0.7305}};
  REQUIRE(s.eigs.size() == 5);
  for (int k = 0; k < 5; ++k) CHECK(std::abs(s.eigs[k].lambda - expected[k]) <= 1e-3);
}

TEST_CASE("controllable graphs need no reweighting") {
  const DirectedGraph g = fixtures::path(4, 1.0).with_weight(1, 2, 2.0).with_weight(2, 3, 3.0);
  const AdjustmentPlan plan = adjust_weights(g);
  CHECK(plan.adjusted_edges.empty());
  CHECK(plan.final_rank == 4);
  CHECK(plan.converged);
  CHECK(plan.iterations == 0);
  CHECK(verify_plan(g, plan).controllable);
}

TEST_CASE("uniform star needs two edges") {
  const DirectedGraph g = uniform_star();
  const AdjustmentPlan plan = adjust_weights(g);
  CHECK(plan.initial_rank == 2);
  CHECK(plan.adjusted_edges.size() == 2);
  CHECK(plan.final_rank == 4);
  const NodeId root[] = {0};
  CHECK(oracle::exact_controllable(apply_plan(g, plan), root));

  AdjustmentPlan truncated = plan;
  truncated.adjusted_edges.pop_back();
  CHECK_FALSE(verify_plan(g, truncated).controllable);
}

TEST_CASE("adjustment errors and limits") {
  try {
    adjust_weights(DirectedGraph(3, {{0, 1, 1}}));
    FAIL("expected NoSpanningTree");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoSpanningTree);
  }
  AdjustOptions fixed_root;
  fixed_root.root = 1;
  CHECK_THROWS_AS(adjust_weights(fixtures::five_agent(), fixed_root), Error);
  AdjustOptions bad_theta;
  bad_theta.theta0 = 0.0;
  CHECK_THROWS_AS(adjust_weights(fixtures::five_agent(), bad_theta), Error);

  AdjustOptions no_iterations;
  no_iterations.max_iterations = 0;
  const AdjustmentPlan stalled = adjust_weights(fixtures::five_agent(), no_iterations);
  CHECK_FALSE(stalled.converged);
  CHECK(stalled.final_rank == 4);
  CHECK_FALSE(stalled.diagnostic.empty());

  AdjustmentPlan wrong;
  wrong.root = 0;
  wrong.adjusted_edges.push_back({3, 0, 1.0, 2.0});
  try {
    verify_plan(fixtures::five_agent(), wrong);
    FAIL("expected PlanMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PlanMismatch);
  }
}

TEST_CASE("random deltas on the deficient edge all succeed") {
  const DirectedGraph g = fixtures::five_agent();
  std::mt19937_64 rng(50);
  std::uniform_real_distribution<double> delta(0.01, 5.0);
  for (int trial = 0; trial < 50; ++trial) {
    const DirectedGraph h = g.with_weight(2, 4, 1.0 + delta(rng));
    const NodeId root[] = {0};
    CHECK(oracle::exact_kalman_rank(h, root) == 5);
  }
}

TEST_CASE("plans are minimal and verifiable on random spanning graphs") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 80; ++trial) {
    const int n = 2 + trial % 6;
    const DirectedGraph g = oracle::random_spanning_digraph(rng, n, 0.1);
    const AdjustmentPlan plan = adjust_weights(g);
    REQUIRE(plan.converged);
    std::set<std::pair<NodeId, NodeId>> distinct;
    for (const AdjustedEdge& e : plan.adjusted_edges) {
      distinct.insert({e.src, e.dst});
      CHECK(e.new_weight > e.old_weight);
      CHECK(g.weight(e.src, e.dst) == e.old_weight);
    }
    if (plan.used_fallback) {
      CHECK(static_cast<int>(distinct.size()) <= n - plan.initial_rank);
    } else {
      CHECK(static_cast<int>(distinct.size()) == n - plan.initial_rank);
    }
    CHECK(plan.final_rank == n);
    CHECK(verify_plan(g, plan).rank == plan.final_rank);
    const NodeId root[] = {plan.root};
    CHECK(oracle::exact_controllable(apply_plan(g, plan), root));
    for (const RootProbe& p : plan.probes) CHECK(p.rank <= plan.initial_rank);
  }
}

TEST_CASE("greedy search recovers when the escalated edge cannot help") {
  // Agents 2 and 6 share the single parent 3; 6 also feeds the 4-5 cycle.
  // The later twin's edge 3 -> 6 never separates them.
  const DirectedGraph g(6, {{0, 2, 1}, {0, 4, 1}, {2, 1, 1}, {2, 5, 1}, {3, 4, 1}, {4, 3, 1},
                            {5, 3, 1}});
  const NodeId root[] = {0};
  CHECK(oracle::exact_kalman_rank(g, root) == 5);
  for (double w : {0.3, 1.1, 2.5, 7.0}) {
    CHECK(oracle::exact_kalman_rank(g.with_weight(2, 5, w), root) == 5);
  }

  AdjustOptions escalation_only;
  escalation_only.fallback = false;
  escalation_only.max_iterations = 30;
  const AdjustmentPlan stalled = adjust_weights(g, escalation_only);
  CHECK_FALSE(stalled.converged);
  REQUIRE(stalled.adjusted_edges.size() == 1);
  CHECK(stalled.adjusted_edges[0].src == 2);
  CHECK(stalled.adjusted_edges[0].dst == 5);

  const AdjustmentPlan plan = adjust_weights(g);
  CHECK(plan.converged);
  CHECK(plan.used_fallback);
  REQUIRE(plan.adjusted_edges.size() == 1);
  CHECK(plan.adjusted_edges[0].src == 2);
  CHECK(plan.adjusted_edges[0].dst == 1);
  CHECK(oracle::exact_controllable(apply_plan(g, plan), root));
}

TEST_CASE("one reweighted edge can remove a deficiency of two") {
  // Root 4 feeds 1, 2 and 3; 1 also feeds 3.
  const DirectedGraph g(4, {{3, 0, 1}, {3, 1, 1}, {3, 2, 1}, {0, 2, 1}});
  const NodeId root[] = {3};
  CHECK(oracle::exact_kalman_rank(g, root) == 2);
  CHECK(oracle::exact_kalman_rank(g.with_weight(3, 0, 0.05), root) == 4);
  CHECK(oracle::exact_kalman_rank(g.with_weight(3, 0, 2.0), root) == 4);
}
