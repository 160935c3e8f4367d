#include <doctest.h>

#include <random>

#include "consctl/error.hpp"
#include "consctl/leader_select.hpp"
#include "consctl/regular_graphs.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace consctl;

namespace {

IntMatrix int_matrix(int rows, int cols, std::initializer_list<std::int64_t> values) {
  IntMatrix m(rows, cols);
  std::copy(values.begin(), values.end(), m.data.begin());
  return m;
}

DirectedGraph two_cycles(int count) {
  std::vector<Edge> edges;
  for (int c = 0; c < count; ++c) {
    edges.push_back({2 * c, 2 * c + 1, 1.0});
    edges.push_back({2 * c + 1, 2 * c, 1.0});
  }
  return DirectedGraph(2 * count, std::move(edges));
}

// Walk counts by explicit enumeration of walks.
std::int64_t count_walks(const DirectedGraph& g, NodeId from, NodeId to, int length) {
  if (length == 0) return from == to ? 1 : 0;
  std::int64_t total = 0;
  for (NodeId next : g.out_neighbors(from)) total += count_walks(g, next, to, length - 1);
  return total;
}

}  // namespace

TEST_CASE("path count matrices") {
  CHECK(path_count_matrix(fixtures::cycle(3)) == int_matrix(2, 2, {1, 0, 0, 1}));
  CHECK(path_count_matrix(fixtures::complete_bidirectional(3)) == int_matrix(2, 2, {1, 1, 1, 1}));
  CHECK(path_count_matrix(fixtures::cycle(2)) == int_matrix(1, 1, {1}));
  CHECK_THROWS_AS(path_count_matrix(DirectedGraph(1)), Error);
}

TEST_CASE("path counts equal enumerated walks") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 5;
    const DirectedGraph g = oracle::random_in_regular(rng, n, 1 + trial % (n - 1));
    const IntMatrix M = path_count_matrix(g);
    for (int i = 0; i < n - 1; ++i) {
      for (int j = 0; j < n - 1; ++j) {
        CHECK(M(i, j) == count_walks(g, 0, i + 1, j + 1));
        CHECK(M(i, j) >= 0);
      }
    }
  }
}

TEST_CASE("single leader at agent 1") {
  CHECK(regular_slc_by_agent1(fixtures::cycle(3)));
  CHECK_FALSE(regular_slc_by_agent1(fixtures::complete_bidirectional(3)));
  CHECK(regular_slc_by_agent1(fixtures::cycle(2)));
  CHECK(regular_slc_by_agent1(DirectedGraph(1)));
  const NodeId one[] = {0};
  CHECK(oracle::exact_kalman_rank(fixtures::complete_bidirectional(3), one) == 2);
}

TEST_CASE("regular operations reject unsuitable graphs") {
  try {
    regular_slc_by_agent1(fixtures::five_agent());
    FAIL("expected NotInDegreeRegular");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotInDegreeRegular);
  }
  try {
    regular_structural(fixtures::cycle(3).with_weight(0, 1, 2.0));
    FAIL("expected UnitWeightsRequired");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnitWeightsRequired);
  }
  CHECK_THROWS_AS(regular_never_slc(fixtures::five_agent()), Error);
  CHECK_THROWS_AS(regular_leader_lower_bound(fixtures::five_agent()), Error);
}

TEST_CASE("never single-leader controllable") {
  CHECK(regular_never_slc(two_cycles(2)));
  CHECK_FALSE(regular_never_slc(fixtures::cycle(3)));
  CHECK_FALSE(regular_never_slc(fixtures::complete_bidirectional(3)));
}

TEST_CASE("leader lower bound") {
  CHECK(regular_leader_lower_bound(two_cycles(2)) == 2);
  CHECK(regular_leader_lower_bound(fixtures::cycle(3)) == 1);
  CHECK(regular_leader_lower_bound(two_cycles(4)) == 4);
  try {
    regular_leader_lower_bound(two_cycles(4), 5);
    FAIL("expected BudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BudgetExceeded);
  }
}

TEST_CASE("structural test for regular graphs") {
  CHECK(regular_structural(fixtures::cycle(3)));
  CHECK_FALSE(regular_structural(two_cycles(2)));
  CHECK(regular_structural(fixtures::cycle(2)));
}

TEST_CASE("regular shortcuts agree with general algorithms") {
  std::mt19937_64 rng(66);
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 2 + trial % 5;
    const DirectedGraph g = oracle::random_in_regular(rng, n, 1 + trial % (n - 1));
    const NodeId one[] = {0};
    CHECK(regular_slc_by_agent1(g) == oracle::exact_controllable(g, one));
    CHECK(regular_structural(g) == (min_forest_root_count(g) == 1));
    if (regular_never_slc(g)) {
      const Eigen::MatrixXd L = laplacian(g);
      CHECK(slc_candidates(L, eigen_decompose(L)).empty());
    }
    CHECK(regular_leader_lower_bound(g) >= min_forest_root_count(g));
  }
}

TEST_CASE("walk counts overflow is detected") {
  CHECK_THROWS_AS(walk_sum_matrix(fixtures::complete_bidirectional(40)), Error);
}
