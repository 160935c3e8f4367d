#include "consctl/structural.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "consctl/error.hpp"

namespace consctl {

namespace {

// Uniform on [0.5, 1.5) from the top 53 bits, independent of the standard
// library's distribution implementation.
double draw_weight(std::mt19937_64& rng) {
  return 0.5 + static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void require_root(const DirectedGraph& t, NodeId root) {
  const NodeId actual = tree_root(t);
  if (actual != root) {
    throw Error(ErrorKind::NotATree, "tree is rooted at " + std::to_string(actual + 1) +
                                         ", not " + std::to_string(root + 1));
  }
}

}  // namespace

bool structurally_controllable(const DirectedGraph& g, const LeaderSet& leaders) {
  if (leaders.node_count() != g.size()) {
    throw Error(ErrorKind::InvalidArgument, "leader set built for a different node count");
  }
  return static_cast<int>(reachable_set(g, leaders.agents()).size()) == g.size();
}

StructuralLeaders min_structural_leaders(const DirectedGraph& g) {
  Condensation c = condense(g);
  std::vector<NodeId> witness;
  for (int s : c.sources) witness.push_back(c.components[s].front());
  const int count = static_cast<int>(witness.size());
  return {count, LeaderSet(std::move(witness), g.size())};
}

bool tree_weight_controllable(const DirectedGraph& t, NodeId root) {
  require_root(t, root);
  const int n = t.size();
  // reach[a][b]: a reaches b
  std::vector<std::vector<char>> reach(n);
  for (NodeId v = 0; v < n; ++v) {
    reach[v].assign(n, 0);
    const NodeId src[] = {v};
    for (NodeId w : reachable_set(t, src)) reach[v][w] = 1;
  }
  const auto edges = t.edges();
  for (std::size_t a = 0; a < edges.size(); ++a) {
    for (std::size_t b = a + 1; b < edges.size(); ++b) {
      const NodeId ca = edges[a].dst;
      const NodeId cb = edges[b].dst;
      const bool cross = !reach[ca][cb] && !reach[cb][ca];
      if (cross && edges[a].weight == edges[b].weight) return false;
    }
  }
  return true;
}

TreeEigenvectors tree_eig_matrix(const DirectedGraph& t, NodeId root) {
  require_root(t, root);
  TreeEigenvectors out;
  out.relabel = bfs_relabel(t, root);
  out.L = laplacian(out.relabel.graph);
  const int n = t.size();

  std::vector<double> weights;
  for (const Edge& e : t.edges()) weights.push_back(e.weight);
  std::sort(weights.begin(), weights.end());
  if (std::adjacent_find(weights.begin(), weights.end()) != weights.end()) {
    throw Error(ErrorKind::RepeatedEdgeWeights,
                "closed-form tree eigenvectors need pairwise distinct edge weights");
  }

  std::vector<NodeId> parent(n, -1);
  for (NodeId i = 1; i < n; ++i) parent[i] = out.relabel.graph.in_neighbors(i).front();

  out.D = out.L.diagonal().asDiagonal();
  out.P = Eigen::MatrixXd::Identity(n, n);
  for (NodeId j = 0; j < n; ++j) {
    const double lambda = out.L(j, j);
    for (NodeId i = j + 1; i < n; ++i) {
      const NodeId k = parent[i];
      out.P(i, j) = out.L(i, k) * out.P(k, j) / (lambda - out.L(i, i));
    }
  }
  return out;
}

std::optional<WeightWitness> certify_by_random_weights(const DirectedGraph& g,
                                                       const LeaderSet& leaders, int trials,
                                                       std::uint64_t seed,
                                                       const Tolerances& tol) {
  if (trials < 1) throw Error(ErrorKind::InvalidArgument, "trials must be at least 1");
  if (!structurally_controllable(g, leaders)) return std::nullopt;
  const Eigen::MatrixXd B = input_matrix(leaders, g.size());
  for (int trial = 0; trial < trials; ++trial) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(trial));
    std::vector<Edge> edges(g.edges().begin(), g.edges().end());
    for (Edge& e : edges) e.weight = draw_weight(rng);
    DirectedGraph candidate(g.size(), std::move(edges));
    if (kalman_verdict(laplacian(candidate), B, tol).controllable) {
      return WeightWitness{trial, std::move(candidate)};
    }
  }
  return std::nullopt;
}

}  // namespace consctl
