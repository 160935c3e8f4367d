#pragma once

// Independent reference implementations for tests: exact rational linear
// algebra and random graph generators. Nothing here calls the numerical code
// under test.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "consctl/graph.hpp"

namespace oracle {

using boost::multiprecision::cpp_rational;
using consctl::DirectedGraph;
using consctl::Edge;
using consctl::NodeId;
using RMatrix = std::vector<std::vector<cpp_rational>>;

inline RMatrix exact_laplacian(const DirectedGraph& g) {
  const int n = g.size();
  RMatrix L(n, std::vector<cpp_rational>(n, 0));
  for (const Edge& e : g.edges()) {
    const cpp_rational w(e.weight);  // doubles convert exactly
    L[e.dst][e.src] -= w;
    L[e.dst][e.dst] += w;
  }
  return L;
}

inline int exact_rank(RMatrix m) {
  if (m.empty()) return 0;
  const std::size_t rows = m.size();
  const std::size_t cols = m.front().size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t p = rank;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[rank]);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      if (m[r][c] == 0) continue;
      const cpp_rational f = m[r][c] / m[rank][c];
      for (std::size_t k = c; k < cols; ++k) m[r][k] -= f * m[rank][k];
    }
    ++rank;
  }
  return static_cast<int>(rank);
}

/// Rank of (B, LB, ..., L^{n-1}B) in exact arithmetic.
inline int exact_kalman_rank(const DirectedGraph& g, std::span<const NodeId> leaders) {
  const int n = g.size();
  const RMatrix L = exact_laplacian(g);
  RMatrix C(n);
  for (NodeId leader : leaders) {
    std::vector<cpp_rational> v(n, 0);
    v[leader] = 1;
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) C[i].push_back(v[i]);
      std::vector<cpp_rational> next(n, 0);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (L[i][j] != 0) next[i] += L[i][j] * v[j];
        }
      }
      v = std::move(next);
    }
  }
  return exact_rank(std::move(C));
}

inline bool exact_controllable(const DirectedGraph& g, std::span<const NodeId> leaders) {
  return exact_kalman_rank(g, leaders) == g.size();
}

/// Every node reachable from a leader, by brute-force closure.
inline bool all_reachable(const DirectedGraph& g, std::span<const NodeId> leaders) {
  const int n = g.size();
  std::vector<char> seen(n, 0);
  for (NodeId v : leaders) seen[v] = 1;
  for (bool grew = true; grew;) {
    grew = false;
    for (const Edge& e : g.edges()) {
      if (seen[e.src] && !seen[e.dst]) seen[e.dst] = grew = 1;
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

inline double uniform_weight(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.5, 1.5)(rng);
}

inline DirectedGraph random_digraph(std::mt19937_64& rng, int n, double p, bool unit) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (NodeId s = 0; s < n; ++s) {
    for (NodeId d = 0; d < n; ++d) {
      if (s != d && coin(rng)) edges.push_back({s, d, unit ? 1.0 : uniform_weight(rng)});
    }
  }
  return DirectedGraph(n, std::move(edges));
}

inline std::vector<NodeId> random_permutation(std::mt19937_64& rng, int n) {
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

/// Random rooted tree with shuffled labels; weights drawn from `alphabet`.
inline DirectedGraph random_tree(std::mt19937_64& rng, int n, std::span<const double> alphabet,
                                 NodeId* root_out = nullptr) {
  const std::vector<NodeId> perm = random_permutation(rng, n);
  std::vector<Edge> edges;
  for (int k = 1; k < n; ++k) {
    const int parent = std::uniform_int_distribution<int>(0, k - 1)(rng);
    const double w =
        alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
    edges.push_back({perm[parent], perm[k], w});
  }
  if (root_out) *root_out = perm[0];
  return DirectedGraph(n, std::move(edges));
}

/// Random tree plus extra random edges, unit weights: always has a spanning tree.
inline DirectedGraph random_spanning_digraph(std::mt19937_64& rng, int n, double extra_p) {
  const double unit[] = {1.0};
  const DirectedGraph t = random_tree(rng, n, unit);
  std::vector<Edge> edges(t.edges().begin(), t.edges().end());
  std::bernoulli_distribution coin(extra_p);
  for (NodeId s = 0; s < n; ++s) {
    for (NodeId d = 0; d < n; ++d) {
      if (s == d || t.weight(s, d)) continue;
      if (coin(rng)) edges.push_back({s, d, 1.0});
    }
  }
  return DirectedGraph(n, std::move(edges));
}

/// Every node picks `d` distinct in-neighbors uniformly; unit weights.
inline DirectedGraph random_in_regular(std::mt19937_64& rng, int n, int d) {
  std::vector<Edge> edges;
  for (NodeId v = 0; v < n; ++v) {
    std::vector<NodeId> others;
    for (NodeId u = 0; u < n; ++u) {
      if (u != v) others.push_back(u);
    }
    std::shuffle(others.begin(), others.end(), rng);
    for (int k = 0; k < d; ++k) edges.push_back({others[k], v, 1.0});
  }
  return DirectedGraph(n, std::move(edges));
}

/// Circulant digraph: i -> i + s (mod n) for every shift s.
inline DirectedGraph circulant(int n, std::span<const int> shifts) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (int s : shifts) edges.push_back({i, (i + s) % n, 1.0});
  }
  return DirectedGraph(n, std::move(edges));
}

inline DirectedGraph relabeled(const DirectedGraph& g, std::span<const NodeId> perm) {
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) edges.push_back({perm[e.src], perm[e.dst], e.weight});
  return DirectedGraph(g.size(), std::move(edges));
}

/// Random sample of m distinct nodes, sorted.
inline std::vector<NodeId> random_subset(std::mt19937_64& rng, int n, int m) {
  std::vector<NodeId> perm = random_permutation(rng, n);
  perm.resize(m);
  std::sort(perm.begin(), perm.end());
  return perm;
}

}  // namespace oracle
