#include "consctl/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <string>

#include "consctl/error.hpp"

namespace consctl {

namespace {

void require_node(const DirectedGraph& g, NodeId v, const char* what) {
  if (v < 0 || v >= g.size()) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(what) + ": node " + std::to_string(v + 1) +
                    " outside 1.." + std::to_string(g.size()));
  }
}

std::vector<char> reach_mask(const DirectedGraph& g,
                             std::span<const NodeId> sources) {
  std::vector<char> seen(g.size(), 0);
  std::vector<NodeId> stack;
  for (NodeId s : sources) {
    require_node(g, s, "reachable_set");
    if (!seen[s]) {
      seen[s] = 1;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (NodeId w : g.out_neighbors(v)) {
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

}  // namespace

DirectedGraph::DirectedGraph(int n, std::vector<Edge> edges)
    : n_(n), edges_(std::move(edges)), in_(n), out_(n) {
  if (n <= 0) {
    throw Error(ErrorKind::InvalidGraph, "node count must be positive");
  }
  for (const Edge& e : edges_) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
      throw Error(ErrorKind::InvalidGraph,
                  "edge " + std::to_string(e.src + 1) + " -> " +
                      std::to_string(e.dst + 1) + " references a node outside 1.." +
                      std::to_string(n));
    }
    if (e.src == e.dst) {
      throw Error(ErrorKind::InvalidGraph,
                  "self-loop at node " + std::to_string(e.src + 1));
    }
    if (!std::isfinite(e.weight) || e.weight <= 0.0) {
      throw Error(ErrorKind::InvalidGraph,
                  "edge " + std::to_string(e.src + 1) + " -> " +
                      std::to_string(e.dst + 1) + " needs a positive finite weight");
    }
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.src != b.src ? a.src < b.src : a.dst < b.dst;
  });
  for (std::size_t k = 1; k < edges_.size(); ++k) {
    if (edges_[k].src == edges_[k - 1].src && edges_[k].dst == edges_[k - 1].dst) {
      throw Error(ErrorKind::InvalidGraph,
                  "duplicate edge " + std::to_string(edges_[k].src + 1) + " -> " +
                      std::to_string(edges_[k].dst + 1));
    }
  }
  for (const Edge& e : edges_) {
    out_[e.src].push_back(e.dst);
    in_[e.dst].push_back(e.src);
  }
  for (auto& v : in_) std::sort(v.begin(), v.end());
}

std::optional<double> DirectedGraph::weight(NodeId src, NodeId dst) const {
  auto it = std::lower_bound(
      edges_.begin(), edges_.end(), Edge{src, dst, 0.0},
      [](const Edge& a, const Edge& b) {
        return a.src != b.src ? a.src < b.src : a.dst < b.dst;
      });
  if (it != edges_.end() && it->src == src && it->dst == dst) return it->weight;
  return std::nullopt;
}

DirectedGraph DirectedGraph::with_weight(NodeId src, NodeId dst,
                                         double weight) const {
  std::vector<Edge> edges = edges_;
  for (Edge& e : edges) {
    if (e.src == src && e.dst == dst) {
      e.weight = weight;
      return DirectedGraph(n_, std::move(edges));
    }
  }
  throw Error(ErrorKind::InvalidArgument,
              "no edge " + std::to_string(src + 1) + " -> " + std::to_string(dst + 1));
}

std::vector<int> DirectedGraph::in_degree() const {
  std::vector<int> deg(n_);
  for (NodeId v = 0; v < n_; ++v) deg[v] = static_cast<int>(in_[v].size());
  return deg;
}

std::vector<double> DirectedGraph::weighted_in_degree() const {
  std::vector<double> deg(n_, 0.0);
  for (const Edge& e : edges_) deg[e.dst] += e.weight;
  return deg;
}

Eigen::MatrixXd laplacian(const DirectedGraph& g) {
  const int n = g.size();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    L(e.dst, e.src) = -e.weight;
    L(e.dst, e.dst) += e.weight;
  }
  return L;
}

Eigen::MatrixXd adjacency(const DirectedGraph& g, Weighting weighting) {
  const int n = g.size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    A(e.dst, e.src) = weighting == Weighting::Weighted ? e.weight : 1.0;
  }
  return A;
}

DistancePartition distance_partition(const DirectedGraph& g, NodeId v) {
  require_node(g, v, "distance_partition");
  std::vector<int> dist(g.size(), -1);
  dist[v] = 0;
  DistancePartition part;
  part.cells.push_back({v});
  while (true) {
    std::vector<NodeId> next;
    for (NodeId u : part.cells.back()) {
      for (NodeId w : g.out_neighbors(u)) {
        if (dist[w] < 0) {
          dist[w] = static_cast<int>(part.cells.size());
          next.push_back(w);
        }
      }
    }
    if (next.empty()) break;
    std::sort(next.begin(), next.end());
    part.cells.push_back(std::move(next));
  }
  for (NodeId u = 0; u < g.size(); ++u) {
    if (dist[u] < 0) part.unreachable.push_back(u);
  }
  return part;
}

Relabeling bfs_relabel(const DirectedGraph& g, NodeId root) {
  DistancePartition part = distance_partition(g, root);
  if (!part.unreachable.empty()) {
    throw Error(ErrorKind::UnreachableNodes,
                std::to_string(part.unreachable.size()) +
                    " node(s) unreachable from root " + std::to_string(root + 1));
  }
  Relabeling r;
  r.to_new.assign(g.size(), -1);
  for (const auto& cell : part.cells) {
    for (NodeId v : cell) {
      r.to_new[v] = static_cast<NodeId>(r.to_old.size());
      r.to_old.push_back(v);
    }
  }
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (const Edge& e : g.edges()) {
    edges.push_back({r.to_new[e.src], r.to_new[e.dst], e.weight});
  }
  r.graph = DirectedGraph(g.size(), std::move(edges));
  return r;
}

Condensation condense(const DirectedGraph& g) {
  // Kosaraju with explicit stacks.
  const int n = g.size();
  std::vector<char> seen(n, 0);
  std::vector<NodeId> order;
  order.reserve(n);
  for (NodeId s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::pair<NodeId, std::size_t>> stack{{s, 0}};
    seen[s] = 1;
    while (!stack.empty()) {
      auto& [v, next] = stack.back();
      const auto& succ = g.out_neighbors(v);
      if (next < succ.size()) {
        NodeId w = succ[next++];
        if (!seen[w]) {
          seen[w] = 1;
          stack.emplace_back(w, 0);
        }
      } else {
        order.push_back(v);
        stack.pop_back();
      }
    }
  }

  std::vector<int> comp(n, -1);
  std::vector<std::vector<NodeId>> members;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] >= 0) continue;
    const int c = static_cast<int>(members.size());
    members.emplace_back();
    std::vector<NodeId> stack{*it};
    comp[*it] = c;
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      members[c].push_back(v);
      for (NodeId w : g.in_neighbors(v)) {
        if (comp[w] < 0) {
          comp[w] = c;
          stack.push_back(w);
        }
      }
    }
  }

  // Renumber components by smallest member for deterministic output.
  for (auto& m : members) std::sort(m.begin(), m.end());
  std::vector<int> by_min(members.size());
  for (std::size_t c = 0; c < members.size(); ++c) by_min[c] = static_cast<int>(c);
  std::sort(by_min.begin(), by_min.end(),
            [&](int a, int b) { return members[a].front() < members[b].front(); });
  std::vector<int> rename(members.size());
  Condensation out;
  out.component_of.resize(n);
  for (std::size_t k = 0; k < by_min.size(); ++k) {
    rename[by_min[k]] = static_cast<int>(k);
    out.components.push_back(std::move(members[by_min[k]]));
  }
  for (NodeId v = 0; v < n; ++v) out.component_of[v] = rename[comp[v]];

  std::vector<char> has_incoming(out.components.size(), 0);
  for (const Edge& e : g.edges()) {
    if (out.component_of[e.src] != out.component_of[e.dst]) {
      has_incoming[out.component_of[e.dst]] = 1;
    }
  }
  for (std::size_t c = 0; c < out.components.size(); ++c) {
    if (!has_incoming[c]) out.sources.push_back(static_cast<int>(c));
  }
  return out;
}

std::vector<NodeId> spanning_tree_roots(const DirectedGraph& g) {
  Condensation c = condense(g);
  if (c.sources.size() != 1) return {};
  return c.components[c.sources.front()];
}

int min_forest_root_count(const DirectedGraph& g) {
  return static_cast<int>(condense(g).sources.size());
}

std::vector<NodeId> reachable_set(const DirectedGraph& g,
                                  std::span<const NodeId> sources) {
  std::vector<char> seen = reach_mask(g, sources);
  std::vector<NodeId> out;
  for (NodeId v = 0; v < g.size(); ++v) {
    if (seen[v]) out.push_back(v);
  }
  return out;
}

NodeId tree_root(const DirectedGraph& t) {
  const int n = t.size();
  if (static_cast<int>(t.edge_count()) != n - 1) {
    throw Error(ErrorKind::NotATree, "a tree on " + std::to_string(n) +
                                         " nodes needs " + std::to_string(n - 1) +
                                         " edges, got " +
                                         std::to_string(t.edge_count()));
  }
  NodeId root = -1;
  for (NodeId v = 0; v < n; ++v) {
    if (t.in_neighbors(v).empty()) {
      if (root >= 0) throw Error(ErrorKind::NotATree, "more than one root");
      root = v;
    }
  }
  if (root < 0) throw Error(ErrorKind::NotATree, "no root (every node has a parent)");
  const NodeId src[] = {root};
  if (static_cast<int>(reachable_set(t, src).size()) != n) {
    throw Error(ErrorKind::NotATree, "not every node is reachable from the root");
  }
  return root;
}

bool different_branches(const DirectedGraph& t, NodeId a, NodeId b) {
  tree_root(t);
  require_node(t, a, "different_branches");
  require_node(t, b, "different_branches");
  if (a == b) {
    throw Error(ErrorKind::InvalidArgument, "different_branches needs two distinct nodes");
  }
  const NodeId from_a[] = {a};
  const NodeId from_b[] = {b};
  return !reach_mask(t, from_a)[b] && !reach_mask(t, from_b)[a];
}

bool is_in_degree_regular(const DirectedGraph& g) {
  std::vector<int> deg = g.in_degree();
  return std::adjacent_find(deg.begin(), deg.end(), std::not_equal_to<>()) ==
         deg.end();
}

}  // namespace consctl
