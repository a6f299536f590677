#include "ept/tree.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ept {

RootedTree build_tree(const std::vector<std::optional<NodeId>>& parents,
                      const std::vector<double>& edge_lengths) {
  return build_tree(parents, edge_lengths, {});
}

RootedTree build_tree(const std::vector<std::optional<NodeId>>& parents,
                      const std::vector<double>& edge_lengths,
                      std::vector<std::vector<double>> node_embedding) {
  const auto n = parents.size();
  if (n == 0) throw std::invalid_argument("build_tree: empty node list");
  if (edge_lengths.size() != n)
    throw std::invalid_argument("build_tree: parents/edge_lengths size mismatch");
  if (!node_embedding.empty() && node_embedding.size() != n)
    throw std::invalid_argument("build_tree: embedding size mismatch");

  RootedTree t;
  t.parent.resize(n);
  t.edge_length.resize(n);
  t.children.assign(n, {});
  t.node_embedding = std::move(node_embedding);

  NodeId root = kNoNode;
  for (std::size_t v = 0; v < n; ++v) {
    if (!parents[v].has_value()) {
      if (root != kNoNode)
        throw std::invalid_argument("build_tree: multiple roots (nodes " +
                                    std::to_string(root) + " and " + std::to_string(v) + ")");
      root = static_cast<NodeId>(v);
      t.parent[v] = kNoNode;
      t.edge_length[v] = 0.0;
      continue;
    }
    const NodeId p = *parents[v];
    if (p < 0 || static_cast<std::size_t>(p) >= n)
      throw std::invalid_argument("build_tree: dangling parent id " + std::to_string(p) +
                                  " at node " + std::to_string(v));
    if (static_cast<std::size_t>(p) == v)
      throw std::invalid_argument("build_tree: cycle detected (self parent at node " +
                                  std::to_string(v) + ")");
    if (!(edge_lengths[v] >= 0.0))
      throw std::invalid_argument("build_tree: negative edge length at node " +
                                  std::to_string(v));
    t.parent[v] = p;
    t.edge_length[v] = edge_lengths[v];
    t.children[p].push_back(static_cast<NodeId>(v));
  }
  if (root == kNoNode) throw std::invalid_argument("build_tree: no root");
  t.root = root;

  // Iterative DFS from the root fills depth/level and the post-order; any
  // node left unvisited sits on a cycle among the parent links.
  t.depth_to_root.assign(n, 0.0);
  t.level.assign(n, 0);
  t.post_order.reserve(n);
  std::vector<std::pair<NodeId, std::size_t>> stack;  // node, next-child index
  stack.emplace_back(root, 0);
  std::size_t visited = 1;
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    if (next < t.children[v].size()) {
      const NodeId c = t.children[v][next++];
      t.depth_to_root[c] = t.depth_to_root[v] + t.edge_length[c];
      t.level[c] = t.level[v] + 1;
      stack.emplace_back(c, 0);
      ++visited;
    } else {
      t.post_order.push_back(v);
      stack.pop_back();
    }
  }
  if (visited != n)
    throw std::invalid_argument("build_tree: cycle detected (" +
                                std::to_string(n - visited) + " nodes unreachable from root)");

  t.max_root_distance_ =
      *std::max_element(t.depth_to_root.begin(), t.depth_to_root.end());
  return t;
}

namespace {

void check_node(const RootedTree& t, NodeId v, const char* what) {
  if (!t.has_node(v))
    throw std::invalid_argument(std::string(what) + ": invalid node id " + std::to_string(v));
}

}  // namespace

NodeId lowest_common_ancestor(const RootedTree& t, NodeId x, NodeId y) {
  check_node(t, x, "lowest_common_ancestor");
  check_node(t, y, "lowest_common_ancestor");
  while (t.level[x] > t.level[y]) x = t.parent[x];
  while (t.level[y] > t.level[x]) y = t.parent[y];
  while (x != y) {
    x = t.parent[x];
    y = t.parent[y];
  }
  return x;
}

double tree_distance(const RootedTree& t, NodeId x, NodeId y) {
  const NodeId a = lowest_common_ancestor(t, x, y);
  return t.depth_to_root[x] + t.depth_to_root[y] - 2.0 * t.depth_to_root[a];
}

}  // namespace ept
