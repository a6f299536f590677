#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace ept {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

/// Rooted tree with nonnegative edge lengths. Nodes are dense ids
/// 0..node_count()-1; each non-root node stores the length of the edge
/// to its parent. Immutable after build_tree; safe to share across threads.
struct RootedTree {
  NodeId root = 0;
  std::vector<NodeId> parent;                       // kNoNode at the root
  std::vector<double> edge_length;                  // 0 at the root
  std::vector<std::vector<NodeId>> children;
  std::vector<double> depth_to_root;                // path length from the root
  std::vector<std::int32_t> level;                  // hop count from the root
  std::vector<NodeId> post_order;                   // children before parents
  std::vector<std::vector<double>> node_embedding;  // empty when absent

  int node_count() const { return static_cast<int>(parent.size()); }
  bool has_node(NodeId v) const { return v >= 0 && v < node_count(); }

  /// L_T: the longest root-to-node path length.
  double max_root_distance() const { return max_root_distance_; }

  double max_root_distance_ = 0.0;  // set by build_tree
};

/// Validates and assembles a tree from parent links. Exactly one entry must
/// be absent (the root); edge lengths must be nonnegative and aligned with
/// parents. Throws std::invalid_argument on cycles, negative lengths,
/// multiple roots, or dangling parent ids.
RootedTree build_tree(const std::vector<std::optional<NodeId>>& parents,
                      const std::vector<double>& edge_lengths);
RootedTree build_tree(const std::vector<std::optional<NodeId>>& parents,
                      const std::vector<double>& edge_lengths,
                      std::vector<std::vector<double>> node_embedding);

NodeId lowest_common_ancestor(const RootedTree& t, NodeId x, NodeId y);

/// Path length between two nodes:
/// d(x,y) = depth(x) + depth(y) - 2*depth(lca(x,y)).
double tree_distance(const RootedTree& t, NodeId x, NodeId y);

}  // namespace ept
