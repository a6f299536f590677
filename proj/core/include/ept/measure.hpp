#pragma once

#include <utility>
#include <vector>

#include "ept/tree.hpp"

namespace ept {

/// Sparse nonnegative measure supported on tree nodes. Entries are sorted by
/// node id with no duplicates and strictly positive mass; the total is cached
/// at construction. Immutable by convention after make_measure.
struct TreeMeasure {
  std::vector<std::pair<NodeId, double>> masses;
  double total = 0.0;

  bool empty() const { return masses.empty(); }
  std::size_t support_size() const { return masses.size(); }
  double mass_at(NodeId v) const;
};

/// Sorts entries, merges duplicate nodes, drops exact zeros. Throws
/// std::invalid_argument on negative mass.
TreeMeasure make_measure(std::vector<std::pair<NodeId, double>> entries);

TreeMeasure add(const TreeMeasure& a, const TreeMeasure& b);
TreeMeasure scale(const TreeMeasure& a, double c);  // c >= 0

/// Throws if any supported node is not a node of t.
void check_measure_on_tree(const RootedTree& t, const TreeMeasure& m);

/// Per-node cumulative subtree masses: entry at v is the mass of the subtree
/// below v (v itself plus all descendants). One post-order pass, O(|V|).
std::vector<double> subtree_cumulative_masses(const RootedTree& t, const TreeMeasure& m);

/// Two node-supported measures are equal iff their cumulative subtree-mass
/// vectors agree; comparison is entrywise |a-b| <= tol * max(1, |a|, |b|).
bool measures_equal_by_subtrees(const RootedTree& t, const TreeMeasure& m1,
                                const TreeMeasure& m2, double tol = 1e-12);

}  // namespace ept
