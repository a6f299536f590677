#pragma once

#include <cstdint>
#include <vector>

#include "ept/measure.hpp"
#include "ept/tree.hpp"

namespace ept {

enum class TreeScheme {
  ClusteringBased,  // recursive farthest-point clustering; any dimension
  PartitionBased,   // randomly shifted spatial cells; low dimension (d <= 10)
};

struct SamplingConfig {
  TreeScheme scheme = TreeScheme::ClusteringBased;
  int depth = 6;      // deepest tree level H_T
  int branching = 4;  // clusters per split (clustering scheme)
  std::uint64_t seed = 0;
};

struct PointCloud {
  std::vector<std::vector<double>> points;

  std::size_t size() const { return points.size(); }
  int dimension() const { return points.empty() ? 0 : static_cast<int>(points[0].size()); }
};

/// Validates nonempty cloud with finite, equal-dimension coordinates.
PointCloud make_cloud(std::vector<std::vector<double>> points);

struct SampledTree {
  RootedTree tree;
  std::vector<NodeId> assignment;  // per point: its deepest containing node
};

/// Random tree metric adapted to the cloud. Internal nodes carry cluster/cell
/// representatives as embeddings; edge lengths are Euclidean distances
/// between parent and child representatives. Deterministic in (cloud, cfg).
SampledTree sample_tree(const PointCloud& cloud, const SamplingConfig& cfg);

/// Lifts per-point masses onto the sampled tree through the assignment.
TreeMeasure measure_on_sampled_tree(const std::vector<NodeId>& assignment,
                                    const std::vector<double>& masses);

struct TreeEnsemble {
  std::vector<RootedTree> trees;
  std::vector<std::vector<NodeId>> assignments;
  int n_slices = 0;
  std::size_t universe_size = 0;  // number of points the assignments map
};

std::uint64_t derive_slice_seed(std::uint64_t seed, int slice);

/// n_slices independent trees with per-slice derived seeds; reproducible.
TreeEnsemble sample_ensemble(const PointCloud& cloud, const SamplingConfig& cfg,
                             int n_slices);

}  // namespace ept
