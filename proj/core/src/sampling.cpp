#include "ept/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ept/rng.hpp"

namespace ept {

namespace {

double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    acc += d * d;
  }
  return std::sqrt(acc);
}

struct TreeBuilder {
  std::vector<std::optional<NodeId>> parents;
  std::vector<double> lengths;
  std::vector<std::vector<double>> reps;

  NodeId add_root(std::vector<double> rep) {
    parents.push_back(std::nullopt);
    lengths.push_back(0.0);
    reps.push_back(std::move(rep));
    return 0;
  }

  NodeId add_child(NodeId parent, std::vector<double> rep) {
    const NodeId id = static_cast<NodeId>(parents.size());
    parents.emplace_back(parent);
    lengths.push_back(euclid(reps[parent], rep));
    reps.push_back(std::move(rep));
    return id;
  }
};

bool all_points_equal(const std::vector<std::vector<double>>& pts,
                      const std::vector<std::size_t>& idx) {
  for (std::size_t k = 1; k < idx.size(); ++k)
    if (pts[idx[k]] != pts[idx[0]]) return false;
  return true;
}

// Gonzalez farthest-point clustering: seeded random first center, then
// repeatedly the point farthest from its nearest center; farthest ties break
// to the lowest point index. Stops early once every remaining point
// coincides with a center.
std::vector<std::size_t> farthest_point_centers(const std::vector<std::vector<double>>& pts,
                                                const std::vector<std::size_t>& idx,
                                                int k, Rng& rng) {
  std::vector<std::size_t> centers;
  centers.push_back(idx[rng.index(idx.size())]);
  std::vector<double> nearest(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    nearest[a] = euclid(pts[idx[a]], pts[centers[0]]);
  while (static_cast<int>(centers.size()) < k) {
    std::size_t best = 0;
    for (std::size_t a = 1; a < idx.size(); ++a)
      if (nearest[a] > nearest[best]) best = a;
    if (nearest[best] == 0.0) break;
    centers.push_back(idx[best]);
    for (std::size_t a = 0; a < idx.size(); ++a)
      nearest[a] = std::min(nearest[a], euclid(pts[idx[a]], pts[centers.back()]));
  }
  return centers;
}

void cluster_split(TreeBuilder& tb, const std::vector<std::vector<double>>& pts,
                   const std::vector<std::size_t>& idx, NodeId node, int depth,
                   const SamplingConfig& cfg, Rng& rng, std::vector<NodeId>& assignment) {
  if (depth >= cfg.depth || all_points_equal(pts, idx)) {
    for (const std::size_t i : idx) assignment[i] = node;
    return;
  }
  const std::vector<std::size_t> centers =
      farthest_point_centers(pts, idx, cfg.branching, rng);
  std::vector<std::vector<std::size_t>> buckets(centers.size());
  for (const std::size_t i : idx) {
    std::size_t best = 0;
    double best_d = euclid(pts[i], pts[centers[0]]);
    for (std::size_t c = 1; c < centers.size(); ++c) {
      const double d = euclid(pts[i], pts[centers[c]]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    buckets[best].push_back(i);
  }
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const NodeId child = tb.add_child(node, pts[centers[c]]);
    cluster_split(tb, pts, buckets[c], child, depth + 1, cfg, rng, assignment);
  }
}

SampledTree sample_clustering(const PointCloud& cloud, const SamplingConfig& cfg) {
  Rng rng(cfg.seed);
  const auto& pts = cloud.points;
  const int dim = cloud.dimension();

  std::vector<double> centroid(dim, 0.0);
  for (const auto& p : pts)
    for (int k = 0; k < dim; ++k) centroid[k] += p[k];
  for (int k = 0; k < dim; ++k) centroid[k] /= static_cast<double>(pts.size());

  TreeBuilder tb;
  const NodeId root = tb.add_root(std::move(centroid));
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<NodeId> assignment(pts.size(), kNoNode);
  cluster_split(tb, pts, idx, root, 0, cfg, rng, assignment);

  return {build_tree(tb.parents, tb.lengths, std::move(tb.reps)), std::move(assignment)};
}

void partition_split(TreeBuilder& tb, const std::vector<std::vector<double>>& pts,
                     const std::vector<std::size_t>& idx, NodeId node,
                     const std::vector<double>& origin, double side, int depth,
                     const SamplingConfig& cfg, std::vector<NodeId>& assignment) {
  if (depth >= cfg.depth || all_points_equal(pts, idx)) {
    for (const std::size_t i : idx) assignment[i] = node;
    return;
  }
  const int dim = static_cast<int>(origin.size());
  const double half = 0.5 * side;
  std::vector<std::pair<std::uint32_t, std::size_t>> keyed;
  keyed.reserve(idx.size());
  for (const std::size_t i : idx) {
    std::uint32_t mask = 0;
    for (int k = 0; k < dim; ++k)
      if (pts[i][k] - origin[k] >= half) mask |= (1u << k);
    keyed.emplace_back(mask, i);
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::size_t pos = 0;
  while (pos < keyed.size()) {
    const std::uint32_t mask = keyed[pos].first;
    std::vector<std::size_t> bucket;
    while (pos < keyed.size() && keyed[pos].first == mask) bucket.push_back(keyed[pos++].second);

    std::vector<double> sub_origin(origin);
    std::vector<double> center(dim);
    for (int k = 0; k < dim; ++k) {
      if (mask & (1u << k)) sub_origin[k] += half;
      center[k] = sub_origin[k] + 0.25 * side;
    }
    const NodeId child = tb.add_child(node, std::move(center));
    partition_split(tb, pts, bucket, child, sub_origin, half, depth + 1, cfg, assignment);
  }
}

SampledTree sample_partition(const PointCloud& cloud, const SamplingConfig& cfg) {
  const int dim = cloud.dimension();
  if (dim > 10)
    throw std::invalid_argument("sample_tree: partition scheme supports dimension <= 10, got " +
                                std::to_string(dim));
  Rng rng(cfg.seed);
  const auto& pts = cloud.points;

  std::vector<double> lo(pts[0]), hi(pts[0]);
  for (const auto& p : pts) {
    for (int k = 0; k < dim; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  }
  double extent = 0.0;
  for (int k = 0; k < dim; ++k) extent = std::max(extent, hi[k] - lo[k]);

  std::vector<NodeId> assignment(pts.size(), kNoNode);
  TreeBuilder tb;
  if (extent == 0.0) {
    const NodeId root = tb.add_root(pts[0]);
    std::fill(assignment.begin(), assignment.end(), root);
    return {build_tree(tb.parents, tb.lengths, std::move(tb.reps)), std::move(assignment)};
  }

  // Root cell of side 2*extent with a uniformly random shift; the cloud fits
  // for any shift, which randomizes the cell boundaries against quantization.
  const double side = 2.0 * extent;
  std::vector<double> origin(dim), center(dim);
  for (int k = 0; k < dim; ++k) {
    origin[k] = lo[k] - rng.uniform() * extent;
    center[k] = origin[k] + extent;
  }
  const NodeId root = tb.add_root(std::move(center));
  std::vector<std::size_t> idx(pts.size());
  std::iota(idx.begin(), idx.end(), 0);
  partition_split(tb, pts, idx, root, origin, side, 0, cfg, assignment);
  return {build_tree(tb.parents, tb.lengths, std::move(tb.reps)), std::move(assignment)};
}

}  // namespace

PointCloud make_cloud(std::vector<std::vector<double>> points) {
  if (points.empty()) throw std::invalid_argument("make_cloud: empty point cloud");
  const std::size_t dim = points[0].size();
  if (dim == 0) throw std::invalid_argument("make_cloud: zero-dimensional points");
  for (const auto& p : points) {
    if (p.size() != dim)
      throw std::invalid_argument("make_cloud: dimension mismatch among points");
    for (const double c : p)
      if (!std::isfinite(c)) throw std::invalid_argument("make_cloud: non-finite coordinate");
  }
  return {std::move(points)};
}

SampledTree sample_tree(const PointCloud& cloud, const SamplingConfig& cfg) {
  if (cloud.points.empty()) throw std::invalid_argument("sample_tree: empty point cloud");
  if (cfg.depth < 1) throw std::invalid_argument("sample_tree: depth must be >= 1");
  if (cfg.scheme == TreeScheme::ClusteringBased && cfg.branching < 2)
    throw std::invalid_argument("sample_tree: branching must be >= 2 for clustering");
  return cfg.scheme == TreeScheme::ClusteringBased ? sample_clustering(cloud, cfg)
                                                   : sample_partition(cloud, cfg);
}

TreeMeasure measure_on_sampled_tree(const std::vector<NodeId>& assignment,
                                    const std::vector<double>& masses) {
  if (assignment.size() != masses.size())
    throw std::invalid_argument("measure_on_sampled_tree: assignment/masses length mismatch");
  std::vector<std::pair<NodeId, double>> entries;
  entries.reserve(masses.size());
  for (std::size_t i = 0; i < masses.size(); ++i)
    entries.emplace_back(assignment[i], masses[i]);
  return make_measure(std::move(entries));
}

std::uint64_t derive_slice_seed(std::uint64_t seed, int slice) {
  return splitmix64(seed ^ (0xA24BAED4963EE407ULL * static_cast<std::uint64_t>(slice + 1)));
}

TreeEnsemble sample_ensemble(const PointCloud& cloud, const SamplingConfig& cfg,
                             int n_slices) {
  if (n_slices < 1) throw std::invalid_argument("sample_ensemble: n_slices must be >= 1");
  TreeEnsemble ens;
  ens.n_slices = n_slices;
  ens.universe_size = cloud.size();
  ens.trees.reserve(n_slices);
  ens.assignments.reserve(n_slices);
  for (int k = 0; k < n_slices; ++k) {
    SamplingConfig slice_cfg = cfg;
    slice_cfg.seed = derive_slice_seed(cfg.seed, k);
    SampledTree st = sample_tree(cloud, slice_cfg);
    ens.trees.push_back(std::move(st.tree));
    ens.assignments.push_back(std::move(st.assignment));
  }
  return ens;
}

}  // namespace ept
