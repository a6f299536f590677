#pragma once

#include <cstddef>
#include <vector>

#include "ept/params.hpp"
#include "ept/sampling.hpp"

namespace ept {

/// Which per-slice statistic the tree-sliced average uses.
enum class SliceStat { DAlpha, RegularizedEpt };

/// Arithmetic mean over the ensemble's slices of d_alpha (or the regularized
/// EPT) between the two lifted measures. Mass vectors index the ensemble's
/// point universe and must be nonnegative.
double sliced_distance(const TreeEnsemble& ens, const std::vector<double>& point_masses_a,
                       const std::vector<double>& point_masses_b, const EptParams& p,
                       SliceStat which);

/// t = 1 / q_s with q_s the nearest-rank s-th percentile of the sample;
/// s is a percent in {10, 20, 50}. Errors when the selected quantile is not
/// positive (too many zero distances for this s).
double quantile_bandwidth(std::vector<double> distances, int s_percent);

struct GramMatrix {
  std::vector<double> values;  // row-major n x n, exactly symmetric
  std::size_t n = 0;
  double bandwidth_t = 0.0;
  double min_eigenvalue = 0.0;

  double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

/// All pairwise sliced distances, row-major n x n (zero diagonal for DAlpha).
/// Evaluations parallelize over the upper triangle; the matrix is mirrored
/// afterwards so symmetry is exact.
std::vector<double> sliced_distance_matrix(const TreeEnsemble& ens,
                                           const std::vector<std::vector<double>>& mass_vectors,
                                           const EptParams& p, SliceStat which);

/// values[i][j] = exp(-t * distance(i, j)) (+ diag_shift on the diagonal);
/// min_eigenvalue from a dense symmetric eigensolver.
GramMatrix gram_from_distances(const std::vector<double>& distances, std::size_t n,
                               double t, double diag_shift = 0.0);

GramMatrix gram_matrix(const TreeEnsemble& ens,
                       const std::vector<std::vector<double>>& mass_vectors,
                       const EptParams& p, double t, SliceStat which,
                       double diag_shift = 0.0);

/// True iff the matrix is positive semidefinite within tol (min eigenvalue
/// >= -tol, recomputed). Throws on a non-symmetric matrix.
bool psd_check(const GramMatrix& g, double tol);

}  // namespace ept
