#pragma once

#include "ept/tree.hpp"

namespace ept {

/// Affine-in-root-distance weight w(x) = slope * d_T(r, x) + offset.
/// slope in [0, b] keeps w b-Lipschitz w.r.t. the tree metric; offset >= 0
/// keeps w nonnegative. Validated when an EptParams is constructed.
struct WeightFn {
  double slope = 0.0;
  double offset = 0.0;

  double at_root() const { return offset; }
  double at_depth(double root_distance) const { return slope * root_distance + offset; }
  double operator()(const RootedTree& t, NodeId v) const {
    return at_depth(t.depth_to_root[v]);
  }
};

/// Problem parameters: transport/entropy balance b > 0, Lagrange multiplier
/// lambda >= 0, regularization offset alpha with
/// 0 <= alpha <= (b*lambda + w1(r) + w2(r)) / 2.
struct EptParams {
  double b = 1.0;
  double lambda = 1.0;
  double alpha = 0.0;
  WeightFn w1;
  WeightFn w2;

  EptParams(double b, double lambda, double alpha, WeightFn w1, WeightFn w2);

  double alpha_max() const { return 0.5 * (b * lambda + w1.offset + w2.offset); }
};

/// alpha range for the metric properties of d_alpha:
/// alpha < b*lambda/2 + min{w1(r), w2(r)}.
bool alpha_in_metric_range(const EptParams& p);

}  // namespace ept
