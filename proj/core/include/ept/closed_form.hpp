#pragma once

#include "ept/measure.hpp"
#include "ept/params.hpp"
#include "ept/tree.hpp"

namespace ept {

/// Regularized entropy partial transport in closed form, one tree traversal:
///
///   sum_{v != r} len(v) * |mu(sub(v)) - nu(sub(v))|
///   - (b*lambda/2) * (mu(T) + nu(T))
///   + (w_i(r) + b*lambda/2 - alpha) * |mu(T) - nu(T)|
///
/// where sub(v) is the subtree below v and i = 1 when mu(T) >= nu(T), else 2.
double regularized_ept(const RootedTree& t, const TreeMeasure& mu, const TreeMeasure& nu,
                       const EptParams& p);

/// d_alpha(mu, nu) = regularized_ept + (b*lambda/2) * (mu(T) + nu(T)).
/// Nonnegative; zero iff mu = nu when alpha_in_metric_range(p) holds.
double d_alpha(const RootedTree& t, const TreeMeasure& mu, const TreeMeasure& nu,
               const EptParams& p);

/// |ET~^{alpha1} - ET~^{alpha2}|; equals |alpha1 - alpha2| * |mu(T) - nu(T)|
/// up to rounding. Both alphas must lie in [0, p.alpha_max()].
double alpha_lipschitz_gap(const RootedTree& t, const TreeMeasure& mu, const TreeMeasure& nu,
                           const EptParams& p, double alpha1, double alpha2);

enum class BoundCheck { UpperBoundHolds, LowerBoundHolds, BothHold, Violation };

/// Compares the closed form against an exact oracle value for the same
/// instance. The upper bound (exact <= regularized) applies at alpha = 0;
/// the lower bound (regularized <= exact) applies when
/// (4*L_T - lambda)*b <= w1(r) + w2(r) and alpha in [2*b*L_T, alpha_max()].
/// Returns the set of applicable bounds that hold, Violation if any
/// applicable bound fails, and BothHold vacuously when none applies.
BoundCheck bound_certificate(const RootedTree& t, const TreeMeasure& mu,
                             const TreeMeasure& nu, const EptParams& p,
                             double exact_value, double tol = 1e-9);

}  // namespace ept
