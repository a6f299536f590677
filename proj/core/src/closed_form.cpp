#include "ept/closed_form.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ept {

namespace {

double closed_form_at_alpha(const RootedTree& t, const TreeMeasure& mu,
                            const TreeMeasure& nu, const EptParams& p, double alpha) {
  check_measure_on_tree(t, mu);
  check_measure_on_tree(t, nu);

  // Signed cumulative subtree mass of (mu - nu), accumulated bottom-up.
  std::vector<double> diff(t.node_count(), 0.0);
  for (const auto& [v, m] : mu.masses) diff[v] += m;
  for (const auto& [v, m] : nu.masses) diff[v] -= m;

  double edge_term = 0.0;
  for (const NodeId v : t.post_order) {
    if (v == t.root) continue;
    diff[t.parent[v]] += diff[v];
    edge_term += t.edge_length[v] * std::abs(diff[v]);
  }

  const double mass_sum = mu.total + nu.total;
  const double mass_gap = mu.total - nu.total;
  const double wr = (mass_gap >= 0.0) ? p.w1.at_root() : p.w2.at_root();
  return edge_term - 0.5 * p.b * p.lambda * mass_sum +
         (wr + 0.5 * p.b * p.lambda - alpha) * std::abs(mass_gap);
}

}  // namespace

double regularized_ept(const RootedTree& t, const TreeMeasure& mu, const TreeMeasure& nu,
                       const EptParams& p) {
  return closed_form_at_alpha(t, mu, nu, p, p.alpha);
}

double d_alpha(const RootedTree& t, const TreeMeasure& mu, const TreeMeasure& nu,
               const EptParams& p) {
  return regularized_ept(t, mu, nu, p) + 0.5 * p.b * p.lambda * (mu.total + nu.total);
}

double alpha_lipschitz_gap(const RootedTree& t, const TreeMeasure& mu, const TreeMeasure& nu,
                           const EptParams& p, double alpha1, double alpha2) {
  const double hi = p.alpha_max();
  for (const double a : {alpha1, alpha2}) {
    if (!(a >= 0.0) || a > hi + 1e-15 * std::max(1.0, hi))
      throw std::invalid_argument("alpha_lipschitz_gap: alpha out of range");
  }
  return std::abs(closed_form_at_alpha(t, mu, nu, p, alpha1) -
                  closed_form_at_alpha(t, mu, nu, p, alpha2));
}

BoundCheck bound_certificate(const RootedTree& t, const TreeMeasure& mu,
                             const TreeMeasure& nu, const EptParams& p,
                             double exact_value, double tol) {
  const double regularized = regularized_ept(t, mu, nu, p);
  const double lt = t.max_root_distance();

  const bool upper_applies = p.alpha == 0.0;
  const bool lower_applies =
      (4.0 * lt - p.lambda) * p.b <= p.w1.at_root() + p.w2.at_root() &&
      p.alpha >= 2.0 * p.b * lt && p.alpha <= p.alpha_max();

  const bool upper_ok = exact_value <= regularized + tol;
  const bool lower_ok = regularized <= exact_value + tol;

  if (upper_applies && lower_applies)
    return (upper_ok && lower_ok) ? BoundCheck::BothHold : BoundCheck::Violation;
  if (upper_applies) return upper_ok ? BoundCheck::UpperBoundHolds : BoundCheck::Violation;
  if (lower_applies) return lower_ok ? BoundCheck::LowerBoundHolds : BoundCheck::Violation;
  return BoundCheck::BothHold;  // nothing applicable, nothing violated
}

}  // namespace ept
