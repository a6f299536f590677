#pragma once

#include <cstdint>
#include <vector>

#include "ept/measure.hpp"
#include "ept/params.hpp"
#include "ept/tree.hpp"

namespace ept {

/// Balanced transportation instance on the one-node-extended tree.
/// Rows enumerate supp(mu) then the slack node s^; columns enumerate
/// supp(nu) then s^. Costs:
///   c[x][y] = b * (d_T(x,y) - lambda),  c[x][s^] = w1(x),
///   c[s^][y] = w2(y),                   c[s^][s^] = 0.
/// Supplies are mu's masses then nu(T); demands are nu's masses then mu(T),
/// so both sides total mu(T) + nu(T).
struct ExtendedProblem {
  std::vector<NodeId> mu_support;  // sorted support nodes of mu
  std::vector<NodeId> nu_support;
  std::vector<double> mu_hat;      // size mu_support.size() + 1
  std::vector<double> nu_hat;      // size nu_support.size() + 1
  std::vector<double> cost;        // row-major rows() x cols()
  double lambda = 0.0;             // multiplier the costs were built with

  std::size_t rows() const { return mu_hat.size(); }
  std::size_t cols() const { return nu_hat.size(); }
  double cost_at(std::size_t i, std::size_t j) const { return cost[i * cols() + j]; }
};

struct TransportPlan {
  struct Flow {
    std::int32_t source;  // row index into the extended problem
    std::int32_t sink;    // column index
    double mass;
  };
  std::vector<Flow> flows;  // strictly positive entries only
  double objective = 0.0;
  // Optimal dual potentials; every flow has zero reduced cost and every cell
  // has cost - row_dual - col_dual >= -certificate tolerance.
  std::vector<double> row_duals;
  std::vector<double> col_duals;
};

ExtendedProblem extend_problem(const RootedTree& t, const TreeMeasure& mu,
                               const TreeMeasure& nu, const EptParams& p);
/// Same construction with an explicit multiplier (may be negative; used by
/// the lambda calibration sweep).
ExtendedProblem extend_problem(const RootedTree& t, const TreeMeasure& mu,
                               const TreeMeasure& nu, const EptParams& p, double lambda);

/// Globally optimal plan of a balanced transportation problem, via the
/// transportation simplex. Costs may have arbitrary sign. Optimality is
/// certified by the dual potentials before returning.
TransportPlan solve_exact(const ExtendedProblem& ep);

/// Plan restricted to T x T (both endpoints real support nodes), plus the
/// transported fractions f1 = gamma_1/mu and f2 = gamma_2/nu per support
/// node, each in [0, 1].
struct RestrictedPlan {
  struct Entry {
    NodeId source;  // node of mu's support
    NodeId sink;    // node of nu's support
    double mass;
  };
  std::vector<Entry> gamma;
  std::vector<double> f1;  // aligned with ep.mu_support
  std::vector<double> f2;  // aligned with ep.nu_support
};

RestrictedPlan restrict_plan(const ExtendedProblem& ep, const TransportPlan& plan);

/// Total transported mass gamma(T x T): flow excluding every arc that
/// touches the slack node. Lies in [0, min(mu(T), nu(T))].
double plan_mass(const TransportPlan& plan, const ExtendedProblem& ep);

/// ET_lambda(mu, nu): objective of the extended problem at p.lambda.
double exact_ept(const RootedTree& t, const TreeMeasure& mu, const TreeMeasure& nu,
                 const EptParams& p);

/// One point of the Lagrangian sweep: value ET_lambda and the transported
/// mass of the optimal plan found, at an arbitrary real multiplier.
struct LagrangianPoint {
  double value = 0.0;
  double mass = 0.0;
};
LagrangianPoint evaluate_lagrangian(const RootedTree& t, const TreeMeasure& mu,
                                    const TreeMeasure& nu, const EptParams& p,
                                    double lambda);

/// Bracket for the multiplier from Theorem-style endpoint bounds:
/// lo = -(max over support pairs of w1(x) + w2(y) - b*d(x,y)) - 1,
/// hi = (max support-pair distance) + 1. Plan mass is 0 at lo and
/// min(mu(T), nu(T)) at hi.
struct LambdaBracket {
  double lo = 0.0;
  double hi = 0.0;
};
LambdaBracket lambda_bracket(const RootedTree& t, const TreeMeasure& mu,
                             const TreeMeasure& nu, const EptParams& p);

struct CalibrationResult {
  double lambda = 0.0;
  double mass_lo = 0.0;  // observed plan-mass interval around the target;
  double mass_hi = 0.0;  // a gap means the subgradient jumps across it
};

/// Bisection over lambda using the monotonicity of the optimal plan mass.
/// target_mass must lie in [0, min(mu(T), nu(T))].
CalibrationResult calibrate_lambda(const RootedTree& t, const TreeMeasure& mu,
                                   const TreeMeasure& nu, const EptParams& p_base,
                                   double target_mass, double tol = 1e-6);

/// Mass-constrained EPT value: calibrates lambda for m, then returns
/// ET_lambda + lambda * b * m.
double partial_transport_value(const RootedTree& t, const TreeMeasure& mu,
                               const TreeMeasure& nu, const EptParams& p, double m);

/// Dual candidate f(x) = root_value + sum over the root path of
/// edge_slope(v) * edge_length(v); slopes are bounded by b in modulus.
struct DualFunction {
  double root_value = 0.0;
  std::vector<double> edge_slope;  // per node, unused at the root
};

/// f evaluated at every node of the tree.
std::vector<double> evaluate_dual(const RootedTree& t, const DualFunction& f);

/// Dual objective without any feasibility check:
/// integral of f d(mu - nu) - (b*lambda/2) * (mu(T) + nu(T)).
double dual_objective(const RootedTree& t, const TreeMeasure& mu, const TreeMeasure& nu,
                      const EptParams& p, const DualFunction& f);

/// Checks feasibility for the exact dual class on the instance's supports
/// (box -w2 - b*lambda/2 <= f <= w1 + b*lambda/2 on support nodes, b-Lipschitz
/// on support pairs), then returns dual_objective. By weak duality the result
/// never exceeds exact_ept. Throws std::domain_error naming the violated
/// constraint and node pair otherwise.
double dual_value(const RootedTree& t, const TreeMeasure& mu, const TreeMeasure& nu,
                  const EptParams& p, const DualFunction& f);

}  // namespace ept
