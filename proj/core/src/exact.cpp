#include "ept/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace ept {

namespace {

// Transportation simplex on a dense balanced instance. The basis is a
// spanning tree over row nodes 0..R-1 and column nodes R..R+C-1; duals are
// recomputed from the tree every pivot. Entering rule is Dantzig with a
// permanent switch to Bland's rule after a long degenerate streak, which
// keeps termination guaranteed on ties.
class TransportationSimplex {
 public:
  TransportationSimplex(std::size_t rows, std::size_t cols, const std::vector<double>& cost,
                        std::vector<double> supply, std::vector<double> demand)
      : R(rows), C(cols), c(cost), s(std::move(supply)), d(std::move(demand)) {
    basic.assign(R * C, 0);
    x.assign(R * C, 0.0);
    row_adj.assign(R, {});
    col_adj.assign(C, {});
    double scale = 1.0;
    for (const double v : c) scale = std::max(scale, std::abs(v));
    enter_eps = 1e-12 * scale;
    cert_eps = 1e-9 * scale;
  }

  TransportPlan solve() {
    northwest_corner();
    pivot_until_optimal();
    resolve_flows();
    return emit();
  }

 private:
  std::size_t cell(std::size_t i, std::size_t j) const { return i * C + j; }

  void add_basic(std::size_t i, std::size_t j) {
    basic[cell(i, j)] = 1;
    row_adj[i].push_back(j);
    col_adj[j].push_back(i);
  }

  void drop_basic(std::size_t i, std::size_t j) {
    basic[cell(i, j)] = 0;
    std::erase(row_adj[i], j);
    std::erase(col_adj[j], i);
  }

  void northwest_corner() {
    std::vector<double> rs = s, rd = d;
    std::size_t i = 0, j = 0;
    while (true) {
      const double q = std::min(rs[i], rd[j]);
      add_basic(i, j);
      x[cell(i, j)] = q;
      rs[i] -= q;
      rd[j] -= q;
      if (i == R - 1 && j == C - 1) break;
      if (i == R - 1)
        ++j;
      else if (j == C - 1)
        ++i;
      else if (rs[i] <= rd[j])
        ++i;
      else
        ++j;
    }
  }

  // u[i] + v[j] = c[i][j] on basic cells, anchored at u[0] = 0; the basis
  // tree is connected so one sweep reaches every node.
  void compute_duals() {
    u.assign(R, 0.0);
    v.assign(C, 0.0);
    std::vector<std::uint8_t> row_done(R, 0), col_done(C, 0);
    std::vector<std::size_t> queue;
    queue.reserve(R + C);
    queue.push_back(0);  // row 0
    row_done[0] = 1;
    std::size_t head = 0;
    while (head < queue.size()) {
      const std::size_t node = queue[head++];
      if (node < R) {
        for (const std::size_t j : row_adj[node]) {
          if (col_done[j]) continue;
          v[j] = c[cell(node, j)] - u[node];
          col_done[j] = 1;
          queue.push_back(R + j);
        }
      } else {
        const std::size_t j = node - R;
        for (const std::size_t i : col_adj[j]) {
          if (row_done[i]) continue;
          u[i] = c[cell(i, j)] - v[j];
          row_done[i] = 1;
          queue.push_back(i);
        }
      }
    }
  }

  bool find_entering(bool bland, std::size_t& ei, std::size_t& ej) const {
    double best = -enter_eps;
    bool found = false;
    for (std::size_t i = 0; i < R; ++i) {
      for (std::size_t j = 0; j < C; ++j) {
        if (basic[cell(i, j)]) continue;
        const double r = c[cell(i, j)] - u[i] - v[j];
        if (r < best) {
          best = r;
          ei = i;
          ej = j;
          found = true;
          if (bland) return true;
        }
      }
    }
    return found;
  }

  // Unique basis-tree path from row ei to column ej, returned as the list of
  // basic cells along it (ordered from the row-ei end).
  std::vector<std::pair<std::size_t, std::size_t>> basis_path(std::size_t ei,
                                                              std::size_t ej) const {
    const std::size_t n = R + C;
    std::vector<std::size_t> prev(n, n);
    std::vector<std::uint8_t> seen(n, 0);
    std::vector<std::size_t> queue;
    queue.push_back(ei);
    seen[ei] = 1;
    std::size_t head = 0;
    const std::size_t goal = R + ej;
    while (head < queue.size() && !seen[goal]) {
      const std::size_t node = queue[head++];
      if (node < R) {
        for (const std::size_t j : row_adj[node]) {
          if (seen[R + j]) continue;
          seen[R + j] = 1;
          prev[R + j] = node;
          queue.push_back(R + j);
        }
      } else {
        for (const std::size_t i : col_adj[node - R]) {
          if (seen[i]) continue;
          seen[i] = 1;
          prev[i] = node;
          queue.push_back(i);
        }
      }
    }
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t node = goal; node != ei; node = prev[node]) {
      const std::size_t p = prev[node];
      if (node < R)
        cells.emplace_back(node, p - R);
      else
        cells.emplace_back(p, node - R);
    }
    std::reverse(cells.begin(), cells.end());
    return cells;
  }

  void pivot_until_optimal() {
    constexpr std::size_t kIterationCap = 4'000'000;
    bool bland = false;
    std::size_t degenerate_streak = 0;
    for (std::size_t iter = 0;; ++iter) {
      if (iter > kIterationCap)
        throw std::runtime_error("solve_exact: pivot cap exceeded (internal error)");
      compute_duals();
      std::size_t ei = 0, ej = 0;
      if (!find_entering(bland, ei, ej)) break;

      const auto path = basis_path(ei, ej);
      // Around the cycle the entering cell gains theta; path cells at even
      // positions (sharing a row/column chain back to it) lose theta.
      double theta = std::numeric_limits<double>::infinity();
      std::size_t li = 0, lj = 0;
      bool have_leaving = false;
      for (std::size_t k = 0; k < path.size(); k += 2) {
        const auto [i, j] = path[k];
        const double f = x[cell(i, j)];
        if (f < theta ||
            (f == theta && (!have_leaving || std::tie(i, j) < std::tie(li, lj)))) {
          theta = f;
          li = i;
          lj = j;
          have_leaving = true;
        }
      }
      for (std::size_t k = 0; k < path.size(); ++k) {
        const auto [i, j] = path[k];
        if (k % 2 == 0)
          x[cell(i, j)] -= theta;
        else
          x[cell(i, j)] += theta;
      }
      x[cell(ei, ej)] = theta;
      x[cell(li, lj)] = 0.0;
      drop_basic(li, lj);
      add_basic(ei, ej);

      if (theta <= 0.0) {
        if (++degenerate_streak > 2 * (R + C) + 16) bland = true;
      } else {
        degenerate_streak = 0;
      }
    }
  }

  // Re-derive the basic flows exactly from the marginals by peeling leaves
  // of the basis tree; clears the roundoff accumulated by pivoting.
  void resolve_flows() {
    std::vector<double> rs = s, rd = d;
    std::vector<std::vector<std::size_t>> radj = row_adj, cadj = col_adj;
    std::vector<std::size_t> deg(R + C, 0);
    for (std::size_t i = 0; i < R; ++i) deg[i] = radj[i].size();
    for (std::size_t j = 0; j < C; ++j) deg[R + j] = cadj[j].size();
    std::vector<std::size_t> stack;
    for (std::size_t n = 0; n < R + C; ++n)
      if (deg[n] == 1) stack.push_back(n);
    std::fill(x.begin(), x.end(), 0.0);

    auto detach = [&](std::size_t i, std::size_t j) {
      std::erase(radj[i], j);
      std::erase(cadj[j], i);
      if (--deg[i] == 1) stack.push_back(i);
      if (--deg[R + j] == 1) stack.push_back(R + j);
    };

    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      if (deg[node] != 1) continue;  // may have dropped to 0 already
      if (node < R) {
        const std::size_t i = node, j = radj[i].front();
        const double f = rs[i];
        x[cell(i, j)] = f;
        rs[i] = 0.0;
        rd[j] -= f;
        detach(i, j);
      } else {
        const std::size_t j = node - R, i = cadj[j].front();
        const double f = rd[j];
        x[cell(i, j)] = f;
        rd[j] = 0.0;
        rs[i] -= f;
        detach(i, j);
      }
    }
  }

  TransportPlan emit() {
    compute_duals();
    TransportPlan plan;
    plan.row_duals = u;
    plan.col_duals = v;
    double objective = 0.0;
    for (std::size_t i = 0; i < R; ++i) {
      for (std::size_t j = 0; j < C; ++j) {
        const std::size_t k = cell(i, j);
        const double r = c[k] - u[i] - v[j];
        if (r < -cert_eps)
          throw std::runtime_error("solve_exact: optimality certificate failed (internal)");
        if (basic[k] && x[k] > 0.0) {
          objective += c[k] * x[k];
          plan.flows.push_back({static_cast<std::int32_t>(i), static_cast<std::int32_t>(j),
                                x[k]});
        }
      }
    }
    plan.objective = objective;
    return plan;
  }

  std::size_t R, C;
  const std::vector<double>& c;
  std::vector<double> s, d;
  std::vector<std::uint8_t> basic;
  std::vector<double> x;
  std::vector<std::vector<std::size_t>> row_adj, col_adj;
  std::vector<double> u, v;
  double enter_eps = 0.0, cert_eps = 0.0;
};

double weight_integral(const RootedTree& t, const WeightFn& w, const TreeMeasure& m) {
  double acc = 0.0;
  for (const auto& [v, mass] : m.masses) acc += w(t, v) * mass;
  return acc;
}

}  // namespace

ExtendedProblem extend_problem(const RootedTree& t, const TreeMeasure& mu,
                               const TreeMeasure& nu, const EptParams& p) {
  return extend_problem(t, mu, nu, p, p.lambda);
}

ExtendedProblem extend_problem(const RootedTree& t, const TreeMeasure& mu,
                               const TreeMeasure& nu, const EptParams& p, double lambda) {
  check_measure_on_tree(t, mu);
  check_measure_on_tree(t, nu);

  ExtendedProblem ep;
  ep.lambda = lambda;
  ep.mu_support.reserve(mu.masses.size());
  ep.nu_support.reserve(nu.masses.size());
  for (const auto& [v, m] : mu.masses) {
    ep.mu_support.push_back(v);
    ep.mu_hat.push_back(m);
  }
  for (const auto& [v, m] : nu.masses) {
    ep.nu_support.push_back(v);
    ep.nu_hat.push_back(m);
  }
  ep.mu_hat.push_back(nu.total);  // slack supply balances nu
  ep.nu_hat.push_back(mu.total);

  const std::size_t rows = ep.mu_hat.size(), cols = ep.nu_hat.size();
  ep.cost.assign(rows * cols, 0.0);
  for (std::size_t i = 0; i + 1 < rows; ++i) {
    const NodeId xi = ep.mu_support[i];
    for (std::size_t j = 0; j + 1 < cols; ++j)
      ep.cost[i * cols + j] = p.b * (tree_distance(t, xi, ep.nu_support[j]) - lambda);
    ep.cost[i * cols + (cols - 1)] = p.w1(t, xi);
  }
  for (std::size_t j = 0; j + 1 < cols; ++j)
    ep.cost[(rows - 1) * cols + j] = p.w2(t, ep.nu_support[j]);
  return ep;
}

TransportPlan solve_exact(const ExtendedProblem& ep) {
  TransportationSimplex simplex(ep.rows(), ep.cols(), ep.cost, ep.mu_hat, ep.nu_hat);
  return simplex.solve();
}

RestrictedPlan restrict_plan(const ExtendedProblem& ep, const TransportPlan& plan) {
  const std::size_t rows = ep.rows(), cols = ep.cols();
  std::vector<double> row_sum(rows, 0.0), col_sum(cols, 0.0);
  for (const auto& f : plan.flows) {
    if (f.mass < 0.0) throw std::invalid_argument("restrict_plan: negative flow");
    row_sum[f.source] += f.mass;
    col_sum[f.sink] += f.mass;
  }
  double total = 0.0;
  for (const double m : ep.mu_hat) total += m;
  const double tol = 1e-9 * std::max(1.0, total);
  for (std::size_t i = 0; i < rows; ++i)
    if (std::abs(row_sum[i] - ep.mu_hat[i]) > tol)
      throw std::invalid_argument("restrict_plan: infeasible plan (row marginal mismatch)");
  for (std::size_t j = 0; j < cols; ++j)
    if (std::abs(col_sum[j] - ep.nu_hat[j]) > tol)
      throw std::invalid_argument("restrict_plan: infeasible plan (column marginal mismatch)");

  RestrictedPlan out;
  std::vector<double> gamma1(ep.mu_support.size(), 0.0), gamma2(ep.nu_support.size(), 0.0);
  for (const auto& f : plan.flows) {
    const bool real_source = static_cast<std::size_t>(f.source) + 1 < rows;
    const bool real_sink = static_cast<std::size_t>(f.sink) + 1 < cols;
    if (real_source && real_sink) {
      out.gamma.push_back({ep.mu_support[f.source], ep.nu_support[f.sink], f.mass});
      gamma1[f.source] += f.mass;
      gamma2[f.sink] += f.mass;
    }
  }
  out.f1.resize(gamma1.size());
  out.f2.resize(gamma2.size());
  for (std::size_t i = 0; i < gamma1.size(); ++i)
    out.f1[i] = std::clamp(gamma1[i] / ep.mu_hat[i], 0.0, 1.0);
  for (std::size_t j = 0; j < gamma2.size(); ++j)
    out.f2[j] = std::clamp(gamma2[j] / ep.nu_hat[j], 0.0, 1.0);
  return out;
}

double plan_mass(const TransportPlan& plan, const ExtendedProblem& ep) {
  const std::size_t rows = ep.rows(), cols = ep.cols();
  double mass = 0.0;
  for (const auto& f : plan.flows) {
    if (static_cast<std::size_t>(f.source) + 1 < rows &&
        static_cast<std::size_t>(f.sink) + 1 < cols)
      mass += f.mass;
  }
  return mass;
}

LagrangianPoint evaluate_lagrangian(const RootedTree& t, const TreeMeasure& mu,
                                    const TreeMeasure& nu, const EptParams& p,
                                    double lambda) {
  check_measure_on_tree(t, mu);
  check_measure_on_tree(t, nu);
  if (mu.empty() && nu.empty()) return {0.0, 0.0};
  // With one side empty every unit is destroyed or created; no solve needed.
  if (mu.empty()) return {weight_integral(t, p.w2, nu), 0.0};
  if (nu.empty()) return {weight_integral(t, p.w1, mu), 0.0};

  const ExtendedProblem ep = extend_problem(t, mu, nu, p, lambda);
  const TransportPlan plan = solve_exact(ep);
  const double m_bar = std::min(mu.total, nu.total);
  return {plan.objective, std::clamp(plan_mass(plan, ep), 0.0, m_bar)};
}

double exact_ept(const RootedTree& t, const TreeMeasure& mu, const TreeMeasure& nu,
                 const EptParams& p) {
  return evaluate_lagrangian(t, mu, nu, p, p.lambda).value;
}

LambdaBracket lambda_bracket(const RootedTree& t, const TreeMeasure& mu,
                             const TreeMeasure& nu, const EptParams& p) {
  double slack_gain = 0.0;  // max of w1(x) + w2(y) - b*d(x,y)
  double max_dist = 0.0;
  for (const auto& [x, mx] : mu.masses) {
    for (const auto& [y, my] : nu.masses) {
      const double d = tree_distance(t, x, y);
      slack_gain = std::max(slack_gain, p.w1(t, x) + p.w2(t, y) - p.b * d);
      max_dist = std::max(max_dist, d);
    }
  }
  return {-slack_gain - 1.0, max_dist + 1.0};
}

CalibrationResult calibrate_lambda(const RootedTree& t, const TreeMeasure& mu,
                                   const TreeMeasure& nu, const EptParams& p_base,
                                   double target_mass, double tol) {
  const double m_bar = std::min(mu.total, nu.total);
  if (!(target_mass >= 0.0) || target_mass > m_bar)
    throw std::invalid_argument("calibrate_lambda: target mass outside [0, min(mu(T), nu(T))]");
  if (m_bar == 0.0) return {0.0, 0.0, 0.0};

  const LambdaBracket bracket = lambda_bracket(t, mu, nu, p_base);
  const auto mass_at = [&](double lambda) {
    return evaluate_lagrangian(t, mu, nu, p_base, lambda).mass;
  };

  // Theorem endpoints: mass 0 below the bracket, m_bar above it.
  if (target_mass <= tol) {
    const double m = mass_at(bracket.lo);
    return {bracket.lo, m, m};
  }
  if (target_mass >= m_bar - tol) {
    const double m = mass_at(bracket.hi);
    return {bracket.hi, m, m};
  }

  double lo = bracket.lo, hi = bracket.hi;
  double m_lo = mass_at(lo), m_hi = mass_at(hi);
  for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double m_mid = mass_at(mid);
    if (std::abs(m_mid - target_mass) <= tol) return {mid, m_mid, m_mid};
    if (m_mid < target_mass) {
      lo = mid;
      m_lo = m_mid;
    } else {
      hi = mid;
      m_hi = m_mid;
    }
  }
  return {0.5 * (lo + hi), m_lo, m_hi};
}

double partial_transport_value(const RootedTree& t, const TreeMeasure& mu,
                               const TreeMeasure& nu, const EptParams& p, double m) {
  const double m_bar = std::min(mu.total, nu.total);
  if (!(m >= 0.0) || m > m_bar)
    throw std::invalid_argument("partial_transport_value: m outside [0, min(mu(T), nu(T))]");
  if (m_bar == 0.0)
    return weight_integral(t, p.w1, mu) + weight_integral(t, p.w2, nu);

  // The Lagrangian identity W = ET_lambda + lambda*b*m needs lambda pinned to
  // the subgradient jump far tighter than the default calibration tolerance.
  const LambdaBracket bracket = lambda_bracket(t, mu, nu, p);
  const double tight = 1e-12 * std::max(1.0, bracket.hi - bracket.lo);
  const CalibrationResult cal = calibrate_lambda(t, mu, nu, p, m, tight);
  const LagrangianPoint at = evaluate_lagrangian(t, mu, nu, p, cal.lambda);
  return at.value + cal.lambda * p.b * m;
}

std::vector<double> evaluate_dual(const RootedTree& t, const DualFunction& f) {
  if (f.edge_slope.size() != static_cast<std::size_t>(t.node_count()))
    throw std::invalid_argument("evaluate_dual: slope vector size mismatch");
  std::vector<double> values(t.node_count(), 0.0);
  values[t.root] = f.root_value;
  for (auto it = t.post_order.rbegin(); it != t.post_order.rend(); ++it) {
    const NodeId v = *it;
    if (v == t.root) continue;
    values[v] = values[t.parent[v]] + f.edge_slope[v] * t.edge_length[v];
  }
  return values;
}

double dual_objective(const RootedTree& t, const TreeMeasure& mu, const TreeMeasure& nu,
                      const EptParams& p, const DualFunction& f) {
  const std::vector<double> values = evaluate_dual(t, f);
  double acc = 0.0;
  for (const auto& [v, m] : mu.masses) acc += values[v] * m;
  for (const auto& [v, m] : nu.masses) acc -= values[v] * m;
  return acc - 0.5 * p.b * p.lambda * (mu.total + nu.total);
}

double dual_value(const RootedTree& t, const TreeMeasure& mu, const TreeMeasure& nu,
                  const EptParams& p, const DualFunction& f) {
  const std::vector<double> values = evaluate_dual(t, f);
  const double half = 0.5 * p.b * p.lambda;
  const double tol = 1e-12;

  std::vector<NodeId> support;
  for (const auto& [v, m] : mu.masses) support.push_back(v);
  for (const auto& [v, m] : nu.masses) support.push_back(v);
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());

  for (const NodeId v : support) {
    const double hi = p.w1(t, v) + half, lo = -p.w2(t, v) - half;
    if (values[v] > hi + tol)
      throw std::domain_error("dual_value: f exceeds w1 + b*lambda/2 at node " +
                              std::to_string(v));
    if (values[v] < lo - tol)
      throw std::domain_error("dual_value: f below -w2 - b*lambda/2 at node " +
                              std::to_string(v));
  }
  for (std::size_t a = 0; a < support.size(); ++a) {
    for (std::size_t b2 = a + 1; b2 < support.size(); ++b2) {
      const NodeId x = support[a], y = support[b2];
      const double d = tree_distance(t, x, y);
      if (std::abs(values[x] - values[y]) > p.b * d + tol)
        throw std::domain_error("dual_value: Lipschitz bound violated on nodes " +
                                std::to_string(x) + "," + std::to_string(y));
    }
  }
  return dual_objective(t, mu, nu, p, f);
}

}  // namespace ept
