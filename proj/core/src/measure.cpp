#include "ept/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ept {

double TreeMeasure::mass_at(NodeId v) const {
  auto it = std::lower_bound(masses.begin(), masses.end(), v,
                             [](const auto& e, NodeId id) { return e.first < id; });
  return (it != masses.end() && it->first == v) ? it->second : 0.0;
}

TreeMeasure make_measure(std::vector<std::pair<NodeId, double>> entries) {
  for (const auto& [v, m] : entries) {
    if (!(m >= 0.0))
      throw std::invalid_argument("make_measure: negative mass at node " + std::to_string(v));
  }
  std::sort(entries.begin(), entries.end());
  TreeMeasure out;
  out.masses.reserve(entries.size());
  for (const auto& [v, m] : entries) {
    if (m == 0.0) continue;
    if (!out.masses.empty() && out.masses.back().first == v)
      out.masses.back().second += m;
    else
      out.masses.emplace_back(v, m);
  }
  for (const auto& [v, m] : out.masses) out.total += m;
  return out;
}

TreeMeasure add(const TreeMeasure& a, const TreeMeasure& b) {
  std::vector<std::pair<NodeId, double>> entries;
  entries.reserve(a.masses.size() + b.masses.size());
  entries.insert(entries.end(), a.masses.begin(), a.masses.end());
  entries.insert(entries.end(), b.masses.begin(), b.masses.end());
  return make_measure(std::move(entries));
}

TreeMeasure scale(const TreeMeasure& a, double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("scale: negative factor");
  std::vector<std::pair<NodeId, double>> entries;
  entries.reserve(a.masses.size());
  for (const auto& [v, m] : a.masses) entries.emplace_back(v, c * m);
  return make_measure(std::move(entries));
}

void check_measure_on_tree(const RootedTree& t, const TreeMeasure& m) {
  for (const auto& [v, mass] : m.masses) {
    if (!t.has_node(v))
      throw std::invalid_argument("measure references unknown node " + std::to_string(v));
  }
}

std::vector<double> subtree_cumulative_masses(const RootedTree& t, const TreeMeasure& m) {
  check_measure_on_tree(t, m);
  std::vector<double> cum(t.node_count(), 0.0);
  for (const auto& [v, mass] : m.masses) cum[v] += mass;
  for (const NodeId v : t.post_order) {
    if (v != t.root) cum[t.parent[v]] += cum[v];
  }
  return cum;
}

bool measures_equal_by_subtrees(const RootedTree& t, const TreeMeasure& m1,
                                const TreeMeasure& m2, double tol) {
  const std::vector<double> c1 = subtree_cumulative_masses(t, m1);
  const std::vector<double> c2 = subtree_cumulative_masses(t, m2);
  for (std::size_t v = 0; v < c1.size(); ++v) {
    const double scale = std::max({1.0, std::abs(c1[v]), std::abs(c2[v])});
    if (std::abs(c1[v] - c2[v]) > tol * scale) return false;
  }
  return true;
}

}  // namespace ept
