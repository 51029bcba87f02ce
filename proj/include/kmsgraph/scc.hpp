#pragma once

// Strongly connected components (iterative Tarjan) and the two
// condensation graphs over the components that reach a chosen base
// component: the simple one and the multiplicity-annotated one, kept in a
// single structure.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "kmsgraph/detail/tarjan.hpp"
#include "kmsgraph/graph.hpp"

namespace kmsgraph {

struct SccDecomposition {
  /// Disjoint sorted vertex sets covering all vertices, ordered by their
  /// minimal vertex index.
  std::vector<std::vector<int>> components;
  /// vertex index -> position in `components`.
  std::vector<int> component_of;

  int count() const { return static_cast<int>(components.size()); }
};

inline SccDecomposition scc(const Graph& g) {
  if (g.empty()) throw std::invalid_argument("empty graph");
  const int n = g.size();
  const auto& a = g.adjacency();
  auto components =
      detail::tarjan_components(n, [&](int v, int u) { return a(v, u) > 0; });
  std::vector<int> component_of(static_cast<std::size_t>(n), -1);
  for (int c = 0; c < static_cast<int>(components.size()); ++c)
    for (int v : components[static_cast<std::size_t>(c)])
      component_of[static_cast<std::size_t>(v)] = c;
  return {std::move(components), std::move(component_of)};
}

/// Condensation restricted to the components with a path into the base
/// component. `simple` holds 0/1 edges between distinct components;
/// `multiplicity` counts the underlying graph edges realizing each of
/// them, which is what the fiber sizes over a condensation edge are.
struct CondensationGraph {
  /// Component ids (positions in SccDecomposition::components), sorted.
  std::vector<int> members;
  /// Position of the base component within `members`.
  int base_local = -1;
  Eigen::MatrixXi simple;
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> multiplicity;

  int count() const { return static_cast<int>(members.size()); }
  int base_component() const { return members.at(static_cast<std::size_t>(base_local)); }

  int local_of(int component_id) const {
    const auto it = std::lower_bound(members.begin(), members.end(), component_id);
    if (it == members.end() || *it != component_id)
      throw std::invalid_argument("component not in condensation");
    return static_cast<int>(it - members.begin());
  }

  bool contains(int component_id) const {
    return std::binary_search(members.begin(), members.end(), component_id);
  }

  /// Topological order (sources first); throws if a cycle is present.
  std::vector<int> topological_order() const {
    const int m = count();
    std::vector<int> indegree(static_cast<std::size_t>(m), 0);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (simple(i, j) != 0) ++indegree[static_cast<std::size_t>(j)];
    std::vector<int> order;
    std::vector<int> ready;
    for (int i = 0; i < m; ++i)
      if (indegree[static_cast<std::size_t>(i)] == 0) ready.push_back(i);
    while (!ready.empty()) {
      const int i = ready.back();
      ready.pop_back();
      order.push_back(i);
      for (int j = 0; j < m; ++j) {
        if (simple(i, j) == 0) continue;
        if (--indegree[static_cast<std::size_t>(j)] == 0) ready.push_back(j);
      }
    }
    if (static_cast<int>(order.size()) != m)
      throw std::runtime_error("condensation graph has a cycle");
    return order;
  }
};

inline CondensationGraph condensation(const Graph& g, const SccDecomposition& d,
                                      int base_component) {
  if (base_component < 0 || base_component >= d.count())
    throw std::invalid_argument("base is not a component of the graph");

  const int nc = d.count();
  // Component-level multiplicity counts over all components.
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> full =
      Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(nc, nc);
  for (int v = 0; v < g.size(); ++v)
    for (int u = 0; u < g.size(); ++u) {
      const std::int64_t m = g.adjacency()(v, u);
      if (m <= 0) continue;
      const int cv = d.component_of[static_cast<std::size_t>(v)];
      const int cu = d.component_of[static_cast<std::size_t>(u)];
      if (cv != cu) full(cv, cu) += m;
    }

  // Components reaching the base, by reverse BFS at component level.
  std::vector<char> keeps(static_cast<std::size_t>(nc), 0);
  std::vector<int> queue = {base_component};
  keeps[static_cast<std::size_t>(base_component)] = 1;
  while (!queue.empty()) {
    const int c = queue.back();
    queue.pop_back();
    for (int p = 0; p < nc; ++p)
      if (full(p, c) > 0 && !keeps[static_cast<std::size_t>(p)]) {
        keeps[static_cast<std::size_t>(p)] = 1;
        queue.push_back(p);
      }
  }

  CondensationGraph b;
  for (int c = 0; c < nc; ++c)
    if (keeps[static_cast<std::size_t>(c)]) b.members.push_back(c);
  const int m = b.count();
  b.base_local = b.local_of(base_component);
  b.simple = Eigen::MatrixXi::Zero(m, m);
  b.multiplicity =
      Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const std::int64_t count = full(b.members[static_cast<std::size_t>(i)],
                                      b.members[static_cast<std::size_t>(j)]);
      b.multiplicity(i, j) = count;
      b.simple(i, j) = count > 0 ? 1 : 0;
    }
  b.topological_order();  // asserts acyclicity
  return b;
}

}  // namespace kmsgraph
