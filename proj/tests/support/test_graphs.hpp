#pragma once

// Shared test helpers: fixture loading, deterministic random multigraphs,
// and an independent strongly-connected-components oracle based on the
// boolean transitive closure.

#include <random>
#include <string>
#include <vector>

#include "kmsgraph/graph.hpp"
#include "kmsgraph/io.hpp"

namespace kmstest {

inline std::string fixture_path(const std::string& name) {
  return std::string(KMSGRAPH_FIXTURE_DIR) + "/" + name;
}

inline kmsgraph::Graph load_fixture(const std::string& name) {
  return kmsgraph::parse_graph_file(fixture_path(name));
}

/// Random multigraph on up to max_vertices vertices with edge
/// multiplicities up to max_multiplicity. Names are v00, v01, ...
inline kmsgraph::Graph random_graph(std::mt19937& rng, int max_vertices = 10,
                                    int max_multiplicity = 3,
                                    double edge_probability = 0.28,
                                    double loop_probability = 0.45) {
  std::uniform_int_distribution<int> size_dist(2, max_vertices);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> mult_dist(1, max_multiplicity);
  const int n = size_dist(rng);

  std::vector<std::string> names;
  for (int i = 0; i < n; ++i)
    names.push_back("v" + std::string(i < 10 ? "0" : "") + std::to_string(i));

  std::vector<kmsgraph::EdgeSpec> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double p = i == j ? loop_probability : edge_probability;
      if (coin(rng) < p)
        edges.push_back({names[static_cast<std::size_t>(i)],
                         names[static_cast<std::size_t>(j)],
                         mult_dist(rng)});
    }
  return kmsgraph::Graph::from_edges(edges, names);
}

/// Mutual-reachability partition from the boolean transitive closure;
/// components ordered by minimal vertex, mirroring scc()'s contract.
inline std::vector<std::vector<int>> closure_components(const kmsgraph::Graph& g) {
  const int n = g.size();
  std::vector<std::vector<char>> reach(
      static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
  for (int i = 0; i < n; ++i) {
    reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
    for (int j = 0; j < n; ++j)
      if (g.adjacency()(i, j) > 0) reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) continue;
        for (int k = 0; k < n; ++k)
          if (reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] &&
              reach[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)]) {
            reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
            changed = true;
            break;
          }
      }
  }
  std::vector<std::vector<int>> components;
  std::vector<char> assigned(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    if (assigned[static_cast<std::size_t>(i)]) continue;
    std::vector<int> comp;
    for (int j = 0; j < n; ++j)
      if (reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] &&
          reach[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]) {
        comp.push_back(j);
        assigned[static_cast<std::size_t>(j)] = 1;
      }
    components.push_back(comp);
  }
  return components;
}

}  // namespace kmstest
