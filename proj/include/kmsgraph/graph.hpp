#pragma once

// Finite directed multigraph over string vertex identifiers, stored as a
// nonnegative integer adjacency matrix. Vertex indices follow the
// lexicographic order of the identifiers, so every downstream computation
// and report is deterministic. Parallel edges are multiplicities; they
// never carry identity.

#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kmsgraph/detail/numeric.hpp"

namespace kmsgraph {

using AdjacencyMatrix =
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

struct EdgeSpec {
  std::string source;
  std::string target;
  std::int64_t multiplicity = 1;
};

class Graph {
 public:
  Graph() = default;

  /// Vertex names must be sorted and unique; adjacency entries must be
  /// nonnegative with matching dimension.
  Graph(std::vector<std::string> names, AdjacencyMatrix adjacency)
      : names_(std::move(names)), adj_(std::move(adjacency)) {
    const auto n = static_cast<Eigen::Index>(names_.size());
    if (adj_.rows() != n || adj_.cols() != n)
      throw std::invalid_argument("adjacency dimension does not match vertex count");
    for (std::size_t i = 1; i < names_.size(); ++i)
      if (names_[i] <= names_[i - 1])
        throw std::invalid_argument("vertex names must be sorted and unique");
    if (n > 0 && adj_.minCoeff() < 0)
      throw std::invalid_argument("adjacency entries must be nonnegative");
    for (Eigen::Index i = 0; i < n; ++i)
      index_.emplace(names_[static_cast<std::size_t>(i)], static_cast<int>(i));
  }

  /// Accumulates multiplicities of repeated (source, target) pairs.
  /// `isolated` adds vertices that carry no edges.
  static Graph from_edges(std::span<const EdgeSpec> edges,
                          std::span<const std::string> isolated = {}) {
    std::map<std::string, int> seen;
    for (const auto& e : edges) {
      if (e.multiplicity < 1)
        throw std::invalid_argument("edge multiplicity must be >= 1");
      seen.emplace(e.source, 0);
      seen.emplace(e.target, 0);
    }
    for (const auto& v : isolated) seen.emplace(v, 0);
    std::vector<std::string> names;
    names.reserve(seen.size());
    for (auto& [name, idx] : seen) {
      idx = static_cast<int>(names.size());
      names.push_back(name);
    }
    const auto n = static_cast<Eigen::Index>(names.size());
    AdjacencyMatrix a = AdjacencyMatrix::Zero(n, n);
    for (const auto& e : edges)
      a(seen.at(e.source), seen.at(e.target)) += e.multiplicity;
    return Graph(std::move(names), std::move(a));
  }

  int size() const { return static_cast<int>(names_.size()); }
  bool empty() const { return names_.empty(); }
  const std::vector<std::string>& vertex_names() const { return names_; }
  const std::string& name(int i) const { return names_.at(static_cast<std::size_t>(i)); }
  const AdjacencyMatrix& adjacency() const { return adj_; }
  Eigen::MatrixXd adjacency_real() const { return adj_.cast<double>(); }

  /// Total edge count, with multiplicity.
  std::int64_t edge_count() const { return size() == 0 ? 0 : adj_.sum(); }

  int index_of(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end())
      throw std::invalid_argument("unknown vertex '" + name + "'");
    return it->second;
  }

  bool has_vertex(const std::string& name) const { return index_.count(name) > 0; }

 private:
  std::vector<std::string> names_;
  AdjacencyMatrix adj_;
  std::map<std::string, int> index_;
};

/// Restriction E_S: keeps exactly the edges with both endpoints in S.
/// S must be a sorted set of valid vertex indices.
inline Graph restriction(const Graph& g, const std::vector<int>& s) {
  if (!detail::is_sorted_unique(s))
    throw std::invalid_argument("vertex set must be sorted and unique");
  std::vector<std::string> names;
  names.reserve(s.size());
  for (int v : s) {
    if (v < 0 || v >= g.size())
      throw std::invalid_argument("vertex index out of range");
    names.push_back(g.name(v));
  }
  const auto k = static_cast<Eigen::Index>(s.size());
  AdjacencyMatrix a(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      a(i, j) = g.adjacency()(s[static_cast<std::size_t>(i)],
                              s[static_cast<std::size_t>(j)]);
  return Graph(std::move(names), std::move(a));
}

/// Rectangular block A_{S,T} of the adjacency matrix.
inline AdjacencyMatrix adjacency_block(const Graph& g, const std::vector<int>& rows,
                                       const std::vector<int>& cols) {
  AdjacencyMatrix a(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          g.adjacency()(rows[i], cols[j]);
  return a;
}

namespace detail {

inline void validate_vertex_set(const Graph& g, const std::vector<int>& d) {
  for (int v : d)
    if (v < 0 || v >= g.size())
      throw std::invalid_argument("vertex index out of range");
}

// BFS closure; `reverse` walks edges backwards (ancestors) and forwards
// otherwise (descendants). Length-0 paths count, so D is in the result.
inline std::vector<int> reach_closure(const Graph& g, const std::vector<int>& d,
                                      bool reverse) {
  validate_vertex_set(g, d);
  std::vector<char> in(static_cast<std::size_t>(g.size()), 0);
  std::deque<int> queue;
  for (int v : d) {
    if (!in[static_cast<std::size_t>(v)]) {
      in[static_cast<std::size_t>(v)] = 1;
      queue.push_back(v);
    }
  }
  const auto& a = g.adjacency();
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int u = 0; u < g.size(); ++u) {
      const std::int64_t m = reverse ? a(u, v) : a(v, u);
      if (m > 0 && !in[static_cast<std::size_t>(u)]) {
        in[static_cast<std::size_t>(u)] = 1;
        queue.push_back(u);
      }
    }
  }
  std::vector<int> out;
  for (int v = 0; v < g.size(); ++v)
    if (in[static_cast<std::size_t>(v)]) out.push_back(v);
  return out;
}

}  // namespace detail

/// All vertices with a (possibly length-0) path into D; the set S_D.
inline std::vector<int> ancestors(const Graph& g, const std::vector<int>& d) {
  return detail::reach_closure(g, d, /*reverse=*/true);
}

/// All vertices reachable from D by a (possibly length-0) path.
inline std::vector<int> descendants(const Graph& g, const std::vector<int>& d) {
  return detail::reach_closure(g, d, /*reverse=*/false);
}

}  // namespace kmsgraph
