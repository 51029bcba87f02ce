#pragma once

// Independent brute-force checks used to validate the resolvent-based
// evaluators: truncated path-counting series with a certified geometric
// tail bound, exhaustive path enumeration on tiny graphs, and the
// component-factorized evaluation of pairwise generating functions.
// Correctness scaffolding, not performance code.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kmsgraph/graph.hpp"
#include "kmsgraph/kms.hpp"
#include "kmsgraph/scc.hpp"
#include "kmsgraph/spectral.hpp"

namespace kmsgraph {

struct TruncationResult {
  double value = 0.0;
  int truncation = 0;
  /// Upper bound on the omitted tail; +inf when the series diverges or no
  /// finite geometric bound is certified at this beta.
  double tail_bound = std::numeric_limits<double>::infinity();
};

/// Partial sum of Z_{w,v}(beta) up to path length N, by iterated
/// matrix-vector products. The tail bound comes from a positive vector u
/// with A_R u <= s u on the restriction R: path counts obey
/// (A_R^n)_{w,v} <= s^n u_w / u_v, giving a geometric majorant with a
/// computable constant.
inline TruncationResult truncated_Z(const Graph& g, int w, int v, double beta,
                                    int truncation) {
  detail::validate_vertex_set(g, {w, v});
  if (truncation < 0) throw std::invalid_argument("truncation must be >= 0");
  const double x = std::exp(-beta);

  TruncationResult out;
  out.truncation = truncation;

  Eigen::VectorXd column = Eigen::VectorXd::Zero(g.size());
  column(v) = 1.0;
  const Eigen::MatrixXd a = g.adjacency_real();
  double value = 0.0;
  double xn = 1.0;
  for (int n = 0;; ++n) {
    value += column(w) * xn;
    if (n == truncation) break;
    column = a * column;
    xn *= x;
  }
  out.value = value;

  const auto anc = ancestors(g, {v});
  if (!detail::set_contains(anc, w)) {
    out.tail_bound = 0.0;  // no paths at all beyond (or before) N
    return out;
  }
  const auto r = detail::set_intersect(anc, descendants(g, {w}));
  const Eigen::MatrixXd ar = adjacency_block(g, r, r).cast<double>();
  const Eigen::Index nr = ar.rows();

  // A few shifted power-iteration sweeps push s = max_i (A u)_i / u_i
  // down toward rho(A_R); any positive u gives a valid bound.
  Eigen::VectorXd u = Eigen::VectorXd::Ones(nr);
  for (int sweep = 0; sweep < 200; ++sweep) {
    Eigen::VectorXd next = ar * u + u;
    u = next / next.maxCoeff();
  }
  double s = 0.0;
  const Eigen::VectorXd au = ar * u;
  for (Eigen::Index i = 0; i < nr; ++i) s = std::max(s, au(i) / u(i));

  int w_local = -1;
  int v_local = -1;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] == w) w_local = static_cast<int>(i);
    if (r[i] == v) v_local = static_cast<int>(i);
  }
  const double q = s * x;
  if (q < 1.0) {
    const double prefactor = u(w_local) / u(v_local);
    // analytic geometric tail plus a floor for the floating-point
    // rounding of the partial sum itself
    const double rounding = static_cast<double>(truncation + 2) *
                            std::numeric_limits<double>::epsilon() *
                            (1.0 + std::abs(out.value));
    out.tail_bound =
        prefactor * std::pow(q, truncation + 1) / (1.0 - q) + rounding;
  }
  return out;
}

struct PathEnumeration {
  /// length_counts[n] = number of paths of length n from w to v.
  std::vector<std::int64_t> length_counts;
  /// Per component-crossing signature ("a->b|c->d|..."), the counts per
  /// length. The empty signature keys paths staying inside one component.
  std::map<std::string, std::vector<std::int64_t>> by_crossing;
};

/// Exhaustive weighted DFS over all paths from w to v of length at most
/// max_len, partitioned by the sequence of component-crossing edges.
/// Hard-guarded: exponential.
inline PathEnumeration enumerate_paths(const Graph& g, int w, int v, int max_len) {
  detail::validate_vertex_set(g, {w, v});
  if (g.size() > 12 || max_len > 20 || max_len < 0)
    throw std::invalid_argument(
        "path enumeration guard violated (needs <= 12 vertices, length <= 20)");

  // Work guard: bail out before a hopeless enumeration.
  {
    Eigen::VectorXd column = Eigen::VectorXd::Zero(g.size());
    column(v) = 1.0;
    double total = 0.0;
    for (int n = 0; n <= max_len; ++n) {
      total += column(w);
      column = g.adjacency_real() * column;
    }
    if (!(total <= 5e7))
      throw std::invalid_argument("path enumeration guard violated (too many paths)");
  }

  const auto d = scc(g);
  PathEnumeration out;
  out.length_counts.assign(static_cast<std::size_t>(max_len) + 1, 0);

  std::vector<std::pair<int, int>> crossings;
  auto key = [&]() {
    std::string k;
    for (const auto& [a, b] : crossings) {
      if (!k.empty()) k += '|';
      k += g.name(a) + "->" + g.name(b);
    }
    return k;
  };

  const auto& adj = g.adjacency();
  auto dfs = [&](auto&& self, int cur, int len, std::int64_t weight) -> void {
    if (cur == v) {
      out.length_counts[static_cast<std::size_t>(len)] += weight;
      auto& per = out.by_crossing[key()];
      if (per.empty()) per.assign(static_cast<std::size_t>(max_len) + 1, 0);
      per[static_cast<std::size_t>(len)] += weight;
    }
    if (len == max_len) return;
    for (int next = 0; next < g.size(); ++next) {
      const std::int64_t mult = adj(cur, next);
      if (mult == 0) continue;
      const bool crossing = d.component_of[static_cast<std::size_t>(cur)] !=
                            d.component_of[static_cast<std::size_t>(next)];
      if (crossing) crossings.emplace_back(cur, next);
      self(self, next, len + 1, weight * mult);
      if (crossing) crossings.pop_back();
    }
  };
  dfs(dfs, w, 0, 1);
  return out;
}

struct FactorizationCheck {
  double factorized = 0.0;
  double direct = 0.0;
  double abs_error = 0.0;
};

/// Evaluates Z_{w,v}(beta) as the sum over component-crossing sequences
/// of products of within-component generating functions (each factor
/// evaluated on its component restriction), and compares against the
/// direct resolvent value.
inline FactorizationCheck factorization_check(const Graph& g, int w, int v,
                                              double beta) {
  detail::validate_vertex_set(g, {w, v});
  if (g.size() > 12)
    throw std::invalid_argument("factorization check guard violated (needs <= 12 vertices)");

  FactorizationCheck out;
  out.direct = Z_pair(g, w, v, beta);  // throws when the series diverges
  const auto anc = ancestors(g, {v});
  if (!detail::set_contains(anc, w)) {
    out.factorized = 0.0;
    out.abs_error = std::abs(out.direct);
    return out;
  }

  const auto d = scc(g);
  const double x = std::exp(-beta);

  // Memoized within-component factors Z_{a,b} on E_C.
  std::map<std::pair<int, int>, double> memo;
  auto component_factor = [&](int a, int b) {
    const auto it = memo.find({a, b});
    if (it != memo.end()) return it->second;
    const auto& comp =
        d.components[static_cast<std::size_t>(d.component_of[static_cast<std::size_t>(a)])];
    const Graph sub = restriction(g, comp);
    const double z =
        Z_pair(sub, sub.index_of(g.name(a)), sub.index_of(g.name(b)), beta);
    memo.emplace(std::make_pair(a, b), z);
    return z;
  };

  const int target_component = d.component_of[static_cast<std::size_t>(v)];
  double total = 0.0;
  auto dfs = [&](auto&& self, int entry, double product) -> void {
    const int c = d.component_of[static_cast<std::size_t>(entry)];
    if (c == target_component) {
      total += product * component_factor(entry, v);
      return;
    }
    for (int a : d.components[static_cast<std::size_t>(c)]) {
      for (int b : anc) {
        const std::int64_t mult = g.adjacency()(a, b);
        if (mult == 0) continue;
        if (d.component_of[static_cast<std::size_t>(b)] == c) continue;
        self(self, b,
             product * component_factor(entry, a) * static_cast<double>(mult) * x);
      }
    }
  };
  dfs(dfs, w, 1.0);
  out.factorized = total;
  out.abs_error = std::abs(out.factorized - out.direct);
  return out;
}

}  // namespace kmsgraph
