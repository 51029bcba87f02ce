#pragma once

// Limit of the type-I states at the critical inverse temperature and its
// convex decomposition over minimal critical components. The support of
// the decomposition is predicted combinatorially: a component contributes
// iff some path from it to the base component in the condensation graph
// attains the maximal number of critical components. Coefficients are
// numeric: ratios of partition functions are evaluated on a geometric
// beta grid above the critical point and extrapolated to the limit.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kmsgraph/detail/numeric.hpp"
#include "kmsgraph/graph.hpp"
#include "kmsgraph/kms.hpp"
#include "kmsgraph/pole_class.hpp"
#include "kmsgraph/scc.hpp"
#include "kmsgraph/spectral.hpp"

namespace kmsgraph {

struct PathCriticalityAnalysis {
  /// Component ids with rho(A_C) = e^{beta_v} (within tolerance).
  std::vector<int> critical;
  /// Critical components that are also minimal; the candidates crit_v.
  std::vector<int> crit_v;
  /// Component id -> maximal number of critical components over paths to
  /// the base.
  std::map<int, int> max_critical_count;
  /// Global maximum M over all condensation vertices.
  int max_count = 0;
  /// crit_v members attaining the maximum; the predicted support.
  std::vector<int> support;
};

/// Dynamic program over the reverse topological order of the condensation
/// graph: M_C = [C critical] + max over out-edges of M_{C'}, with the base
/// component contributing its own criticality.
inline PathCriticalityAnalysis analyze_paths(const CondensationGraph& b,
                                             double beta_v,
                                             const std::vector<double>& radii,
                                             double tol = 1e-9) {
  const double ebv = std::exp(beta_v);
  const int m = b.count();
  const auto order = b.topological_order();  // throws on a cycle

  std::vector<char> crit_local(static_cast<std::size_t>(m), 0);
  for (int i = 0; i < m; ++i) {
    const double rho = radii.at(static_cast<std::size_t>(
        b.members[static_cast<std::size_t>(i)]));
    crit_local[static_cast<std::size_t>(i)] =
        detail::approx_equal_rel(rho, ebv, tol) ? 1 : 0;
  }

  std::vector<int> mc(static_cast<std::size_t>(m), 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int i = *it;
    int best = 0;
    for (int j = 0; j < m; ++j)
      if (b.simple(i, j) != 0) best = std::max(best, mc[static_cast<std::size_t>(j)]);
    mc[static_cast<std::size_t>(i)] = crit_local[static_cast<std::size_t>(i)] + best;
  }

  // Reachability closure over the condensation, for minimality.
  std::vector<std::vector<char>> reach(
      static_cast<std::size_t>(m),
      std::vector<char>(static_cast<std::size_t>(m), 0));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const int i = *it;
    for (int j = 0; j < m; ++j) {
      if (b.simple(i, j) == 0) continue;
      reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
      for (int t = 0; t < m; ++t)
        if (reach[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)])
          reach[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] = 1;
    }
  }

  PathCriticalityAnalysis out;
  for (int i = 0; i < m; ++i) {
    out.max_critical_count[b.members[static_cast<std::size_t>(i)]] =
        mc[static_cast<std::size_t>(i)];
    out.max_count = std::max(out.max_count, mc[static_cast<std::size_t>(i)]);
    if (!crit_local[static_cast<std::size_t>(i)]) continue;
    out.critical.push_back(b.members[static_cast<std::size_t>(i)]);
    // Minimal among all components: no critical component strictly above
    // it (subcritical ancestors are allowed, supercritical cannot occur).
    bool minimal = true;
    for (int p = 0; p < m && minimal; ++p)
      if (p != i && crit_local[static_cast<std::size_t>(p)] &&
          reach[static_cast<std::size_t>(p)][static_cast<std::size_t>(i)])
        minimal = false;
    if (minimal) out.crit_v.push_back(b.members[static_cast<std::size_t>(i)]);
  }
  for (int c : out.crit_v)
    if (out.max_critical_count.at(c) == out.max_count) out.support.push_back(c);
  return out;
}

// ---- limit state ------------------------------------------------------------

struct LimitOptions {
  double critical_tol = 1e-9;
  double support_threshold = 1e-4;
  double eps0 = 0.5;
  int grid_depth = 30;
  double stop_tol = 1e-10;
  double max_residual = 1e-8;
  int threads = 1;
};

struct LimitDiagnostics {
  double extrapolation_residual = 0.0;
  int grid_points_used = 0;
  /// Largest raw extrapolated magnitude among entries that the
  /// combinatorics forces to zero.
  double zeroed_entry_max = 0.0;
};

namespace detail {

struct LimitContext {
  SccDecomposition sccd;
  std::vector<double> radii;
  double beta_v = 0.0;
  CondensationGraph condensation;
  PathCriticalityAnalysis analysis;
};

inline LimitContext make_limit_context(const Graph& g, int v,
                                       const LimitOptions& opt) {
  validate_vertex_set(g, {v});
  LimitContext ctx;
  ctx.sccd = scc(g);
  ctx.radii = component_radii(g, ctx.sccd);
  ctx.beta_v = critical_beta(g, v);
  if (!(ctx.beta_v > 0.0))
    throw std::invalid_argument(
        "critical inverse temperature is not positive");
  ctx.condensation =
      condensation(g, ctx.sccd, ctx.sccd.component_of[static_cast<std::size_t>(v)]);
  ctx.analysis = analyze_paths(ctx.condensation, ctx.beta_v, ctx.radii,
                               opt.critical_tol);
  return ctx;
}

inline StateVector limit_state_impl(const Graph& g, int v,
                                    const LimitOptions& opt,
                                    const LimitContext& ctx,
                                    LimitDiagnostics* diag) {
  if (opt.grid_depth < 2)
    throw std::invalid_argument("grid depth must be at least 2");
  if (!(opt.eps0 > 0.0))
    throw std::invalid_argument("eps0 must be positive");
  const auto anc = ancestors(g, {v});
  const Eigen::MatrixXd a = adjacency_block(g, anc, anc).cast<double>();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(anc.size()));
  for (std::size_t i = 0; i < anc.size(); ++i)
    if (anc[i] == v) rhs(static_cast<Eigen::Index>(i)) = 1.0;

  std::vector<double> eps(static_cast<std::size_t>(opt.grid_depth) + 1);
  std::vector<Eigen::VectorXd> ratios(eps.size());
  std::vector<char> ok(eps.size(), 0);
  detail::parallel_for(
      static_cast<int>(eps.size()), std::max(1, opt.threads), [&](int k) {
        const double e = opt.eps0 * std::ldexp(1.0, -k);
        eps[static_cast<std::size_t>(k)] = e;
        try {
          const Eigen::VectorXd x =
              resolvent_solve(a, std::exp(-(ctx.beta_v + e)), rhs);
          const double zv = x.sum();
          Eigen::VectorXd r = x / zv;
          if (r.allFinite()) {
            ratios[static_cast<std::size_t>(k)] = std::move(r);
            ok[static_cast<std::size_t>(k)] = 1;
          }
        } catch (const std::exception&) {
          // leave the grid point unusable; extrapolation stops before it
        }
      });

  std::size_t usable = 0;
  while (usable < ok.size() && ok[usable]) ++usable;
  if (usable < 3)
    throw std::runtime_error("beta grid too short for extrapolation");
  eps.resize(usable);
  ratios.resize(usable);

  const auto ext = detail::neville_limit(eps, ratios, opt.stop_tol);
  if (!(ext.residual <= opt.max_residual))
    throw std::runtime_error(
        "extrapolation residual above tolerance (" +
        std::to_string(ext.residual) + " > " +
        std::to_string(opt.max_residual) + ")");

  StateVector s;
  s.beta = ctx.beta_v;
  s.p = Eigen::VectorXd::Zero(g.size());
  s.delta = Eigen::VectorXd::Zero(g.size());
  s.supported_at_infinity = true;
  double zeroed_max = 0.0;
  for (std::size_t i = 0; i < anc.size(); ++i) {
    const int w = anc[i];
    const int c = ctx.sccd.component_of[static_cast<std::size_t>(w)];
    const double raw = ext.value(static_cast<Eigen::Index>(i));
    if (ctx.analysis.max_critical_count.at(c) < ctx.analysis.max_count) {
      zeroed_max = std::max(zeroed_max, std::abs(raw));
      continue;  // the limit vanishes; set exactly zero
    }
    s.p(w) = std::max(0.0, raw);
  }
  if (diag != nullptr) {
    diag->extrapolation_residual = ext.residual;
    diag->grid_points_used = ext.points_used;
    diag->zeroed_entry_max = zeroed_max;
  }
  return s;
}

}  // namespace detail

/// phi_v: the limit of the type-I states of v as beta decreases to
/// beta_v. Entries whose component misses the maximal critical count are
/// zero exactly; the rest are extrapolated.
inline StateVector limit_state(const Graph& g, int v, const LimitOptions& opt = {},
                               LimitDiagnostics* diag = nullptr) {
  const auto ctx = detail::make_limit_context(g, v, opt);
  return detail::limit_state_impl(g, v, opt, ctx, diag);
}

// ---- decomposition ----------------------------------------------------------

class support_mismatch_error : public std::runtime_error {
 public:
  support_mismatch_error(std::string message, std::vector<int> combinatorial,
                         std::vector<int> numeric)
      : std::runtime_error(std::move(message)),
        combinatorial_support(std::move(combinatorial)),
        numeric_support(std::move(numeric)) {}
  std::vector<int> combinatorial_support;
  std::vector<int> numeric_support;
};

struct DecompositionDiagnostics {
  double critical_tol = 0.0;
  double support_threshold = 0.0;
  double eps0 = 0.0;
  int grid_depth = 0;
  double extrapolation_stop = 0.0;
  double extrapolation_residual = 0.0;
  int grid_points_used = 0;
  double zeroed_entry_max = 0.0;
  double lambda_sum_deviation = 0.0;
  double reconstruction_residual = 0.0;
  double harmonic_residual = 0.0;
};

struct DecompositionReport {
  int vertex = -1;
  double beta_v = 0.0;
  /// Component id -> coefficient, over crit_v (sorted by id).
  std::vector<std::pair<int, double>> lambda;
  StateVector phi;
  std::vector<int> combinatorial_support;
  std::vector<int> critical_components;
  int max_critical_count = 0;
  std::map<int, int> critical_count_by_component;
  /// Component id -> harmonic vector h^C on the full vertex set.
  std::vector<std::pair<int, Eigen::VectorXd>> harmonic;
  SccDecomposition sccd;
  std::vector<double> radii;
  DecompositionDiagnostics diagnostics;
};

inline DecompositionReport decompose(const Graph& g, int v,
                                     const LimitOptions& opt = {}) {
  const auto ctx = detail::make_limit_context(g, v, opt);
  LimitDiagnostics ldiag;
  const StateVector phi = detail::limit_state_impl(g, v, opt, ctx, &ldiag);

  const auto crit = critical_components(g, ctx.sccd, ctx.radii, v, opt.critical_tol);
  if (crit.empty())
    throw std::runtime_error(
        "no critical minimal component found although beta_v > 0");
  if (crit != ctx.analysis.crit_v)
    throw std::runtime_error(
        "criticality disagreement between minimality and condensation paths");

  const double ebv = std::exp(ctx.beta_v);
  DecompositionReport rep;
  rep.vertex = v;
  rep.beta_v = ctx.beta_v;
  rep.phi = phi;
  rep.combinatorial_support = ctx.analysis.support;
  rep.critical_components = ctx.analysis.critical;
  rep.max_critical_count = ctx.analysis.max_count;
  rep.critical_count_by_component = ctx.analysis.max_critical_count;
  rep.sccd = ctx.sccd;
  rep.radii = ctx.radii;

  for (int c : crit) {
    const auto& comp = ctx.sccd.components[static_cast<std::size_t>(c)];
    const auto s_c = ancestors(g, comp);
    const auto dset = detail::set_minus(s_c, comp);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(g.size());
    for (int w : comp) h(w) = phi.p(w);
    if (!dset.empty()) {
      const Eigen::MatrixXd ad = adjacency_block(g, dset, dset).cast<double>();
      if (!detail::definitely_less(spectral_radius(ad), ebv, 1e-12))
        throw std::runtime_error(
            "singular extension block above a minimal component");
      Eigen::VectorXd hc(static_cast<Eigen::Index>(comp.size()));
      for (std::size_t i = 0; i < comp.size(); ++i)
        hc(static_cast<Eigen::Index>(i)) = phi.p(comp[i]);
      const Eigen::MatrixXd adc = adjacency_block(g, dset, comp).cast<double>();
      const Eigen::Index nd = static_cast<Eigen::Index>(dset.size());
      const Eigen::MatrixXd m = ebv * Eigen::MatrixXd::Identity(nd, nd) - ad;
      const Eigen::VectorXd hd = m.partialPivLu().solve(adc * hc);
      for (std::size_t i = 0; i < dset.size(); ++i)
        h(dset[i]) = hd(static_cast<Eigen::Index>(i));
    }
    rep.lambda.emplace_back(c, h.sum());
    rep.harmonic.emplace_back(c, std::move(h));
  }

  std::vector<int> numeric_support;
  double lambda_sum = 0.0;
  for (const auto& [c, value] : rep.lambda) {
    lambda_sum += value;
    if (value > opt.support_threshold) numeric_support.push_back(c);
  }
  if (numeric_support != rep.combinatorial_support) {
    std::string msg = "support mismatch: combinatorial {";
    for (int c : rep.combinatorial_support) msg += " " + std::to_string(c);
    msg += " } vs numeric {";
    for (int c : numeric_support) msg += " " + std::to_string(c);
    msg += " }";
    throw support_mismatch_error(msg, rep.combinatorial_support, numeric_support);
  }

  // Reconstruction from the extremal component states.
  Eigen::VectorXd rec = Eigen::VectorXd::Zero(g.size());
  for (const auto& [c, value] : rep.lambda) {
    if (value == 0.0) continue;
    const StateVector psi = component_state(
        g, ctx.sccd.components[static_cast<std::size_t>(c)], opt.critical_tol);
    rec += value * psi.p;
  }

  rep.diagnostics.critical_tol = opt.critical_tol;
  rep.diagnostics.support_threshold = opt.support_threshold;
  rep.diagnostics.eps0 = opt.eps0;
  rep.diagnostics.grid_depth = opt.grid_depth;
  rep.diagnostics.extrapolation_stop = opt.stop_tol;
  rep.diagnostics.extrapolation_residual = ldiag.extrapolation_residual;
  rep.diagnostics.grid_points_used = ldiag.grid_points_used;
  rep.diagnostics.zeroed_entry_max = ldiag.zeroed_entry_max;
  rep.diagnostics.lambda_sum_deviation = std::abs(lambda_sum - 1.0);
  rep.diagnostics.reconstruction_residual =
      (phi.p - rec).cwiseAbs().maxCoeff();
  rep.diagnostics.harmonic_residual =
      (g.adjacency_real() * phi.p - ebv * phi.p).cwiseAbs().maxCoeff();
  return rep;
}

// ---- combinatorial pole classes ----------------------------------------------

/// Class of Z_{w,v}: a pole of order M_{C(w)} at x_v = e^{-beta_v}, the
/// bounded class when no critical component lies on any path, and no
/// class at all (nullopt) when there is no path from w to v.
inline std::optional<PoleClass> pair_pole_class(const Graph& g, int w, int v,
                                                double tol = 1e-9) {
  detail::validate_vertex_set(g, {w, v});
  const auto anc = ancestors(g, {v});
  if (!detail::set_contains(anc, w)) return std::nullopt;
  const double bv = critical_beta(g, v);
  if (std::isinf(bv)) return PoleClass::unit();
  const auto d = scc(g);
  const auto radii = component_radii(g, d);
  const auto b = condensation(g, d, d.component_of[static_cast<std::size_t>(v)]);
  const auto analysis = analyze_paths(b, bv, radii, tol);
  const int mc =
      analysis.max_critical_count.at(d.component_of[static_cast<std::size_t>(w)]);
  if (mc == 0) return PoleClass::unit();
  return PoleClass(std::exp(-bv), mc);
}

/// Class of Z_v: a pole of order M at x_v.
inline PoleClass vertex_pole_class(const Graph& g, int v, double tol = 1e-9) {
  detail::validate_vertex_set(g, {v});
  const double bv = critical_beta(g, v);
  if (std::isinf(bv)) return PoleClass::unit();
  const auto d = scc(g);
  const auto radii = component_radii(g, d);
  const auto b = condensation(g, d, d.component_of[static_cast<std::size_t>(v)]);
  const auto analysis = analyze_paths(b, bv, radii, tol);
  if (analysis.max_count == 0) return PoleClass::unit();
  return PoleClass(std::exp(-bv), analysis.max_count);
}

}  // namespace kmsgraph
