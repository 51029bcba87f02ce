#pragma once

// Partition functions and equilibrium-state vectors of the Toeplitz
// algebra of a finite graph. Everything is expressed through restricted
// resolvents: the generating function of paths from w to v equals the
// (w, v) entry of (I - e^{-beta} A_R)^{-1} on the ancestor/descendant
// restriction R, which exists exactly when the series converges. The
// critical inverse temperature of a vertex is read off combinatorially
// from component spectral radii, never probed numerically.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kmsgraph/detail/numeric.hpp"
#include "kmsgraph/graph.hpp"
#include "kmsgraph/scc.hpp"
#include "kmsgraph/spectral.hpp"

namespace kmsgraph {

struct HarmonicVector {
  double beta = 0.0;
  /// Vertex-indexed nonnegative values with A_E h = e^beta h.
  Eigen::VectorXd values;
};

struct StateVector {
  double beta = 0.0;
  Eigen::VectorXd p;
  Eigen::VectorXd delta;
  bool supported_at_infinity = false;
};

struct ComponentTemperature {
  int id = -1;  // position in SccDecomposition::components
  std::vector<int> component;
  double rho = 0.0;
  /// log(rho); meaningful for minimal components with rho > 1.
  double beta_C = std::numeric_limits<double>::quiet_NaN();
};

/// max-norm residual of the KMS recursion p = delta + e^{-beta} A p.
inline double kms_recursion_residual(const Graph& g, const StateVector& s) {
  const Eigen::VectorXd lhs = s.p - s.delta -
      std::exp(-s.beta) * (g.adjacency_real() * s.p);
  return lhs.size() == 0 ? 0.0 : lhs.cwiseAbs().maxCoeff();
}

inline std::vector<double> component_radii(const Graph& g,
                                           const SccDecomposition& d) {
  std::vector<double> radii;
  radii.reserve(d.components.size());
  for (const auto& comp : d.components)
    radii.push_back(spectral_radius(adjacency_block(g, comp, comp).cast<double>()));
  return radii;
}

/// Critical inverse temperature of v: log of the largest component
/// spectral radius among components with a path to v. Returns -infinity
/// when that maximum is 0 (the partition function is a polynomial).
inline double critical_beta(const Graph& g, int v) {
  const auto anc = ancestors(g, {v});
  const double rho = spectral_radius(adjacency_block(g, anc, anc).cast<double>());
  if (rho <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(rho);
}

// ---- partition functions --------------------------------------------------

/// Z_{w,v}(beta): generating function of paths from w to v. Evaluated on
/// the restriction R = ancestors(v) intersect descendants(w); off R no
/// path can contribute and (I - e^{-beta} A_R) is regular exactly on the
/// convergence domain.
inline double Z_pair(const Graph& g, int w, int v, double beta) {
  detail::validate_vertex_set(g, {w, v});
  const auto anc = ancestors(g, {v});
  if (!detail::set_contains(anc, w)) return 0.0;
  const auto r = detail::set_intersect(anc, descendants(g, {w}));
  const Eigen::MatrixXd a = adjacency_block(g, r, r).cast<double>();
  const double z = std::exp(-beta);
  if (z * spectral_radius(a) >= 1.0 - 1e-13)
    throw std::runtime_error("series divergent");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(r.size()));
  int w_local = -1;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] == v) rhs(static_cast<Eigen::Index>(i)) = 1.0;
    if (r[i] == w) w_local = static_cast<int>(i);
  }
  const Eigen::VectorXd x = resolvent_solve(a, z, rhs);
  return x(w_local);
}

/// Z_v(beta): partition function of v, i.e. the column sum of the
/// resolvent over the ancestors of v.
inline double Z_vertex(const Graph& g, int v, double beta) {
  detail::validate_vertex_set(g, {v});
  const auto anc = ancestors(g, {v});
  const Eigen::MatrixXd a = adjacency_block(g, anc, anc).cast<double>();
  const double z = std::exp(-beta);
  if (z * spectral_radius(a) >= 1.0 - 1e-13)
    throw std::runtime_error("series divergent");
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(anc.size()));
  for (std::size_t i = 0; i < anc.size(); ++i)
    if (anc[i] == v) rhs(static_cast<Eigen::Index>(i)) = 1.0;
  return resolvent_solve(a, z, rhs).sum();
}

/// Z_v^C(beta): paths from the component C terminating at v.
inline double Z_component(const Graph& g, const std::vector<int>& component,
                          int v, double beta) {
  double sum = 0.0;
  for (int w : component) sum += Z_pair(g, w, v, beta);
  return sum;
}

/// Z_{w,v}^C(beta): paths from w to v through C, split at the first visit
/// of C: sum over w' in C of (paths w -> w' touching C only at the end)
/// times Z_{w',v}. For w in C the first visit is the start, so the value
/// reduces to Z_{w,v}.
inline double Z_through_component(const Graph& g, int w,
                                  const std::vector<int>& component, int v,
                                  double beta) {
  detail::validate_vertex_set(g, {w, v});
  if (!detail::is_sorted_unique(component))
    throw std::invalid_argument("component set must be sorted and unique");
  detail::validate_vertex_set(g, component);

  if (detail::set_contains(component, w)) return Z_pair(g, w, v, beta);

  const auto anc_c = ancestors(g, component);
  if (!detail::set_contains(anc_c, w)) return 0.0;  // w never reaches C
  const auto dset = detail::set_minus(
      detail::set_intersect(anc_c, descendants(g, {w})), component);

  // hat{Z}_{w,w'} = x * [(I - x A_D)^{-1} A_{D,C}]_{w,w'} over the
  // C-avoiding block D.
  const double x = std::exp(-beta);
  const Eigen::MatrixXd ad = adjacency_block(g, dset, dset).cast<double>();
  if (x * spectral_radius(ad) >= 1.0 - 1e-13)
    throw std::runtime_error("series divergent");
  Eigen::VectorXd e_w = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dset.size()));
  for (std::size_t i = 0; i < dset.size(); ++i)
    if (dset[i] == w) e_w(static_cast<Eigen::Index>(i)) = 1.0;
  const Eigen::Index nd = static_cast<Eigen::Index>(dset.size());
  const Eigen::MatrixXd m =
      (Eigen::MatrixXd::Identity(nd, nd) - x * ad).transpose();
  const Eigen::VectorXd row = m.partialPivLu().solve(e_w);
  const Eigen::MatrixXd adc = adjacency_block(g, dset, component).cast<double>();
  const Eigen::VectorXd first_entry = x * (adc.transpose() * row);

  double sum = 0.0;
  for (std::size_t i = 0; i < component.size(); ++i)
    sum += first_entry(static_cast<Eigen::Index>(i)) *
           Z_pair(g, component[i], v, beta);
  return sum;
}

// ---- type I states ---------------------------------------------------------

/// The extremal state attached to v at inverse temperature beta > beta_v:
/// p[w] = Z_{w,v}/Z_v and delta mass 1/Z_v at v itself.
inline StateVector type_I_state(const Graph& g, int v, double beta) {
  detail::validate_vertex_set(g, {v});
  if (!(beta > 0.0))
    throw std::invalid_argument("inverse temperature must be positive");
  if (!(beta > critical_beta(g, v)))
    throw std::invalid_argument("below critical temperature");
  const auto anc = ancestors(g, {v});
  const Eigen::MatrixXd a = adjacency_block(g, anc, anc).cast<double>();
  const double z = std::exp(-beta);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(anc.size()));
  for (std::size_t i = 0; i < anc.size(); ++i)
    if (anc[i] == v) rhs(static_cast<Eigen::Index>(i)) = 1.0;
  const Eigen::VectorXd x = resolvent_solve(a, z, rhs);
  const double zv = x.sum();

  StateVector s;
  s.beta = beta;
  s.p = Eigen::VectorXd::Zero(g.size());
  s.delta = Eigen::VectorXd::Zero(g.size());
  for (std::size_t i = 0; i < anc.size(); ++i)
    s.p(anc[i]) = x(static_cast<Eigen::Index>(i)) / zv;
  s.delta(v) = 1.0 / zv;
  s.supported_at_infinity = false;
  return s;
}

// ---- minimal components and criticality ------------------------------------

/// Ids of components that are minimal (every distinct component reaching
/// them has strictly smaller spectral radius) and have rho > 1.
inline std::vector<int> minimal_component_ids(const Graph& g,
                                              const SccDecomposition& d,
                                              const std::vector<double>& radii,
                                              double tol = 1e-9) {
  std::vector<int> out;
  for (int c = 0; c < d.count(); ++c) {
    const double rho = radii[static_cast<std::size_t>(c)];
    if (!detail::definitely_less(1.0, rho, tol)) continue;
    const auto anc = ancestors(g, d.components[static_cast<std::size_t>(c)]);
    bool minimal = true;
    for (int u : anc) {
      const int cu = d.component_of[static_cast<std::size_t>(u)];
      if (cu == c) continue;
      if (!detail::definitely_less(radii[static_cast<std::size_t>(cu)], rho, tol)) {
        minimal = false;
        break;
      }
    }
    if (minimal) out.push_back(c);
  }
  return out;
}

inline std::vector<ComponentTemperature> minimal_components(const Graph& g,
                                                            double tol = 1e-9) {
  const auto d = scc(g);
  const auto radii = component_radii(g, d);
  std::vector<ComponentTemperature> out;
  for (int c : minimal_component_ids(g, d, radii, tol)) {
    ComponentTemperature t;
    t.id = c;
    t.component = d.components[static_cast<std::size_t>(c)];
    t.rho = radii[static_cast<std::size_t>(c)];
    t.beta_C = std::log(t.rho);
    out.push_back(std::move(t));
  }
  return out;
}

/// crit_v: minimal components with a path to v whose critical temperature
/// matches beta_v within the given relative tolerance.
inline std::vector<int> critical_components(const Graph& g,
                                            const SccDecomposition& d,
                                            const std::vector<double>& radii,
                                            int v, double tol = 1e-9) {
  detail::validate_vertex_set(g, {v});
  const auto anc = ancestors(g, {v});
  const double rho_max =
      spectral_radius(adjacency_block(g, anc, anc).cast<double>());
  if (!detail::definitely_less(1.0, rho_max, tol))
    throw std::invalid_argument("critical inverse temperature is not positive");
  std::vector<int> out;
  for (int c : minimal_component_ids(g, d, radii, tol)) {
    const auto& comp = d.components[static_cast<std::size_t>(c)];
    if (!detail::set_contains(anc, comp.front())) continue;
    if (detail::approx_equal_rel(radii[static_cast<std::size_t>(c)], rho_max, tol))
      out.push_back(c);
  }
  return out;
}

inline std::vector<int> critical_components(const Graph& g, int v,
                                            double tol = 1e-9) {
  const auto d = scc(g);
  return critical_components(g, d, component_radii(g, d), v, tol);
}

// ---- harmonic vectors -------------------------------------------------------

/// Extends a beta-harmonic vector h0 on the restriction E_K to the whole
/// graph: h on D = ancestors(K) \ K solves (e^beta I - A_D) h_D = A_{D,K} h0
/// and h vanishes off the ancestors of K. The extension is the unique one.
inline HarmonicVector harmonic_extend(const Graph& g, const std::vector<int>& k,
                                      const Eigen::VectorXd& h0, double beta,
                                      double tol = 1e-9) {
  if (!detail::is_sorted_unique(k) || k.empty())
    throw std::invalid_argument("K must be a nonempty sorted vertex set");
  detail::validate_vertex_set(g, k);
  if (h0.size() != static_cast<Eigen::Index>(k.size()))
    throw std::invalid_argument("h0 size does not match K");
  if (h0.minCoeff() < 0.0)
    throw std::invalid_argument("h0 must be nonnegative");
  const double ebeta = std::exp(beta);
  const Eigen::MatrixXd ak = adjacency_block(g, k, k).cast<double>();
  const double scale = std::max(1.0, h0.cwiseAbs().maxCoeff());
  if ((ak * h0 - ebeta * h0).cwiseAbs().maxCoeff() > tol * ebeta * scale)
    throw std::invalid_argument("h0 is not beta-harmonic on the restriction");

  const auto s = ancestors(g, k);
  const auto dset = detail::set_minus(s, k);

  Eigen::VectorXd full = Eigen::VectorXd::Zero(g.size());
  for (std::size_t i = 0; i < k.size(); ++i)
    full(k[i]) = h0(static_cast<Eigen::Index>(i));

  if (!dset.empty()) {
    const Eigen::MatrixXd ad = adjacency_block(g, dset, dset).cast<double>();
    if (!detail::definitely_less(spectral_radius(ad), ebeta, 1e-12))
      throw std::runtime_error(
          "extension block spectral radius reaches e^beta; system is singular");
    const Eigen::MatrixXd adk = adjacency_block(g, dset, k).cast<double>();
    const Eigen::Index nd = static_cast<Eigen::Index>(dset.size());
    const Eigen::MatrixXd m = ebeta * Eigen::MatrixXd::Identity(nd, nd) - ad;
    const Eigen::VectorXd hd = m.partialPivLu().solve(adk * h0);
    for (std::size_t i = 0; i < dset.size(); ++i)
      full(dset[i]) = hd(static_cast<Eigen::Index>(i));
  }
  return HarmonicVector{beta, std::move(full)};
}

struct HarmonicCheck {
  bool harmonic = false;
  bool zero_vector = false;
  double equation_residual = 0.0;
  std::string first_violation;  // empty when harmonic
};

/// Checks the eigen-equation A_E h = e^beta h and the structural
/// consequences: h vanishes on components whose spectral radius exceeds
/// e^beta and on critical components that are not minimal.
inline HarmonicCheck is_harmonic(const Graph& g, const HarmonicVector& h,
                                 double eq_tol = 1e-9, double zero_tol = 1e-6,
                                 double crit_tol = 1e-9) {
  HarmonicCheck out;
  if (h.values.size() != g.size())
    throw std::invalid_argument("vector size does not match graph");
  const double ebeta = std::exp(h.beta);
  const double scale = std::max(1.0, h.values.cwiseAbs().maxCoeff());
  out.zero_vector = h.values.cwiseAbs().maxCoeff() == 0.0;

  if (h.values.minCoeff() < -eq_tol * scale) {
    out.first_violation = "negative entry";
    return out;
  }
  out.equation_residual =
      (g.adjacency_real() * h.values - ebeta * h.values).cwiseAbs().maxCoeff();
  if (out.equation_residual > eq_tol * ebeta * scale) {
    out.first_violation = "eigen-equation violated";
    return out;
  }

  const auto d = scc(g);
  const auto radii = component_radii(g, d);
  const auto pmc = minimal_component_ids(g, d, radii, crit_tol);
  for (int c = 0; c < d.count(); ++c) {
    const double rho = radii[static_cast<std::size_t>(c)];
    const bool supercritical = detail::definitely_less(ebeta, rho, crit_tol);
    const bool critical_nonminimal =
        detail::approx_equal_rel(rho, ebeta, crit_tol) &&
        !detail::set_contains(pmc, c);
    if (!supercritical && !critical_nonminimal) continue;
    for (int vtx : d.components[static_cast<std::size_t>(c)]) {
      if (std::abs(h.values(vtx)) > zero_tol * scale) {
        out.first_violation =
            supercritical
                ? "nonzero on a component with spectral radius above e^beta"
                : "nonzero on a critical non-minimal component";
        return out;
      }
    }
  }
  out.harmonic = true;
  return out;
}

/// The extremal state of a minimal component C with rho(A_C) > 1: the
/// Perron eigenvector of A_C, extended harmonically over the ancestors of
/// the union K of all equally-critical minimal components and
/// l1-normalized. Supported on infinite paths, so delta vanishes.
inline StateVector component_state(const Graph& g,
                                   const std::vector<int>& component,
                                   double tol = 1e-9) {
  const auto d = scc(g);
  const auto radii = component_radii(g, d);
  const auto pmc = minimal_component_ids(g, d, radii, tol);
  int cid = -1;
  for (int c = 0; c < d.count(); ++c)
    if (d.components[static_cast<std::size_t>(c)] == component) cid = c;
  if (cid < 0 || !detail::set_contains(pmc, cid))
    throw std::invalid_argument("not a minimal component with rho > 1");

  const double rho = radii[static_cast<std::size_t>(cid)];
  const double beta = std::log(rho);

  // K: union of minimal components at the same critical temperature.
  std::vector<int> k;
  for (int c : pmc)
    if (detail::approx_equal_rel(radii[static_cast<std::size_t>(c)], rho, tol))
      k.insert(k.end(), d.components[static_cast<std::size_t>(c)].begin(),
               d.components[static_cast<std::size_t>(c)].end());
  std::sort(k.begin(), k.end());

  const auto pd = perron_data(adjacency_block(g, component, component).cast<double>());
  Eigen::VectorXd h0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k.size()));
  for (std::size_t i = 0; i < k.size(); ++i) {
    const auto pos = std::lower_bound(component.begin(), component.end(), k[i]);
    if (pos != component.end() && *pos == k[i])
      h0(static_cast<Eigen::Index>(i)) = pd.left(pos - component.begin());
  }

  const HarmonicVector h = harmonic_extend(g, k, h0, beta, tol);
  StateVector s;
  s.beta = beta;
  s.p = h.values / h.values.sum();
  s.delta = Eigen::VectorXd::Zero(g.size());
  s.supported_at_infinity = true;
  return s;
}

}  // namespace kmsgraph
