#pragma once

// Spectral radius, Perron eigen-data, and resolvents of nonnegative
// matrices at desk scale. The spectral radius of an irreducible block is
// found by power iteration on (A + I): the shift makes the iteration
// aperiodic and moves the spectrum by exactly 1, so periodic blocks
// (plain cycles, for instance) converge too. Reducible input is split
// into strongly connected blocks first and the radius is the max over
// blocks; nilpotency is decided exactly from the support digraph.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "kmsgraph/detail/numeric.hpp"
#include "kmsgraph/detail/tarjan.hpp"

namespace kmsgraph {

struct PerronData {
  double rho = 0.0;
  /// Column eigenvector: A * left = rho * left, entries > 0, l1-normalized.
  Eigen::VectorXd left;
  /// Row eigenvector: right^T * A = rho * right^T, scaled so <right,left> = 1.
  Eigen::VectorXd right;
  /// Rank-one projection left * right^T; commutes with A, squares to itself.
  Eigen::MatrixXd projection;
};

namespace detail {

inline void validate_nonnegative_square(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("matrix is not square");
  if (a.size() > 0 && a.minCoeff() < 0.0)
    throw std::invalid_argument("matrix has a negative entry");
}

inline std::vector<std::vector<int>> support_components(const Eigen::MatrixXd& a) {
  return tarjan_components(static_cast<int>(a.rows()),
                           [&](int v, int u) { return a(v, u) > 0.0; });
}

/// True iff the support digraph has no cycle (equivalently A^n = 0):
/// every strongly connected block is a loopless singleton.
inline bool is_nilpotent(const Eigen::MatrixXd& a) {
  for (const auto& comp : support_components(a)) {
    if (comp.size() > 1) return false;
    if (a(comp[0], comp[0]) > 0.0) return false;
  }
  return true;
}

struct PowerIterationResult {
  double rho = 0.0;
  Eigen::VectorXd vec;
};

inline constexpr int kPowerIterationCap = 100000;

/// Power iteration on (A + I) for irreducible nonnegative A. The
/// Collatz-Wielandt ratios of a positive iterate bracket the spectral
/// radius, so the min/max gap certifies convergence.
inline PowerIterationResult power_iteration(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.rows();
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (int iter = 0; iter < kPowerIterationCap; ++iter) {
    Eigen::VectorXd w = a * v + v;
    double mn = std::numeric_limits<double>::infinity();
    double mx = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = w(i) / v(i);
      mn = std::min(mn, r);
      mx = std::max(mx, r);
    }
    if (mx - mn <= 5e-14 * std::max(1.0, mx)) {
      PowerIterationResult out;
      out.rho = 0.5 * (mn + mx) - 1.0;
      out.vec = w / w.sum();
      return out;
    }
    v = w / w.sum();
  }
  throw std::runtime_error("power iteration failed to converge");
}

}  // namespace detail

inline bool is_irreducible(const Eigen::MatrixXd& a) {
  detail::validate_nonnegative_square(a);
  if (a.rows() == 0) return false;
  if (a.rows() == 1) return a(0, 0) > 0.0;
  return detail::support_components(a).size() == 1;
}

inline double spectral_radius(const Eigen::MatrixXd& a) {
  detail::validate_nonnegative_square(a);
  if (a.rows() == 0) return 0.0;
  if (detail::is_nilpotent(a)) return 0.0;
  double rho = 0.0;
  for (const auto& comp : detail::support_components(a)) {
    if (comp.size() == 1) {
      rho = std::max(rho, a(comp[0], comp[0]));
      continue;
    }
    const auto k = static_cast<Eigen::Index>(comp.size());
    Eigen::MatrixXd block(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j)
        block(i, j) = a(comp[static_cast<std::size_t>(i)],
                        comp[static_cast<std::size_t>(j)]);
    rho = std::max(rho, detail::power_iteration(block).rho);
  }
  return rho;
}

inline PerronData perron_data(const Eigen::MatrixXd& a) {
  detail::validate_nonnegative_square(a);
  if (!is_irreducible(a))
    throw std::invalid_argument("matrix not irreducible");

  PerronData out;
  if (a.rows() == 1) {
    out.rho = a(0, 0);
    if (out.rho <= 0.0) throw std::invalid_argument("spectral radius is zero");
    out.left = Eigen::VectorXd::Ones(1);
    out.right = Eigen::VectorXd::Ones(1);
    out.projection = Eigen::MatrixXd::Ones(1, 1);
    return out;
  }

  const auto fwd = detail::power_iteration(a);
  const auto bwd = detail::power_iteration(a.transpose());
  out.rho = fwd.rho;
  if (out.rho <= 0.0) throw std::invalid_argument("spectral radius is zero");
  out.left = fwd.vec / fwd.vec.sum();
  const double pairing = bwd.vec.dot(out.left);
  out.right = bwd.vec / pairing;
  out.projection = out.left * out.right.transpose();
  if (out.left.minCoeff() <= 0.0 || out.right.minCoeff() <= 0.0)
    throw std::runtime_error("Perron eigenvector has a nonpositive entry");
  return out;
}

/// Solves (I - zA) x = rhs; shared by resolvent and the partition-function
/// evaluators. Refuses input at or beyond the pole z = 1/rho(A).
inline Eigen::VectorXd resolvent_solve(const Eigen::MatrixXd& a, double z,
                                       const Eigen::VectorXd& rhs) {
  detail::validate_nonnegative_square(a);
  if (z < 0.0) throw std::invalid_argument("resolvent parameter must be nonnegative");
  const double zr = z * spectral_radius(a);
  if (zr >= 1.0 - 1e-13)
    throw std::runtime_error("resolvent at or beyond pole");
  const Eigen::Index n = a.rows();
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - z * a;
  return m.partialPivLu().solve(rhs);
}

/// (I - zA)^{-1}; entries are nonnegative and the diagonal is >= 1 when
/// z * rho(A) < 1.
inline Eigen::MatrixXd resolvent(const Eigen::MatrixXd& a, double z) {
  detail::validate_nonnegative_square(a);
  if (z < 0.0) throw std::invalid_argument("resolvent parameter must be nonnegative");
  const double zr = z * spectral_radius(a);
  if (zr >= 1.0 - 1e-13)
    throw std::runtime_error("resolvent at or beyond pole");
  const Eigen::Index n = a.rows();
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - z * a;
  return m.partialPivLu().solve(Eigen::MatrixXd::Identity(n, n));
}

/// Residue of z -> [(I - zA)^{-1}]_{w,v} at the simple pole z = 1/rho(A)
/// for irreducible A; equals -(1/rho) * P_{w,v} and is strictly negative.
inline double pole_residue(const Eigen::MatrixXd& a, int w, int v) {
  const PerronData pd = perron_data(a);
  if (w < 0 || v < 0 || w >= a.rows() || v >= a.rows())
    throw std::invalid_argument("index out of range");
  return -(1.0 / pd.rho) * pd.projection(w, v);
}

}  // namespace kmsgraph
