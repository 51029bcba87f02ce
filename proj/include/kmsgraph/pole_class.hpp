#pragma once

// Equivalence classes of monotone generating functions, reduced to the
// data that survives ratio limits: the pole location x in the z = e^{-beta}
// domain and the pole order. Addition keeps the class with the smaller
// pole location (it diverges first); at equal locations orders max under
// addition and add under multiplication. Order 0 with x = +inf is the
// class of bounded functions and the multiplicative unit.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "kmsgraph/detail/numeric.hpp"

namespace kmsgraph {

struct PoleClass {
  double x = std::numeric_limits<double>::infinity();
  int order = 0;

  PoleClass() = default;
  PoleClass(double x_, int order_) : x(x_), order(order_) {
    if (order < 0) throw std::invalid_argument("pole order must be nonnegative");
    if (order == 0) {
      if (!std::isinf(x)) throw std::invalid_argument("order-0 class must have x = +inf");
    } else {
      if (!(x > 0.0) || std::isinf(x))
        throw std::invalid_argument("pole location must be finite and positive");
    }
  }

  static PoleClass unit() { return PoleClass(); }
  bool is_unit() const { return order == 0; }
};

inline bool same_location(const PoleClass& a, const PoleClass& b,
                          double tol = detail::kPoleLocationTol) {
  return detail::approx_equal_rel(a.x, b.x, tol);
}

inline PoleClass class_add(const PoleClass& a, const PoleClass& b,
                           double tol = detail::kPoleLocationTol) {
  if (same_location(a, b, tol)) return a.order >= b.order ? a : b;
  return a.x < b.x ? a : b;
}

inline PoleClass class_mul(const PoleClass& a, const PoleClass& b,
                           double tol = detail::kPoleLocationTol) {
  if (same_location(a, b, tol)) {
    if (a.is_unit()) return b;
    return PoleClass(std::min(a.x, b.x), a.order + b.order);
  }
  return a.x < b.x ? a : b;
}

/// The total order: a <= b iff a's pole location is larger, or locations
/// tie and a's order is not larger. Consistent with class_add:
/// class_le(a,b) holds exactly when class_add(a,b) = b.
inline bool class_le(const PoleClass& a, const PoleClass& b,
                     double tol = detail::kPoleLocationTol) {
  if (same_location(a, b, tol)) return a.order <= b.order;
  return a.x > b.x;
}

inline bool class_eq(const PoleClass& a, const PoleClass& b,
                     double tol = detail::kPoleLocationTol) {
  return same_location(a, b, tol) && a.order == b.order;
}

/// Class of the path generating function of a strongly connected
/// component with spectral radius rho: a simple pole at x = 1/rho, or the
/// bounded class when rho = 0.
inline PoleClass component_class(double rho) {
  if (rho < 0.0) throw std::invalid_argument("spectral radius must be nonnegative");
  if (rho == 0.0) return PoleClass::unit();
  return PoleClass(1.0 / rho, 1);
}

/// 1 / (1 - n e^{-beta}), the closed form of sum_k n^k e^{-beta k}.
inline double geometric_closed_form(std::int64_t n, double beta) {
  if (n < 1) throw std::invalid_argument("n must be a positive integer");
  const double q = static_cast<double>(n) * std::exp(-beta);
  if (q >= 1.0) throw std::invalid_argument("geometric series divergent");
  return 1.0 / (1.0 - q);
}

}  // namespace kmsgraph
