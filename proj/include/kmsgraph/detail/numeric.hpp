#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace kmsgraph::detail {

inline constexpr double kPoleLocationTol = 1e-9;

/// Relative comparison for positive quantities (spectral radii, pole
/// locations). Infinities compare equal to themselves only.
inline bool approx_equal_rel(double a, double b, double tol) {
  if (std::isinf(a) || std::isinf(b)) return a == b;
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) <= tol * scale;
}

/// a < b with a relative safety margin, so that near-ties are not
/// treated as strict inequalities.
inline bool definitely_less(double a, double b, double tol) {
  if (std::isinf(b)) return !std::isinf(a);
  if (std::isinf(a)) return false;
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return a < b - tol * scale;
}

// ---- sorted index-set helpers -------------------------------------------

inline bool is_sorted_unique(const std::vector<int>& s) {
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] <= s[i - 1]) return false;
  return true;
}

inline std::vector<int> set_intersect(const std::vector<int>& a,
                                      const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

inline std::vector<int> set_minus(const std::vector<int>& a,
                                  const std::vector<int>& b) {
  std::vector<int> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

inline bool set_contains(const std::vector<int>& s, int x) {
  return std::binary_search(s.begin(), s.end(), x);
}

// ---- vector-valued Neville extrapolation --------------------------------

struct ExtrapolationResult {
  Eigen::VectorXd value;
  double residual = std::numeric_limits<double>::infinity();
  int points_used = 0;
};

/// Polynomial extrapolation of f(eps) to eps = 0 from samples at the
/// nodes eps[k], applied entrywise to vectors. Keeps the diagonal of the
/// Neville tableau; stops once two successive diagonal values agree to
/// stop_tol in the max norm, or the samples run out. Tracks the best
/// estimate seen, as deep tableau rows can deteriorate in floating point.
inline ExtrapolationResult neville_limit(const std::vector<double>& eps,
                                         const std::vector<Eigen::VectorXd>& samples,
                                         double stop_tol) {
  if (samples.empty()) throw std::invalid_argument("no samples to extrapolate");
  const Eigen::Index n = samples.front().size();

  std::vector<Eigen::VectorXd> row;  // row k of the tableau
  ExtrapolationResult best;
  best.value = samples.front();
  best.points_used = 1;

  Eigen::VectorXd prev_diag = samples.front();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (samples[k].size() != n) throw std::invalid_argument("sample size mismatch");
    std::vector<Eigen::VectorXd> next(k + 1);
    next[0] = samples[k];
    for (std::size_t j = 1; j <= k; ++j) {
      const double xk = eps[k];
      const double xkj = eps[k - j];
      // P_{k,j}(0) from P_{k,j-1}(0) and P_{k-1,j-1}(0)
      next[j] = (xk * row[j - 1] - xkj * next[j - 1]) / (xk - xkj);
    }
    row = std::move(next);
    if (k > 0) {
      const double diff = (row[k] - prev_diag).cwiseAbs().maxCoeff();
      if (diff < best.residual) {
        best.residual = diff;
        best.value = row[k];
        best.points_used = static_cast<int>(k) + 1;
      }
      if (diff < stop_tol) return best;
    }
    prev_diag = row[k];
  }
  return best;
}

// ---- thread cap ----------------------------------------------------------

/// Number of worker threads to use, honoring the KMS_GRAPH_THREADS
/// environment variable (0 or unset = automatic).
inline int thread_cap() {
  const char* env = std::getenv("KMS_GRAPH_THREADS");
  long v = 0;
  if (env != nullptr) {
    char* end = nullptr;
    v = std::strtol(env, &end, 10);
    if (end == env || v < 0) v = 0;
  }
  if (v == 0) {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
  }
  return static_cast<int>(v);
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Exceptions
/// from workers are rethrown on the calling thread (first one wins).
template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  if (count <= 0) return;
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < count; i += threads) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace kmsgraph::detail
