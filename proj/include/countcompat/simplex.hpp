#ifndef COUNTCOMPAT_SIMPLEX_HPP
#define COUNTCOMPAT_SIMPLEX_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "countcompat/errors.hpp"

// Dense phase-1 simplex for pure feasibility problems A x = b, x >= 0.
// Small dense systems only (a few hundred rows); artificial variables start
// in the basis, Dantzig pricing with a permanent switch to Bland's rule on
// stall, and the phase-1 dual is read off the artificial reduced costs.

namespace countcompat {

struct Phase1Result {
  bool feasible = false;
  double objective = 0.0;      // residual infeasibility (sum of artificials)
  std::vector<double> x;       // structural solution when feasible
  std::vector<double> dual;    // y with y^T b = objective, y^T A <= 0 when infeasible
  std::size_t iterations = 0;
};

inline Phase1Result phase1_simplex(std::size_t m, std::size_t ncols, std::vector<double> A,
                                   std::vector<double> b, double feas_tol = 1e-9) {
  // Flip rows so the right-hand side is nonnegative.
  for (std::size_t i = 0; i < m; ++i)
    if (b[i] < 0.0) {
      b[i] = -b[i];
      for (std::size_t j = 0; j < ncols; ++j) A[i * ncols + j] = -A[i * ncols + j];
    }

  const std::size_t width = ncols + m + 1;  // structural + artificial + rhs
  std::vector<double> T(m * width, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < ncols; ++j) T[i * width + j] = A[i * ncols + j];
    T[i * width + ncols + i] = 1.0;
    T[i * width + ncols + m] = b[i];
  }
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) basis[i] = ncols + i;

  // Cost row of minimize sum(artificials): reduced costs and -objective.
  std::vector<double> z(width, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < width; ++j) z[j] -= T[i * width + j];
  for (std::size_t i = 0; i < m; ++i) z[ncols + i] = 0.0;

  const double piv_tol = 1e-11;
  const double cost_tol = 1e-11;
  bool bland = false;
  std::size_t stall = 0;
  double last_obj = -z[width - 1];
  const std::size_t max_iter = 200000;

  Phase1Result res;
  for (;; ++res.iterations) {
    if (res.iterations > max_iter)
      throw numerical_failure_error("phase1_simplex: iteration limit exceeded");

    // Entering column (structural columns only).
    std::size_t enter = width;
    if (!bland) {
      double best = -cost_tol;
      for (std::size_t j = 0; j < ncols; ++j)
        if (z[j] < best) {
          best = z[j];
          enter = j;
        }
    } else {
      for (std::size_t j = 0; j < ncols; ++j)
        if (z[j] < -cost_tol) {
          enter = j;
          break;
        }
    }
    if (enter == width) break;  // optimal

    // Ratio test, smallest basis index on ties (Bland-safe).
    std::size_t leave = m;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double a = T[i * width + enter];
      if (a <= piv_tol) continue;
      const double ratio = T[i * width + ncols + m] / a;
      if (leave == m || ratio < best_ratio - 1e-14 ||
          (std::fabs(ratio - best_ratio) <= 1e-14 && basis[i] < basis[leave])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave == m)
      throw numerical_failure_error("phase1_simplex: unbounded phase-1 (should be impossible)");

    // Pivot.
    const double piv = T[leave * width + enter];
    for (std::size_t j = 0; j < width; ++j) T[leave * width + j] /= piv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double f = T[i * width + enter];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) T[i * width + j] -= f * T[leave * width + j];
    }
    {
      const double f = z[enter];
      if (f != 0.0)
        for (std::size_t j = 0; j < width; ++j) z[j] -= f * T[leave * width + j];
    }
    basis[leave] = enter;

    const double obj = -z[width - 1];
    if (obj < last_obj - 1e-13) {
      stall = 0;
      last_obj = obj;
    } else if (++stall > 2 * (m + 2)) {
      bland = true;  // anti-cycling from here on
    }
  }

  res.objective = -z[width - 1];
  res.feasible = res.objective < feas_tol;
  if (res.feasible) {
    res.x.assign(ncols, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      if (basis[i] < ncols) res.x[basis[i]] = T[i * width + ncols + m];
  }
  // Phase-1 dual from artificial reduced costs: y_i = 1 - zbar(artificial_i).
  res.dual.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) res.dual[i] = 1.0 - z[ncols + i];
  return res;
}

}  // namespace countcompat

#endif
