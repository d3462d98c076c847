#ifndef COUNTCOMPAT_LINCE_HPP
#define COUNTCOMPAT_LINCE_HPP

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "countcompat/errors.hpp"
#include "countcompat/families.hpp"
#include "countcompat/joint_pmf.hpp"
#include "countcompat/simplex.hpp"

// Linear-conditional-expectation layer: correlation-type necessary
// conditions, the theta-domain classifier, and bounded-support feasibility
// with infeasibility certificates.
//
// Bivariate convention throughout: E[X|Y] = cY + d and E[Y|X] = aX + b.

namespace countcompat {

struct LinearCESpec {
  int n = 0;
  std::vector<double> A;  // n*n row-major slopes of E[X_i | rest], zero diagonal
  std::vector<double> intercepts;

  static LinearCESpec bivariate(double a, double b, double c, double d) {
    LinearCESpec s;
    s.n = 2;
    s.A = {0.0, c, a, 0.0};
    s.intercepts = {d, b};
    return s;
  }
  double a() const { return A[1 * n + 0]; }
  double b() const { return intercepts[1]; }
  double c() const { return A[0 * n + 1]; }
  double d() const { return intercepts[0]; }
};

// ---------------------------------------------------------------------------
// Necessary conditions.

enum class Lemma3Case { independent, interior, linear_dependence, violated };

struct ConditionReport {
  int n = 0;
  // n = 2 fields
  Lemma3Case bivariate_case = Lemma3Case::violated;
  double slope_product = 0.0;  // = squared correlation when a solution exists
  // n >= 3 fields: principal minors of I - A over index subsets of size >= 2
  std::vector<double> minors;
  bool all_minors_positive = true;
  std::string summary;
};

inline ConditionReport necessary_conditions(const LinearCESpec& spec) {
  if (spec.n < 2) throw parameter_error("necessary_conditions: need n >= 2");
  ConditionReport rep;
  rep.n = spec.n;
  if (spec.n == 2) {
    const double a = spec.a(), c = spec.c();
    rep.slope_product = a * c;
    if (a == 0.0 && c == 0.0) {
      rep.bivariate_case = Lemma3Case::independent;
      rep.summary = "a = c = 0: independence case";
    } else if (a > 0.0 && c > 0.0 && a * c < 1.0) {
      rep.bivariate_case = Lemma3Case::interior;
      rep.summary = "ac in (0,1): squared correlation " + std::to_string(a * c);
    } else if (a > 0.0 && c > 0.0 && a * c == 1.0) {
      rep.bivariate_case = Lemma3Case::linear_dependence;
      rep.summary = "ac = 1: linear dependence";
    } else {
      rep.bivariate_case = Lemma3Case::violated;
      rep.summary = "no solution with positive variances (ac = " + std::to_string(a * c) + ")";
    }
    return rep;
  }
  // All principal minors of I - A over subsets of size >= 2 (singletons are
  // identically 1 because the diagonal of A is zero).
  const int n = spec.n;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    const int k = static_cast<int>(idx.size());
    if (k < 2) continue;
    std::vector<double> M(k * k);
    for (int r = 0; r < k; ++r)
      for (int col = 0; col < k; ++col)
        M[r * k + col] = (r == col ? 1.0 : 0.0) - (r == col ? 0.0 : spec.A[idx[r] * n + idx[col]]);
    // determinant by partial-pivot elimination
    double det = 1.0;
    for (int col = 0; col < k; ++col) {
      int piv = col;
      for (int r = col + 1; r < k; ++r)
        if (std::fabs(M[r * k + col]) > std::fabs(M[piv * k + col])) piv = r;
      if (std::fabs(M[piv * k + col]) == 0.0) {
        det = 0.0;
        break;
      }
      if (piv != col) {
        for (int j = 0; j < k; ++j) std::swap(M[col * k + j], M[piv * k + j]);
        det = -det;
      }
      det *= M[col * k + col];
      for (int r = col + 1; r < k; ++r) {
        const double f = M[r * k + col] / M[col * k + col];
        for (int j = col; j < k; ++j) M[r * k + j] -= f * M[col * k + j];
      }
    }
    rep.minors.push_back(det);
    if (!(det > 0.0)) rep.all_minors_positive = false;
  }
  rep.summary = rep.all_minors_positive ? "all principal minors of I-A positive"
                                        : "a principal minor of I-A is non-positive";
  return rep;
}

// ---------------------------------------------------------------------------
// Theta-domain classifier.

struct ThetaDomainResult {
  char region = 'x';  // 'a'..'e', or 'x' = outside all regions
  std::optional<ThetaFamilyParams> params;
};

inline ThetaDomainResult classify_theta_domain(double a, double b, double c, double d) {
  if (!(a > 0.0 && c > 0.0 && b > 0.0 && d > 0.0))
    throw parameter_error("classify_theta_domain: all four parameters must be > 0");
  if (!(a * c < 1.0))
    throw correlation_bound_error("classify_theta_domain: requires ac < 1");

  const double ratio = b / d;
  const double root = std::sqrt(a / c);
  const double eq_tol = 1e-9;
  const bool a_eq_c = std::fabs(a - c) <= eq_tol * std::max(a, c);

  ThetaDomainResult res;
  auto finish = [&](char region, double delta) {
    ThetaFamilyParams p{delta, d / delta, d / delta - c, b / delta, b / delta - a};
    // Points numerically on a region boundary can produce parameters that
    // fail validation by rounding; report them as outside instead.
    try {
      validate(p);
    } catch (const incompatible_parameters_error&) {
      return res;
    }
    res.region = region;
    res.params = p;
    return res;
  };
  const double delta_num = b * b * c - a * d * d;
  const double delta_den = a * d * (1.0 - c) + b * c * (a - 1.0);

  if (a_eq_c) {
    // Equal slopes: only the gamma-mixture limit (theta2 = theta4 = 0) with
    // matching intercepts fills this slice.
    if (a < 1.0 && std::fabs(b - d) <= eq_tol * std::max(b, d)) {
      ThetaFamilyParams p{d / c, c, 0.0, c, 0.0};
      validate(p);
      res.region = 'c';
      res.params = p;
    }
    return res;
  }
  if (a >= 1.0 && c < 1.0) {
    if (ratio > root) return finish('a', delta_num / delta_den);
    return res;
  }
  if (c >= 1.0 && a < 1.0) {
    if (ratio < root) return finish('b', delta_num / delta_den);
    return res;
  }
  // Both slopes in (0,1) and distinct.
  if (c < a) {
    const double upper = a * (1.0 - c) / (c * (1.0 - a));
    if (ratio > root && ratio < upper) return finish('d', delta_num / delta_den);
    return res;
  }
  const double lower = a * (1.0 - c) / (c * (1.0 - a));
  if (ratio > lower && ratio < root) return finish('e', delta_num / delta_den);
  return res;
}

// Smallest perfect square N > 4 with 1/sqrt(N) < min(a,c),
// max(a,c) < 1 - 1/sqrt(N), and max(b,d) < sqrt(N).
inline int choose_support_bound(double a, double b, double c, double d) {
  if (!(a > 0.0 && a < 1.0 && c > 0.0 && c < 1.0))
    throw out_of_scope_error("choose_support_bound: requires 0 < a, c < 1");
  if (!(b > 0.0 && d > 0.0))
    throw parameter_error("choose_support_bound: intercepts must be > 0");
  for (int s = 3;; ++s) {
    const double rs = static_cast<double>(s);
    const double inv = 1.0 / rs;
    if (inv < std::min(a, c) && std::max(a, c) < 1.0 - inv && std::max(b, d) < rs)
      return s * s;
    if (s > 100000) throw numerical_failure_error("choose_support_bound: no bound found");
  }
}

// ---------------------------------------------------------------------------
// Bounded-support feasibility.

struct LPSystem {
  std::size_t rows = 0, cols = 0;
  std::vector<double> A;  // rows x cols, row-major
  std::vector<double> rhs;
};

// Rows: [normalization; per-value rows of E[Y|X=i]; per-value rows of
// E[X|Y=j]]; columns (i,j) lexicographic.  Generalizes to n coordinates with
// one row per (target, configuration of the others).
inline LPSystem build_lp_system(const LinearCESpec& spec, int N) {
  const int n = spec.n;
  std::size_t side = static_cast<std::size_t>(N + 1);
  std::size_t cols = 1;
  for (int i = 0; i < n; ++i) cols *= side;
  std::size_t confs = cols / side;  // configurations of the other coordinates
  LPSystem sys;
  sys.cols = cols;
  sys.rows = 1 + static_cast<std::size_t>(n) * confs;
  sys.A.assign(sys.rows * cols, 0.0);
  sys.rhs.assign(sys.rows, 0.0);
  for (std::size_t col = 0; col < cols; ++col) sys.A[col] = 1.0;
  sys.rhs[0] = 1.0;

  std::vector<int> x(n);
  std::size_t row = 1;
  for (int target = 0; target < n; ++target) {
    for (std::size_t conf = 0; conf < confs; ++conf) {
      // Decode the configuration of coordinates != target.
      std::size_t rem = conf;
      for (int i = n - 1; i >= 0; --i) {
        if (i == target) continue;
        x[i] = static_cast<int>(rem % side);
        rem /= side;
      }
      double pred = spec.intercepts[target];
      for (int i = 0; i < n; ++i)
        if (i != target) pred += spec.A[target * n + i] * x[i];
      for (std::size_t k = 0; k < side; ++k) {
        x[target] = static_cast<int>(k);
        std::size_t col = 0;
        for (int i = 0; i < n; ++i) col = col * side + static_cast<std::size_t>(x[i]);
        sys.A[row * cols + col] = pred - static_cast<double>(k);
      }
      ++row;
    }
  }
  return sys;
}

struct FarkasCertificate {
  double y0 = 0.0;
  std::vector<double> y;  // length 2N+2 for n = 2
  int N = 0;
};

// Strict inequalities with margin > 1e-10:
// (a i - j + b) y_{i+1} + (-i + c j + d) y_{j+N+2} > 0 for all (i,j).
inline bool verify_certificate(const FarkasCertificate& cert, const LinearCESpec& spec) {
  if (spec.n != 2) throw parameter_error("verify_certificate: n = 2 only");
  const int N = cert.N;
  if (cert.y.size() != static_cast<std::size_t>(2 * N + 2)) return false;
  if (!(cert.y0 < 0.0)) return false;
  const double a = spec.a(), b = spec.b(), c = spec.c(), d = spec.d();
  for (int i = 0; i <= N; ++i)
    for (int j = 0; j <= N; ++j) {
      const double lhs =
          (a * i - j + b) * cert.y[i] + (-i + c * j + d) * cert.y[N + 1 + j];
      if (!(lhs > 1e-10)) return false;
    }
  return true;
}

using FeasibilityOutcome = std::variant<JointPMF, FarkasCertificate>;

inline FeasibilityOutcome solve_feasibility(const LinearCESpec& spec, int N) {
  LPSystem sys = build_lp_system(spec, N);
  Phase1Result r = phase1_simplex(sys.rows, sys.cols, sys.A, sys.rhs);

  if (r.feasible) {
    // Residual check against every equality row.
    double maxres = 0.0;
    for (std::size_t i = 0; i < sys.rows; ++i) {
      double acc = -sys.rhs[i];
      for (std::size_t j = 0; j < sys.cols; ++j) acc += sys.A[i * sys.cols + j] * r.x[j];
      maxres = std::max(maxres, std::fabs(acc));
    }
    if (maxres > 1e-8)
      throw numerical_failure_error("solve_feasibility: solution residual " +
                                    std::to_string(maxres));
    JointPMF jp(spec.n, N);
    for (std::size_t j = 0; j < sys.cols; ++j) jp.p[j] = std::max(0.0, r.x[j]);
    jp.recompute_mass();
    return jp;
  }

  // Infeasible: scale the phase-1 dual so the normalization component is -1;
  // the remaining components then satisfy the strict inequalities.
  if (spec.n != 2)
    throw numerical_failure_error("solve_feasibility: certificates implemented for n = 2 only");
  FarkasCertificate cert;
  cert.N = N;
  cert.y0 = -r.dual[0] / r.objective;
  cert.y.assign(r.dual.begin() + 1, r.dual.end());
  for (double& v : cert.y) v = -v / r.objective;
  if (!verify_certificate(cert, spec))
    throw numerical_failure_error("solve_feasibility: infeasible but certificate failed");
  return cert;
}

inline void write_certificate_csv(std::ostream& os, const FarkasCertificate& c) {
  os.precision(17);
  os << c.y0;
  for (double v : c.y) os << "," << v;
  os << "\n";
}

}  // namespace countcompat

#endif
