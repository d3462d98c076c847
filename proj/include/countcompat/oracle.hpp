#ifndef COUNTCOMPAT_ORACLE_HPP
#define COUNTCOMPAT_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <vector>

#include "countcompat/distributions.hpp"
#include "countcompat/errors.hpp"
#include "countcompat/joint_pmf.hpp"

// Brute-force ground truth: conditionals, conditional-expectation tables and
// affine-fit diagnostics computed directly from a truncated joint pmf.

namespace countcompat::oracle {

inline constexpr double kSliceMassFloor = 1e-13;

// Enumerate the grid of a tensor, decoding the flat index.
inline std::vector<int> decode(const JointPMF& j, std::size_t flat) {
  std::vector<int> x(j.n);
  for (int i = j.n - 1; i >= 0; --i) {
    x[i] = static_cast<int>(flat % j.side());
    flat /= j.side();
  }
  return x;
}

// Normalized slice of the tensor along `target` with the other coordinates
// fixed at `given` (length n-1, in coordinate order skipping target).
inline std::vector<double> conditional_pmf(const JointPMF& j, int target,
                                           const std::vector<int>& given) {
  std::vector<int> x(j.n);
  int g = 0;
  for (int i = 0; i < j.n; ++i)
    if (i != target) x[i] = given[g++];
  std::vector<double> slice(j.side());
  double mass = 0.0;
  for (int k = 0; k <= j.N; ++k) {
    x[target] = k;
    slice[k] = j.p[j.index(x)];
    mass += slice[k];
  }
  if (mass <= kSliceMassFloor)
    throw null_conditioning_error("conditional_pmf: conditioning slice has no mass");
  for (double& v : slice) v /= mass;
  return slice;
}

struct CERow {
  std::vector<int> config;  // values of the conditioning coordinates
  double mean = 0.0;
  double mass = 0.0;  // unnormalized slice mass
};

struct CETable {
  int target = 0;
  double threshold = 0.0;
  std::size_t skipped = 0;  // configurations below threshold
  std::vector<CERow> rows;
};

inline CETable conditional_expectation(const JointPMF& j, int target, double threshold = 1e-10) {
  CETable table;
  table.target = target;
  table.threshold = threshold;
  std::size_t nconf = 1;
  for (int i = 1; i < j.n; ++i) nconf *= j.side();
  std::vector<int> conf(j.n - 1, 0);
  std::vector<int> x(j.n, 0);
  for (std::size_t c = 0; c < nconf; ++c) {
    std::size_t rem = c;
    for (int i = j.n - 2; i >= 0; --i) {
      conf[i] = static_cast<int>(rem % j.side());
      rem /= j.side();
    }
    int g = 0;
    for (int i = 0; i < j.n; ++i)
      if (i != target) x[i] = conf[g++];
    double mass = 0.0, acc = 0.0;
    for (int k = 0; k <= j.N; ++k) {
      x[target] = k;
      const double p = j.p[j.index(x)];
      mass += p;
      acc += k * p;
    }
    if (mass <= threshold) {
      ++table.skipped;
      continue;
    }
    table.rows.push_back({conf, acc / mass, mass});
  }
  return table;
}

struct AffineFitReport {
  int target = 0;
  std::vector<double> slopes;  // one per conditioning coordinate, in order
  double intercept = 0.0;
  double max_abs_deviation = 0.0;
  double mass_covered = 0.0;
};

// Probability-weighted least-squares affine fit of the CE table; the
// deviation is taken over configurations covering mass >= 1-1e-6 so that
// truncation noise in the far tail cannot dominate.
inline AffineFitReport affine_deviation(const JointPMF& j, int target,
                                        double coverage = 1.0 - 1e-6) {
  CETable table = conditional_expectation(j, target);
  const int d = j.n - 1;
  if (static_cast<int>(table.rows.size()) < d + 1)
    throw underdetermined_fit_error("affine_deviation: fewer configurations than coefficients");

  // Normal equations for [intercept, slopes...].
  const int m = d + 1;
  std::vector<double> G(m * m, 0.0), r(m, 0.0);
  for (const CERow& row : table.rows) {
    std::vector<double> f(m, 1.0);
    for (int i = 0; i < d; ++i) f[i + 1] = row.config[i];
    for (int a = 0; a < m; ++a) {
      r[a] += row.mass * f[a] * row.mean;
      for (int b = 0; b < m; ++b) G[a * m + b] += row.mass * f[a] * f[b];
    }
  }
  // Gaussian elimination with partial pivoting.
  std::vector<double> sol(r);
  {
    std::vector<double> A(G);
    for (int col = 0; col < m; ++col) {
      int piv = col;
      for (int row = col + 1; row < m; ++row)
        if (std::fabs(A[row * m + col]) > std::fabs(A[piv * m + col])) piv = row;
      if (std::fabs(A[piv * m + col]) < 1e-14)
        throw underdetermined_fit_error("affine_deviation: singular normal equations");
      if (piv != col) {
        for (int k = 0; k < m; ++k) std::swap(A[col * m + k], A[piv * m + k]);
        std::swap(sol[col], sol[piv]);
      }
      for (int row = col + 1; row < m; ++row) {
        const double f = A[row * m + col] / A[col * m + col];
        for (int k = col; k < m; ++k) A[row * m + k] -= f * A[col * m + k];
        sol[row] -= f * sol[col];
      }
    }
    for (int row = m - 1; row >= 0; --row) {
      for (int k = row + 1; k < m; ++k) sol[row] -= A[row * m + k] * sol[k];
      sol[row] /= A[row * m + row];
    }
  }

  AffineFitReport rep;
  rep.target = target;
  rep.intercept = sol[0];
  rep.slopes.assign(sol.begin() + 1, sol.end());

  double total = 0.0;
  for (const CERow& row : table.rows) total += row.mass;
  std::vector<std::size_t> order(table.rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return table.rows[a].mass > table.rows[b].mass; });
  double acc = 0.0;
  for (std::size_t idx : order) {
    if (acc >= coverage * total) break;
    const CERow& row = table.rows[idx];
    acc += row.mass;
    double fit = rep.intercept;
    for (int i = 0; i < d; ++i) fit += rep.slopes[i] * row.config[i];
    rep.max_abs_deviation = std::max(rep.max_abs_deviation, std::fabs(row.mean - fit));
  }
  rep.mass_covered = acc / std::max(total, 1e-300);
  return rep;
}

struct Moments {
  std::vector<double> mean;
  std::vector<double> cov;  // n*n row-major
};

inline Moments moments(const JointPMF& j) {
  Moments m;
  m.mean.assign(j.n, 0.0);
  m.cov.assign(j.n * j.n, 0.0);
  const double mass = j.mass > 0.0 ? j.mass : 1.0;
  std::vector<int> x(j.n);
  for (std::size_t flat = 0; flat < j.p.size(); ++flat) {
    const double p = j.p[flat];
    if (p == 0.0) continue;
    std::size_t rem = flat;
    for (int i = j.n - 1; i >= 0; --i) {
      x[i] = static_cast<int>(rem % j.side());
      rem /= j.side();
    }
    for (int i = 0; i < j.n; ++i) {
      m.mean[i] += p * x[i];
      for (int k = 0; k < j.n; ++k) m.cov[i * j.n + k] += p * x[i] * x[k];
    }
  }
  for (double& v : m.mean) v /= mass;
  for (int i = 0; i < j.n; ++i)
    for (int k = 0; k < j.n; ++k) m.cov[i * j.n + k] = m.cov[i * j.n + k] / mass - m.mean[i] * m.mean[k];
  return m;
}

inline double correlation(const Moments& m, int i, int k) {
  return m.cov[i * m.mean.size() + k] /
         std::sqrt(m.cov[i * m.mean.size() + i] * m.cov[k * m.mean.size() + k]);
}

// ---------------------------------------------------------------------------
// Counter-example tensors, built by direct convolution over the independent
// Poisson components (exact up to truncation).

// X = W1+W12+W13, Y = W2+W12+W23, Z = W3+W13+W23.
inline JointPMF build_pairwise_overlap_poisson(double l1, double l2, double l3, double l12,
                                               double l13, double l23, int N) {
  for (double l : {l1, l2, l3, l12, l13, l23})
    if (!(l > 0.0)) throw parameter_error("pairwise overlap model: rates must be > 0");
  std::vector<double> q1(N + 1), q2(N + 1), q3(N + 1), q12(N + 1), q13(N + 1), q23(N + 1);
  for (int k = 0; k <= N; ++k) {
    q1[k] = pmf_eval(Poisson{l1}, k);
    q2[k] = pmf_eval(Poisson{l2}, k);
    q3[k] = pmf_eval(Poisson{l3}, k);
    q12[k] = pmf_eval(Poisson{l12}, k);
    q13[k] = pmf_eval(Poisson{l13}, k);
    q23[k] = pmf_eval(Poisson{l23}, k);
  }
  JointPMF j(3, N);
  for (int x = 0; x <= N; ++x)
    for (int y = 0; y <= N; ++y)
      for (int z = 0; z <= N; ++z) {
        double s = 0.0;
        for (int w12 = 0; w12 <= std::min(x, y); ++w12)
          for (int w13 = 0; w13 <= std::min(x - w12, z); ++w13)
            for (int w23 = 0; w23 <= std::min(y - w12, z - w13); ++w23)
              s += q12[w12] * q13[w13] * q23[w23] * q1[x - w12 - w13] * q2[y - w12 - w23] *
                   q3[z - w13 - w23];
        j.at3(x, y, z) = s;
      }
  j.recompute_mass();
  return j;
}

// X = W1+W, Y = W2+W, Z = W3+W with a single common component W.
inline JointPMF build_common_component_poisson(double l1, double l2, double l3, double lc, int N) {
  for (double l : {l1, l2, l3, lc})
    if (!(l > 0.0)) throw parameter_error("common component model: rates must be > 0");
  std::vector<double> q1(N + 1), q2(N + 1), q3(N + 1), qc(N + 1);
  for (int k = 0; k <= N; ++k) {
    q1[k] = pmf_eval(Poisson{l1}, k);
    q2[k] = pmf_eval(Poisson{l2}, k);
    q3[k] = pmf_eval(Poisson{l3}, k);
    qc[k] = pmf_eval(Poisson{lc}, k);
  }
  JointPMF j(3, N);
  for (int x = 0; x <= N; ++x)
    for (int y = 0; y <= N; ++y)
      for (int z = 0; z <= N; ++z) {
        double s = 0.0;
        for (int w = 0; w <= std::min({x, y, z}); ++w)
          s += qc[w] * q1[x - w] * q2[y - w] * q3[z - w];
        j.at3(x, y, z) = s;
      }
  j.recompute_mass();
  return j;
}

inline void write_ce_csv(std::ostream& os, const CETable& t) {
  os.precision(17);
  for (const CERow& r : t.rows) {
    for (int v : r.config) os << v << ",";
    os << r.mean << "," << r.mass << "\n";
  }
}

}  // namespace countcompat::oracle

#endif
