#ifndef COUNTCOMPAT_FAMILIES_HPP
#define COUNTCOMPAT_FAMILIES_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "countcompat/distributions.hpp"
#include "countcompat/errors.hpp"
#include "countcompat/joint_pmf.hpp"
#include "countcompat/series.hpp"

// Constructors for every compatible joint distribution the theory identifies.
// Each returns the dense pmf tensor together with the affine
// conditional-expectation coefficients the model predicts, so the oracle can
// verify them independently.

namespace countcompat {

// Affine conditional-mean prediction E[X_i | rest] = b[i] + sum_j A[i][j] X_j.
// valid[i] is false where the model predicts a non-affine conditional mean.
struct CEPrediction {
  int n = 0;
  std::vector<double> A;  // n*n row-major, zero diagonal
  std::vector<double> b;
  std::vector<bool> valid;

  explicit CEPrediction(int dim) : n(dim), A(dim * dim, 0.0), b(dim, 0.0), valid(dim, true) {}
  double slope(int i, int j) const { return A[i * n + j]; }
  void set_slope(int i, int j, double v) { A[i * n + j] = v; }
};

struct FamilyResult {
  JointPMF pmf;
  CEPrediction ce;
};

inline int default_bound(const std::vector<double>& means, const std::vector<double>& sds) {
  double m = 0.0, s = 0.0;
  for (double v : means) m += v;
  for (double v : sds) s += v;
  int N = static_cast<int>(std::ceil(m + 12.0 * s));
  return std::max(N, 8);
}

// ---------------------------------------------------------------------------
// Trivariate Poisson reduction: (X, Y) = (Z0+Z1, Z0+Z2).

struct TrivariatePoissonParams {
  double lambda0, lambda1, lambda2;
};

inline FamilyResult build_trivariate_poisson(double lambda0, double lambda1, double lambda2,
                                             int N = -1) {
  if (!(lambda0 > 0.0 && lambda1 > 0.0 && lambda2 > 0.0))
    throw parameter_error("build_trivariate_poisson: rates must be > 0");
  const double mx = lambda0 + lambda1, my = lambda0 + lambda2;
  if (N < 0) N = default_bound({mx, my}, {std::sqrt(mx), std::sqrt(my)});

  std::vector<double> p0(N + 1), p1(N + 1), p2(N + 1);
  for (int k = 0; k <= N; ++k) {
    p0[k] = pmf_eval(Poisson{lambda0}, k);
    p1[k] = pmf_eval(Poisson{lambda1}, k);
    p2[k] = pmf_eval(Poisson{lambda2}, k);
  }
  FamilyResult out{JointPMF(2, N), CEPrediction(2)};
  for (int x = 0; x <= N; ++x)
    for (int y = 0; y <= N; ++y) {
      double s = 0.0;
      for (int z = 0; z <= std::min(x, y); ++z) s += p0[z] * p1[x - z] * p2[y - z];
      out.pmf.at2(x, y) = s;
    }
  out.pmf.recompute_mass();

  const double alpha = lambda0 / (lambda0 + lambda2);  // E[X|Y] slope
  const double beta = lambda0 / (lambda0 + lambda1);   // E[Y|X] slope
  out.ce.set_slope(0, 1, alpha);
  out.ce.b[0] = lambda1;
  out.ce.set_slope(1, 0, beta);
  out.ce.b[1] = lambda2;
  return out;
}

// ---------------------------------------------------------------------------
// Poisson-gamma conjugacy (negative multinomial), any dimension n >= 2.

struct PoissonGammaParams {
  double alpha, beta;
  std::vector<double> lambdas;
};

inline FamilyResult build_poisson_gamma(double alpha, double beta,
                                        const std::vector<double>& lambdas, int N = -1) {
  const int n = static_cast<int>(lambdas.size());
  if (n < 2) throw parameter_error("build_poisson_gamma: need n >= 2");
  if (!(alpha > 0.0 && beta > 0.0))
    throw parameter_error("build_poisson_gamma: alpha, beta must be > 0");
  double lsum = 0.0;
  for (double l : lambdas) {
    if (l < 0.0) throw parameter_error("build_poisson_gamma: lambdas must be >= 0");
    lsum += l;
  }
  if (!(lsum > 0.0)) throw parameter_error("build_poisson_gamma: some lambda must be > 0");

  if (N < 0) {
    std::vector<double> means, sds;
    for (double l : lambdas) {
      const double m = l * alpha / beta;
      means.push_back(m);
      sds.push_back(std::sqrt(std::max(m * (1.0 + l / beta), 1e-12)));
    }
    N = default_bound(means, sds);
  }

  FamilyResult out{JointPMF(n, N), CEPrediction(n)};
  const double logc = alpha * std::log(beta) - std::lgamma(alpha);
  const double logtot = std::log(beta + lsum);
  std::vector<int> x(n, 0);
  for (std::size_t flat = 0; flat < out.pmf.p.size(); ++flat) {
    std::size_t rem = flat;
    long total = 0;
    double logp = logc;
    bool zero = false;
    for (int i = n - 1; i >= 0; --i) {
      x[i] = static_cast<int>(rem % out.pmf.side());
      rem /= out.pmf.side();
    }
    for (int i = 0; i < n; ++i) {
      total += x[i];
      if (x[i] > 0) {
        if (lambdas[i] == 0.0) {
          zero = true;
          break;
        }
        logp += x[i] * std::log(lambdas[i]) - std::lgamma(x[i] + 1.0);
      }
    }
    if (zero) continue;
    logp += std::lgamma(alpha + total) - (alpha + total) * logtot;
    out.pmf.p[flat] = std::exp(logp);
  }
  out.pmf.recompute_mass();

  for (int i = 0; i < n; ++i) {
    const double denom = beta + (lsum - lambdas[i]);
    for (int j = 0; j < n; ++j)
      if (j != i) out.ce.set_slope(i, j, lambdas[i] / denom);
    out.ce.b[i] = lambdas[i] * alpha / denom;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Theorem-2 case-ii family (NB margins, theta-ratio thinning).

struct ThetaFamilyParams {
  double delta;
  double theta1, theta2, theta3, theta4;
};

inline void validate(const ThetaFamilyParams& p) {
  if (!(p.delta > 0.0)) throw incompatible_parameters_error("theta family: delta must be > 0");
  if (!(p.theta1 > 0.0 && p.theta3 > 0.0))
    throw incompatible_parameters_error("theta family: theta1, theta3 must be > 0");
  if (!(p.theta2 > -1.0 && p.theta2 < p.theta1))
    throw incompatible_parameters_error("theta family: requires theta2 in (-1, theta1)");
  if (!(p.theta4 > -1.0 && p.theta4 < p.theta3))
    throw incompatible_parameters_error("theta family: requires theta4 in (-1, theta3)");
  const double lhs = p.theta4 * (p.theta1 + p.theta3 * (p.theta1 - p.theta2));
  const double rhs = p.theta2 * (p.theta3 + p.theta1 * (p.theta3 - p.theta4));
  const double scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
  if (std::fabs(lhs - rhs) > 1e-12 * scale)
    throw incompatible_parameters_error(
        "theta family: cross-product constraint theta4[th1+th3(th1-th2)] = theta2[th3+th1(th3-th4)] "
        "violated by " +
        std::to_string(lhs - rhs));
  if (!((p.theta1 - p.theta2) * (p.theta3 - p.theta4) < 1.0))
    throw incompatible_parameters_error(
        "theta family: requires (theta1-theta2)(theta3-theta4) < 1");
  if ((p.theta2 > 0.0) != (p.theta4 > 0.0) && !(p.theta2 == 0.0 && p.theta4 == 0.0))
    throw incompatible_parameters_error("theta family: theta2 and theta4 must share sign");
}

// Marginal NB overdispersion parameters of the family.
inline void theta_family_margins(const ThetaFamilyParams& p, double& lambda_x, double& lambda_y) {
  const double denom = 1.0 - (p.theta1 - p.theta2) * (p.theta3 - p.theta4);
  lambda_x = (p.theta1 + p.theta3 * (p.theta1 - p.theta2)) / denom;
  lambda_y = (p.theta3 + p.theta1 * (p.theta3 - p.theta4)) / denom;
}

inline FamilyResult build_theta_family(const ThetaFamilyParams& prm, int N = -1) {
  validate(prm);
  double lx, ly;
  theta_family_margins(prm, lx, ly);
  const double denom = 1.0 - (prm.theta1 - prm.theta2) * (prm.theta3 - prm.theta4);
  const double kappa = prm.theta4 * (prm.theta1 + prm.theta3 * (prm.theta1 - prm.theta2)) / denom;

  if (N < 0) {
    const double mx = prm.delta * lx, my = prm.delta * ly;
    N = default_bound({mx, my},
                      {std::sqrt(mx * (1.0 + lx)), std::sqrt(my * (1.0 + ly))});
  }

  // Joint pgf denominator 1 + lx(1-u) + ly(1-v) + kappa(1-u)(1-v).
  BivariateSeries base(static_cast<std::size_t>(N));
  base.at(0, 0) = 1.0 + lx + ly + kappa;
  if (N >= 1) {
    base.at(1, 0) = -(lx + kappa);
    base.at(0, 1) = -(ly + kappa);
    base.at(1, 1) = kappa;
  }
  BivariateSeries g = bivariate_real_power(base, -prm.delta);

  FamilyResult out{JointPMF(2, N), CEPrediction(2)};
  for (int x = 0; x <= N; ++x)
    for (int y = 0; y <= N; ++y) {
      double v = g.at(x, y);
      if (v < -1e-10)
        throw numerical_failure_error("build_theta_family: negative pgf coefficient");
      out.pmf.at2(x, y) = std::max(v, 0.0);
    }
  out.pmf.recompute_mass();

  out.ce.set_slope(0, 1, prm.theta1 - prm.theta2);
  out.ce.b[0] = prm.delta * prm.theta1;
  out.ce.set_slope(1, 0, prm.theta3 - prm.theta4);
  out.ce.b[1] = prm.delta * prm.theta3;
  return out;
}

// ---------------------------------------------------------------------------
// Trivariate NB reduction: (X, Y) = (Z+eps, Z+eta).

struct TrivariateNBParams {
  double alpha, beta1, beta2, theta;  // theta = common probability parameter
};

inline FamilyResult build_trivariate_nb(double alpha, double beta1, double beta2, double theta,
                                        int N = -1) {
  if (!(alpha > 0.0 && beta1 > 0.0 && beta2 > 0.0))
    throw parameter_error("build_trivariate_nb: alpha, beta1, beta2 must be > 0");
  if (!(theta > 0.0 && theta < 1.0))
    throw parameter_error("build_trivariate_nb: theta must be in (0,1)");
  const double q = (1.0 - theta) / theta;
  if (N < 0) {
    const double mx = (alpha + beta1) * q, my = (alpha + beta2) * q;
    N = default_bound({mx, my}, {std::sqrt(mx / theta), std::sqrt(my / theta)});
  }
  std::vector<double> pz(N + 1), pe(N + 1), ph(N + 1);
  for (int k = 0; k <= N; ++k) {
    pz[k] = pmf_eval(NegBinomial{alpha, theta}, k);
    pe[k] = pmf_eval(NegBinomial{beta1, theta}, k);
    ph[k] = pmf_eval(NegBinomial{beta2, theta}, k);
  }
  FamilyResult out{JointPMF(2, N), CEPrediction(2)};
  for (int x = 0; x <= N; ++x)
    for (int y = 0; y <= N; ++y) {
      double s = 0.0;
      for (int z = 0; z <= std::min(x, y); ++z) s += pz[z] * pe[x - z] * ph[y - z];
      out.pmf.at2(x, y) = s;
    }
  out.pmf.recompute_mass();

  out.ce.set_slope(0, 1, alpha / (alpha + beta2));
  out.ce.b[0] = beta1 * q;
  out.ce.set_slope(1, 0, alpha / (alpha + beta1));
  out.ce.b[1] = beta2 * q;
  return out;
}

// ---------------------------------------------------------------------------
// Beta-NB conjugacy.

inline FamilyResult build_beta_nb(double r1, double r2, double alpha1, double alpha2, int N = -1,
                                  bool with_ce = true) {
  if (!(r1 > 0.0 && r2 > 0.0 && alpha1 > 0.0 && alpha2 > 0.0))
    throw parameter_error("build_beta_nb: parameters must be > 0");
  if (with_ce && !(alpha1 + std::min(r1, r2) > 1.0))
    throw moment_divergence_error(
        "build_beta_nb: conditional means undefined, need alpha1 + min(r1,r2) > 1");
  if (N < 0) {
    if (!(alpha1 > 2.0))
      throw parameter_error("build_beta_nb: explicit N required when alpha1 <= 2");
    const double m1 = mean_of(BetaNB{r1, alpha1, alpha2});
    const double m2 = mean_of(BetaNB{r2, alpha1, alpha2});
    N = default_bound({m1, m2}, {std::sqrt(variance_of(BetaNB{r1, alpha1, alpha2})),
                                 std::sqrt(variance_of(BetaNB{r2, alpha1, alpha2}))});
  }
  FamilyResult out{JointPMF(2, N), CEPrediction(2)};
  const double lb0 = log_beta_fn(alpha1, alpha2);
  for (int x = 0; x <= N; ++x)
    for (int y = 0; y <= N; ++y) {
      const double lp = log_binom(x + r1 - 1.0, x) + log_binom(y + r2 - 1.0, y) +
                        log_beta_fn(alpha1 + r1 + r2, alpha2 + x + y) - lb0;
      out.pmf.at2(x, y) = std::exp(lp);
    }
  out.pmf.recompute_mass();

  if (with_ce) {
    out.ce.set_slope(0, 1, r1 / (alpha1 + r2 - 1.0));
    out.ce.b[0] = r1 * alpha2 / (alpha1 + r2 - 1.0);
    out.ce.set_slope(1, 0, r2 / (alpha1 + r1 - 1.0));
    out.ce.b[1] = r2 * alpha2 / (alpha1 + r1 - 1.0);
  } else {
    out.ce.valid[0] = out.ce.valid[1] = false;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Multinomial mix: (X, Y) = (Z1, Z1+Z3) with (Z1,Z2,Z3) ~ Mult(size; p1,p2,p3).

inline FamilyResult build_multinomial_mix(int size, double p1, double p2, double p3) {
  if (size <= 0) throw parameter_error("build_multinomial_mix: size must be > 0");
  if (!(p1 > 0.0 && p2 > 0.0 && p3 > 0.0) || std::fabs(p1 + p2 + p3 - 1.0) > 1e-12)
    throw parameter_error("build_multinomial_mix: probabilities must be positive and sum to 1");
  FamilyResult out{JointPMF(2, size), CEPrediction(2)};
  const double lsz = std::lgamma(size + 1.0);
  for (int x = 0; x <= size; ++x)
    for (int y = x; y <= size; ++y) {
      const int z3 = y - x, z2 = size - y;
      const double lp = lsz - std::lgamma(x + 1.0) - std::lgamma(z2 + 1.0) -
                        std::lgamma(z3 + 1.0) + x * std::log(p1) + z2 * std::log(p2) +
                        z3 * std::log(p3);
      out.pmf.at2(x, y) = std::exp(lp);
    }
  out.pmf.recompute_mass();

  out.ce.set_slope(0, 1, p1 / (p1 + p3));
  out.ce.b[0] = 0.0;
  out.ce.set_slope(1, 0, p2 / (p2 + p3));
  out.ce.b[1] = p3 / (p2 + p3) * size;
  return out;
}

// Full joint-mix tensor (Z1, Z2, Z3): regression coefficients all -1.
inline FamilyResult build_multinomial_joint(int size, double p1, double p2, double p3) {
  if (size <= 0) throw parameter_error("build_multinomial_joint: size must be > 0");
  if (!(p1 > 0.0 && p2 > 0.0 && p3 > 0.0) || std::fabs(p1 + p2 + p3 - 1.0) > 1e-12)
    throw parameter_error("build_multinomial_joint: probabilities must be positive and sum to 1");
  FamilyResult out{JointPMF(3, size), CEPrediction(3)};
  const double lsz = std::lgamma(size + 1.0);
  for (int z1 = 0; z1 <= size; ++z1)
    for (int z2 = 0; z1 + z2 <= size; ++z2) {
      const int z3 = size - z1 - z2;
      const double lp = lsz - std::lgamma(z1 + 1.0) - std::lgamma(z2 + 1.0) -
                        std::lgamma(z3 + 1.0) + z1 * std::log(p1) + z2 * std::log(p2) +
                        z3 * std::log(p3);
      out.pmf.at3(z1, z2, z3) = std::exp(lp);
    }
  out.pmf.recompute_mass();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j)
      if (i != j) out.ce.set_slope(i, j, -1.0);
    out.ce.b[i] = static_cast<double>(size);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Causal-chain model exposed as the (X, N, Y) tensor; X, Y conditionally
// independent given N.  E[N | X, Y] is deliberately non-affine.

struct MarkovChainParams {
  double delta;
  double p0, p1, p2;
};

inline void validate(const MarkovChainParams& p) {
  if (!(p.delta > 0.0)) throw parameter_error("markov chain: delta must be > 0");
  for (double q : {p.p0, p.p1, p.p2})
    if (!(q > 0.0 && q < 1.0))
      throw parameter_error("markov chain: probabilities must be strictly inside (0,1)");
}

inline FamilyResult build_markov_chain_xyn(const MarkovChainParams& prm, int N = -1) {
  validate(prm);
  if (N < 0) {
    const double mn = prm.delta * (1.0 - prm.p0) / prm.p0;
    const double mx = (prm.delta + mn) * (1.0 - prm.p1) / prm.p1;
    const double my = (prm.delta + mn) * (1.0 - prm.p2) / prm.p2;
    N = default_bound({mx, mn, my}, {std::sqrt(mx / prm.p1 + 1.0), std::sqrt(mn / prm.p0),
                                     std::sqrt(my / prm.p2 + 1.0)});
  }
  FamilyResult out{JointPMF(3, N), CEPrediction(3)};
  for (int n = 0; n <= N; ++n) {
    const double pn = pmf_eval(NegBinomial{prm.delta, prm.p0}, n);
    for (int x = 0; x <= N; ++x) {
      const double px = pmf_eval(NegBinomial{prm.delta + n, prm.p1}, x);
      for (int y = 0; y <= N; ++y)
        out.pmf.at3(x, n, y) = pn * px * pmf_eval(NegBinomial{prm.delta + n, prm.p2}, y);
    }
  }
  out.pmf.recompute_mass();

  // Coordinates: 0 = X, 1 = N, 2 = Y.  E[X|N,Y] and E[Y|N,X] are affine in N;
  // E[N|X,Y] is not.
  out.ce.set_slope(0, 1, (1.0 - prm.p1) / prm.p1);
  out.ce.b[0] = prm.delta * (1.0 - prm.p1) / prm.p1;
  out.ce.set_slope(2, 1, (1.0 - prm.p2) / prm.p2);
  out.ce.b[2] = prm.delta * (1.0 - prm.p2) / prm.p2;
  out.ce.valid[1] = false;
  return out;
}

}  // namespace countcompat

#endif
