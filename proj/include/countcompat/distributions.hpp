#ifndef COUNTCOMPAT_DISTRIBUTIONS_HPP
#define COUNTCOMPAT_DISTRIBUTIONS_HPP

#include <cmath>
#include <string>
#include <variant>

#include "countcompat/errors.hpp"
#include "countcompat/series.hpp"

// Parametric count-distribution catalogue: every marginal, innovation and
// thinning law used by the family constructors and compatibility checkers.

namespace countcompat {

inline double log_binom(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

inline double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

struct Poisson {
  double lambda;
};

// pmf(k) = C(k+r-1,k) p^r (1-p)^k; theta = (1-p)/p is the paper's
// overdispersion parameter.
struct NegBinomial {
  double r;
  double p;
};

struct Geometric {
  double p;  // = NegBinomial(1, p)
};

struct Bernoulli {
  double p;
};

// pgf (1 + theta_num (1-u)) / (1 + theta_den (1-u)).  For theta_num in
// (0, theta_den): zero-inflated geometric; for theta_num in (-1, 0):
// Bernoulli(-theta_num) + geometric convolution; theta_num = 0: geometric.
struct ThetaRatio {
  double theta_num;
  double theta_den;
};

struct BetaNB {
  double r;
  double alpha1;
  double alpha2;
};

struct Degenerate {
  long k;
};

using CountDistribution =
    std::variant<Poisson, NegBinomial, Geometric, Bernoulli, ThetaRatio, BetaNB, Degenerate>;

inline void validate(const CountDistribution& d) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Poisson>) {
          if (!(v.lambda > 0.0)) throw parameter_error("Poisson: lambda must be > 0");
        } else if constexpr (std::is_same_v<T, NegBinomial>) {
          if (!(v.r > 0.0)) throw parameter_error("NegBinomial: r must be > 0");
          if (!(v.p > 0.0 && v.p < 1.0)) throw parameter_error("NegBinomial: p must be in (0,1)");
        } else if constexpr (std::is_same_v<T, Geometric>) {
          if (!(v.p > 0.0 && v.p < 1.0)) throw parameter_error("Geometric: p must be in (0,1)");
        } else if constexpr (std::is_same_v<T, Bernoulli>) {
          if (!(v.p >= 0.0 && v.p <= 1.0)) throw parameter_error("Bernoulli: p must be in [0,1]");
        } else if constexpr (std::is_same_v<T, ThetaRatio>) {
          if (!(v.theta_den > 0.0)) throw parameter_error("ThetaRatio: theta_den must be > 0");
          if (!(v.theta_num > -1.0)) throw parameter_error("ThetaRatio: theta_num must be > -1");
          if (!(v.theta_den > v.theta_num))
            throw parameter_error("ThetaRatio: requires theta_den > theta_num");
        } else if constexpr (std::is_same_v<T, BetaNB>) {
          if (!(v.r > 0.0 && v.alpha1 > 0.0 && v.alpha2 > 0.0))
            throw parameter_error("BetaNB: parameters must be > 0");
        } else if constexpr (std::is_same_v<T, Degenerate>) {
          if (v.k < 0) throw parameter_error("Degenerate: k must be >= 0");
        }
      },
      d);
}

inline double pmf_eval(const CountDistribution& d, long k) {
  validate(d);
  if (k < 0) return 0.0;
  const double kd = static_cast<double>(k);
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Poisson>) {
          return std::exp(-v.lambda + kd * std::log(v.lambda) - std::lgamma(kd + 1.0));
        } else if constexpr (std::is_same_v<T, NegBinomial>) {
          return std::exp(log_binom(kd + v.r - 1.0, kd) + v.r * std::log(v.p) +
                          kd * std::log1p(-v.p));
        } else if constexpr (std::is_same_v<T, Geometric>) {
          return std::exp(std::log(v.p) + kd * std::log1p(-v.p));
        } else if constexpr (std::is_same_v<T, Bernoulli>) {
          if (k == 0) return 1.0 - v.p;
          if (k == 1) return v.p;
          return 0.0;
        } else if constexpr (std::is_same_v<T, ThetaRatio>) {
          // (1 + tn - tn u) * geometric(1/(1+td)): pmf(k) = (1+tn) g(k) - tn g(k-1)
          const double td = v.theta_den, tn = v.theta_num;
          const double g = std::exp(-std::log1p(td) + kd * (std::log(td) - std::log1p(td)));
          const double gm1 =
              k == 0 ? 0.0
                     : std::exp(-std::log1p(td) + (kd - 1.0) * (std::log(td) - std::log1p(td)));
          return (1.0 + tn) * g - tn * gm1;
        } else if constexpr (std::is_same_v<T, BetaNB>) {
          return std::exp(log_binom(kd + v.r - 1.0, kd) +
                          log_beta_fn(v.alpha1 + v.r, v.alpha2 + kd) -
                          log_beta_fn(v.alpha1, v.alpha2));
        } else {
          return k == v.k ? 1.0 : 0.0;
        }
      },
      d);
}

// Taylor coefficients of the pgf at 0 up to order K.  Built through series
// arithmetic where the pgf has rational closed form, so the round trip
// against pmf_eval is a genuine cross-check.
inline TruncatedSeries pgf_series_of(const CountDistribution& d, std::size_t K) {
  validate(d);
  return std::visit(
      [&](const auto& v) -> TruncatedSeries {
        using T = std::decay_t<decltype(v)>;
        TruncatedSeries s(K);
        if constexpr (std::is_same_v<T, Poisson>) {
          // exp(lambda(u-1)) expanded by its ODE recurrence s' = lambda s.
          s[0] = std::exp(-v.lambda);
          for (std::size_t n = 1; n <= K; ++n) s[n] = s[n - 1] * v.lambda / n;
          return s;
        } else if constexpr (std::is_same_v<T, NegBinomial>) {
          const double theta = (1.0 - v.p) / v.p;
          TruncatedSeries den(K);
          den[0] = 1.0 + theta;
          if (K >= 1) den[1] = -theta;
          return series_real_power(den, -v.r);
        } else if constexpr (std::is_same_v<T, Geometric>) {
          return pgf_series_of(NegBinomial{1.0, v.p}, K);
        } else if constexpr (std::is_same_v<T, Bernoulli>) {
          s[0] = 1.0 - v.p;
          if (K >= 1) s[1] = v.p;
          return s;
        } else if constexpr (std::is_same_v<T, ThetaRatio>) {
          TruncatedSeries num(K), den(K);
          num[0] = 1.0 + v.theta_num;
          if (K >= 1) num[1] = -v.theta_num;
          den[0] = 1.0 + v.theta_den;
          if (K >= 1) den[1] = -v.theta_den;
          return series_mul(num, series_real_power(den, -1.0));
        } else if constexpr (std::is_same_v<T, BetaNB>) {
          // No rational pgf; the Taylor coefficients are the pmf itself.
          for (std::size_t n = 0; n <= K; ++n) s[n] = pmf_eval(d, static_cast<long>(n));
          return s;
        } else {
          if (static_cast<std::size_t>(v.k) <= K) s[v.k] = 1.0;
          return s;
        }
      },
      d);
}

inline double mean_of(const CountDistribution& d) {
  validate(d);
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Poisson>) {
          return v.lambda;
        } else if constexpr (std::is_same_v<T, NegBinomial>) {
          return v.r * (1.0 - v.p) / v.p;
        } else if constexpr (std::is_same_v<T, Geometric>) {
          return (1.0 - v.p) / v.p;
        } else if constexpr (std::is_same_v<T, Bernoulli>) {
          return v.p;
        } else if constexpr (std::is_same_v<T, ThetaRatio>) {
          return v.theta_den - v.theta_num;
        } else if constexpr (std::is_same_v<T, BetaNB>) {
          if (!(v.alpha1 > 1.0))
            throw moment_divergence_error("BetaNB mean requires alpha1 > 1");
          return v.r * v.alpha2 / (v.alpha1 - 1.0);
        } else {
          return static_cast<double>(v.k);
        }
      },
      d);
}

// Variance where a closed form exists; throws where the moment diverges.
inline double variance_of(const CountDistribution& d) {
  validate(d);
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Poisson>) {
          return v.lambda;
        } else if constexpr (std::is_same_v<T, NegBinomial>) {
          return v.r * (1.0 - v.p) / (v.p * v.p);
        } else if constexpr (std::is_same_v<T, Geometric>) {
          return (1.0 - v.p) / (v.p * v.p);
        } else if constexpr (std::is_same_v<T, Bernoulli>) {
          return v.p * (1.0 - v.p);
        } else if constexpr (std::is_same_v<T, ThetaRatio>) {
          const double m = v.theta_den - v.theta_num;
          return 2.0 * v.theta_den * m + m - m * m;
        } else if constexpr (std::is_same_v<T, BetaNB>) {
          if (!(v.alpha1 > 2.0))
            throw moment_divergence_error("BetaNB variance requires alpha1 > 2");
          const double a1 = v.alpha1, a2 = v.alpha2, r = v.r;
          return r * a2 * (r + a1 - 1.0) * (a2 + a1 - 1.0) / ((a1 - 1.0) * (a1 - 1.0) * (a1 - 2.0));
        } else {
          return 0.0;
        }
      },
      d);
}

inline std::string describe(const CountDistribution& d) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Poisson>) {
          return "poisson(" + std::to_string(v.lambda) + ")";
        } else if constexpr (std::is_same_v<T, NegBinomial>) {
          return "negbinomial(" + std::to_string(v.r) + "," + std::to_string(v.p) + ")";
        } else if constexpr (std::is_same_v<T, Geometric>) {
          return "geometric(" + std::to_string(v.p) + ")";
        } else if constexpr (std::is_same_v<T, Bernoulli>) {
          return "bernoulli(" + std::to_string(v.p) + ")";
        } else if constexpr (std::is_same_v<T, ThetaRatio>) {
          return "thetaratio(" + std::to_string(v.theta_num) + "," + std::to_string(v.theta_den) + ")";
        } else if constexpr (std::is_same_v<T, BetaNB>) {
          return "betanb(" + std::to_string(v.r) + "," + std::to_string(v.alpha1) + "," +
                 std::to_string(v.alpha2) + ")";
        } else {
          return "degenerate(" + std::to_string(v.k) + ")";
        }
      },
      d);
}

}  // namespace countcompat

#endif
