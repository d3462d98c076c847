#ifndef COUNTCOMPAT_RNG_HPP
#define COUNTCOMPAT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <variant>

#include "countcompat/distributions.hpp"
#include "countcompat/errors.hpp"

// Deterministic sampling utilities.  A small counter-based generator keeps
// every stream reproducible across platforms for a fixed (seed, stream)
// pair, independent of call interleaving elsewhere.

namespace countcompat {

struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    state = mix(mix(seed) ^ mix(stream * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull));
    if (state == 0) state = 0x4d595df4d0f33173ull;
  }

  static std::uint64_t mix(std::uint64_t z) {  // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t next_u64() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in (0,1), never exactly 0 or 1.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  double normal() {  // Box-Muller, one value per pair of uniforms
    const double u = uniform(), v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
  }
};

inline long sample_poisson(Rng& g, double lambda) {
  if (!(lambda > 0.0)) throw parameter_error("sample_poisson: lambda must be > 0");
  if (lambda < 30.0) {
    // Inversion by sequential search.
    const double L = std::exp(-lambda);
    long k = 0;
    double prod = g.uniform();
    while (prod > L) {
      prod *= g.uniform();
      ++k;
    }
    return k;
  }
  // PTRS transformed rejection (Hormann).
  const double b = 0.931 + 2.53 * std::sqrt(lambda);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = g.uniform() - 0.5;
    const double v = g.uniform();
    const double us = 0.5 - std::fabs(u);
    const long k = static_cast<long>(std::floor((2.0 * a / us + b) * u + lambda + 0.43));
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    const double rhs = -lambda + k * std::log(lambda) - std::lgamma(k + 1.0);
    if (lhs <= rhs) return k;
  }
}

inline double sample_gamma(Rng& g, double shape) {
  if (!(shape > 0.0)) throw parameter_error("sample_gamma: shape must be > 0");
  if (shape < 1.0) {
    // Boost to shape+1 and scale back (Marsaglia-Tsang trick).
    const double u = g.uniform();
    return sample_gamma(g, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = g.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = g.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

inline double sample_beta(Rng& g, double a, double b) {
  const double x = sample_gamma(g, a);
  const double y = sample_gamma(g, b);
  return x / (x + y);
}

inline long sample_geometric(Rng& g, double p) {
  if (!(p > 0.0 && p < 1.0)) throw parameter_error("sample_geometric: p must be in (0,1)");
  return static_cast<long>(std::floor(std::log(g.uniform()) / std::log1p(-p)));
}

inline long sample_negbinomial(Rng& g, double r, double p) {
  if (!(r > 0.0 && p > 0.0 && p < 1.0))
    throw parameter_error("sample_negbinomial: invalid parameters");
  // Gamma-Poisson mixture: rate gamma(r) * (1-p)/p.
  const double lambda = sample_gamma(g, r) * (1.0 - p) / p;
  if (lambda <= 0.0) return 0;
  return sample_poisson(g, lambda);
}

inline long sample_binomial(Rng& g, long n, double p) {
  long k = 0;
  for (long i = 0; i < n; ++i)
    if (g.uniform() < p) ++k;
  return k;
}

// pgf (1 + tn(1-u))/(1 + td(1-u)): for tn in [0, td) a mixture of 0 and a
// shifted geometric; for tn in (-1, 0) a Bernoulli + geometric convolution.
inline long sample_theta_ratio(Rng& g, double theta_num, double theta_den) {
  validate(CountDistribution(ThetaRatio{theta_num, theta_den}));
  const double p = 1.0 / (1.0 + theta_den);
  if (theta_num >= 0.0) {
    // P(0 extra) picks the inflated zero-vs-geometric mixture weights from
    // pmf(0) = (1 + tn)/(1 + td): mixture 0 w.p. tn/td scaled form.
    // Derivation: pgf = (tn/td) + (1 - tn/td) * geometric pgf.
    if (g.uniform() < theta_num / theta_den) return 0;
    return sample_geometric(g, p);
  }
  // pgf = (1 - (-tn)(u-1)... ) => Bernoulli(-tn) + independent geometric.
  long b = g.uniform() < -theta_num ? 1 : 0;
  return b + sample_geometric(g, p);
}

inline long sample_count(Rng& g, const CountDistribution& d) {
  validate(d);
  return std::visit(
      [&](const auto& v) -> long {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Poisson>) {
          return sample_poisson(g, v.lambda);
        } else if constexpr (std::is_same_v<T, NegBinomial>) {
          return sample_negbinomial(g, v.r, v.p);
        } else if constexpr (std::is_same_v<T, Geometric>) {
          return sample_geometric(g, v.p);
        } else if constexpr (std::is_same_v<T, Bernoulli>) {
          return g.uniform() < v.p ? 1 : 0;
        } else if constexpr (std::is_same_v<T, ThetaRatio>) {
          return sample_theta_ratio(g, v.theta_num, v.theta_den);
        } else if constexpr (std::is_same_v<T, BetaNB>) {
          const double p = sample_beta(g, v.alpha1, v.alpha2);
          // p is the NB probability parameter; guard the open interval.
          const double q = std::min(std::max(p, 1e-12), 1.0 - 1e-12);
          return sample_negbinomial(g, v.r, q);
        } else {
          return v.k;
        }
      },
      d);
}

}  // namespace countcompat

#endif
