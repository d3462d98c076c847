#ifndef COUNTCOMPAT_SIMULATE_HPP
#define COUNTCOMPAT_SIMULATE_HPP

#include <cmath>
#include <cstdint>
#include <ostream>
#include <unordered_map>
#include <variant>
#include <vector>

#include "countcompat/compat.hpp"
#include "countcompat/distributions.hpp"
#include "countcompat/errors.hpp"
#include "countcompat/families.hpp"
#include "countcompat/joint_pmf.hpp"
#include "countcompat/rng.hpp"

// Exact samplers through each family's stochastic representation, a
// systematic-scan Gibbs sampler over conditional specifications, and a
// discrepancy diagnostic for conditional-mean mismatch.

namespace countcompat {

struct SampleMatrix {
  int n = 0;
  std::size_t rows = 0;
  std::vector<long> data;  // row-major

  long at(std::size_t r, int c) const { return data[r * n + c]; }
};

struct BetaNBPairParams {
  double r1, r2, alpha1, alpha2;
};

struct MultinomialMixParams {
  int size;
  double p1, p2, p3;
};

using SampleDescriptor =
    std::variant<TrivariatePoissonParams, TrivariateNBParams, PoissonGammaParams,
                 ThetaFamilyParams, BetaNBPairParams, MultinomialMixParams>;

inline SampleMatrix sample_family(const SampleDescriptor& desc, std::size_t count,
                                  std::uint64_t seed) {
  SampleMatrix out;
  out.rows = count;
  Rng g(seed, 1);

  if (const auto* p = std::get_if<TrivariatePoissonParams>(&desc)) {
    if (!(p->lambda0 > 0.0 && p->lambda1 > 0.0 && p->lambda2 > 0.0))
      throw parameter_error("sample_family: trivariate Poisson rates must be > 0");
    out.n = 2;
    out.data.reserve(2 * count);
    for (std::size_t i = 0; i < count; ++i) {
      const long z0 = sample_poisson(g, p->lambda0);
      out.data.push_back(z0 + sample_poisson(g, p->lambda1));
      out.data.push_back(z0 + sample_poisson(g, p->lambda2));
    }
  } else if (const auto* p = std::get_if<TrivariateNBParams>(&desc)) {
    if (!(p->alpha > 0.0 && p->beta1 > 0.0 && p->beta2 > 0.0 && p->theta > 0.0 &&
          p->theta < 1.0))
      throw parameter_error("sample_family: invalid trivariate NB parameters");
    out.n = 2;
    out.data.reserve(2 * count);
    for (std::size_t i = 0; i < count; ++i) {
      const long z = sample_negbinomial(g, p->alpha, p->theta);
      out.data.push_back(z + sample_negbinomial(g, p->beta1, p->theta));
      out.data.push_back(z + sample_negbinomial(g, p->beta2, p->theta));
    }
  } else if (const auto* p = std::get_if<PoissonGammaParams>(&desc)) {
    if (!(p->alpha > 0.0 && p->beta > 0.0))
      throw parameter_error("sample_family: invalid Poisson-gamma parameters");
    out.n = static_cast<int>(p->lambdas.size());
    out.data.reserve(out.n * count);
    for (std::size_t i = 0; i < count; ++i) {
      const double latent = sample_gamma(g, p->alpha) / p->beta;
      for (double lam : p->lambdas) {
        const double rate = lam * latent;
        out.data.push_back(rate > 0.0 ? sample_poisson(g, rate) : 0);
      }
    }
  } else if (const auto* p = std::get_if<ThetaFamilyParams>(&desc)) {
    validate(*p);
    double lx, ly;
    theta_family_margins(*p, lx, ly);
    out.n = 2;
    out.data.reserve(2 * count);
    // X marginal is NB(delta, theta = lambda_x); Y given X is the affine
    // conditional: X summands with ratio law (theta4, theta3) plus an
    // NB(delta, theta = theta3) innovation.
    const double px = 1.0 / (1.0 + lx);
    const double pinn = 1.0 / (1.0 + p->theta3);
    for (std::size_t i = 0; i < count; ++i) {
      const long x = sample_negbinomial(g, p->delta, px);
      long y = sample_negbinomial(g, p->delta, pinn);
      for (long k = 0; k < x; ++k) y += sample_theta_ratio(g, p->theta4, p->theta3);
      out.data.push_back(x);
      out.data.push_back(y);
    }
  } else if (const auto* p = std::get_if<BetaNBPairParams>(&desc)) {
    if (!(p->r1 > 0.0 && p->r2 > 0.0 && p->alpha1 > 0.0 && p->alpha2 > 0.0))
      throw parameter_error("sample_family: invalid beta-NB parameters");
    out.n = 2;
    out.data.reserve(2 * count);
    for (std::size_t i = 0; i < count; ++i) {
      double q = sample_beta(g, p->alpha1, p->alpha2);
      q = std::min(std::max(q, 1e-12), 1.0 - 1e-12);
      out.data.push_back(sample_negbinomial(g, p->r1, q));
      out.data.push_back(sample_negbinomial(g, p->r2, q));
    }
  } else if (const auto* p = std::get_if<MultinomialMixParams>(&desc)) {
    if (p->size <= 0 || !(p->p1 > 0.0 && p->p2 > 0.0 && p->p3 > 0.0))
      throw parameter_error("sample_family: invalid multinomial parameters");
    out.n = 2;
    out.data.reserve(2 * count);
    for (std::size_t i = 0; i < count; ++i) {
      // Sequential binomial decomposition of the trinomial cell counts.
      const long z1 = sample_binomial(g, p->size, p->p1);
      const long z3 = sample_binomial(g, p->size - z1, p->p3 / (p->p2 + p->p3));
      out.data.push_back(z1);
      out.data.push_back(z1 + z3);
    }
  }
  return out;
}

// Empirical pmf on {0..N}^n; draws outside the box count toward lost mass.
inline JointPMF empirical_pmf(const SampleMatrix& s, int N) {
  JointPMF j(s.n, N);
  std::vector<int> x(s.n);
  const double w = 1.0 / static_cast<double>(s.rows);
  for (std::size_t r = 0; r < s.rows; ++r) {
    bool in = true;
    for (int c = 0; c < s.n; ++c) {
      const long v = s.at(r, c);
      if (v < 0 || v > N) {
        in = false;
        break;
      }
      x[c] = static_cast<int>(v);
    }
    if (in) j.p[j.index(x)] += w;
  }
  j.recompute_mass();
  return j;
}

// Total variation on the common box (both pmfs over the same support bound).
inline double total_variation(const JointPMF& a, const JointPMF& b) {
  if (a.n != b.n || a.N != b.N) throw error("total_variation: mismatched supports");
  double acc = 0.0;
  for (std::size_t k = 0; k < a.p.size(); ++k) acc += std::fabs(a.p[k] - b.p[k]);
  return 0.5 * acc;
}

// ---------------------------------------------------------------------------
// Gibbs machinery.

struct LinearPoissonSpec {
  double a, b, c, d;  // E[X|Y] drawn as Pois(cY+d), E[Y|X] as Pois(aX+b)
};

using GibbsSpec = std::variant<LinearPoissonSpec, CARSpec, RandomCoeffSpec>;

namespace detail {

inline constexpr long kGibbsStateCap = 1000000;

inline int gibbs_dim(const GibbsSpec& spec) {
  if (std::holds_alternative<LinearPoissonSpec>(spec)) return 2;
  if (const CARSpec* c = std::get_if<CARSpec>(&spec)) return c->n;
  return std::get<RandomCoeffSpec>(spec).n;
}

inline long gibbs_draw(Rng& g, const GibbsSpec& spec, int target, const std::vector<long>& x) {
  if (const LinearPoissonSpec* lp = std::get_if<LinearPoissonSpec>(&spec)) {
    const double mean =
        target == 0 ? lp->c * x[1] + lp->d : lp->a * x[0] + lp->b;
    return sample_poisson(g, mean);
  }
  if (const CARSpec* car = std::get_if<CARSpec>(&spec)) {
    long acc = sample_count(g, car->innovation[target]);
    for (int j = 0; j < car->n; ++j) {
      if (j == target) continue;
      const CountDistribution& law = *car->thinning[target * car->n + j];
      for (long k = 0; k < x[j]; ++k) acc += sample_count(g, law);
    }
    return acc;
  }
  const RandomCoeffSpec& rc = std::get<RandomCoeffSpec>(spec);
  long total = 0;
  for (int j = 0; j < rc.n; ++j)
    if (j != target) total += x[j];
  const double p = sample_beta(g, rc.beta_params[target].first, rc.beta_params[target].second);
  return sample_binomial(g, total, p) + sample_count(g, rc.innovation[target]);
}

// Postulated conditional mean of `target` given the other coordinates.
inline double postulated_mean(const GibbsSpec& spec, int target, const std::vector<long>& x) {
  if (const LinearPoissonSpec* lp = std::get_if<LinearPoissonSpec>(&spec))
    return target == 0 ? lp->c * x[1] + lp->d : lp->a * x[0] + lp->b;
  if (const CARSpec* car = std::get_if<CARSpec>(&spec)) {
    double acc = mean_of(car->innovation[target]);
    for (int j = 0; j < car->n; ++j)
      if (j != target) acc += x[j] * mean_of(*car->thinning[target * car->n + j]);
    return acc;
  }
  const RandomCoeffSpec& rc = std::get<RandomCoeffSpec>(spec);
  long total = 0;
  for (int j = 0; j < rc.n; ++j)
    if (j != target) total += x[j];
  const auto& [a, b] = rc.beta_params[target];
  return total * a / (a + b) + mean_of(rc.innovation[target]);
}

}  // namespace detail

inline SampleMatrix gibbs_run(const GibbsSpec& spec, std::size_t sweeps, std::size_t burnin,
                              std::uint64_t seed) {
  const int n = detail::gibbs_dim(spec);
  Rng g(seed, 2);
  std::vector<long> x(n, 0);
  SampleMatrix out;
  out.n = n;
  out.rows = sweeps;
  out.data.reserve(n * sweeps);
  for (std::size_t t = 0; t < burnin + sweeps; ++t) {
    for (int i = 0; i < n; ++i) {
      x[i] = detail::gibbs_draw(g, spec, i, x);
      if (x[i] > detail::kGibbsStateCap)
        throw divergence_error("gibbs_run: coordinate exceeded 1e6; chain diverged");
    }
    if (t >= burnin)
      for (int i = 0; i < n; ++i) out.data.push_back(x[i]);
  }
  return out;
}

struct GibbsDiagnostic {
  double max_discrepancy = 0.0;
  std::size_t configs_used = 0;
  std::size_t min_visits = 1000;
};

// Compares E[X_0 | rest] estimated from end-of-sweep chain states against the
// spec's postulated affine mean, over conditioning configurations with at
// least 1000 visits.
inline GibbsDiagnostic gibbs_compat_diagnostic(const GibbsSpec& spec, std::size_t sweeps,
                                               std::uint64_t seed) {
  SampleMatrix chain = gibbs_run(spec, sweeps, sweeps / 10, seed);
  const int n = chain.n;
  struct Cell {
    double sum = 0.0;
    std::size_t count = 0;
    std::vector<long> config;
  };
  std::unordered_map<long long, Cell> cells;
  for (std::size_t r = 0; r < chain.rows; ++r) {
    long long key = 0;
    for (int c = 1; c < n; ++c) key = key * 2000003LL + chain.at(r, c);
    Cell& cell = cells[key];
    cell.sum += static_cast<double>(chain.at(r, 0));
    if (cell.count++ == 0) {
      cell.config.resize(n);
      for (int c = 0; c < n; ++c) cell.config[c] = chain.at(r, c);
    }
  }
  GibbsDiagnostic diag;
  for (const auto& [key, cell] : cells) {
    if (cell.count < diag.min_visits) continue;
    const double est = cell.sum / static_cast<double>(cell.count);
    const double post = detail::postulated_mean(spec, 0, cell.config);
    diag.max_discrepancy = std::max(diag.max_discrepancy, std::fabs(est - post));
    ++diag.configs_used;
  }
  if (diag.configs_used == 0)
    throw inconclusive_diagnostic_error(
        "gibbs_compat_diagnostic: no conditioning value reached 1000 visits");
  return diag;
}

inline void write_samples_csv(std::ostream& os, const SampleMatrix& s) {
  for (std::size_t r = 0; r < s.rows; ++r) {
    for (int c = 0; c < s.n; ++c) os << (c ? "," : "") << s.at(r, c);
    os << "\n";
  }
}

}  // namespace countcompat

#endif
