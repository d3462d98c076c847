#ifndef COUNTCOMPAT_COMPAT_HPP
#define COUNTCOMPAT_COMPAT_HPP

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "countcompat/distributions.hpp"
#include "countcompat/errors.hpp"
#include "countcompat/families.hpp"
#include "countcompat/joint_pmf.hpp"
#include "countcompat/series.hpp"

// Compatibility deciders: the generic separability test and the closed-form
// verdicts for the compound-autoregressive and random-coefficient families.

namespace countcompat {

inline constexpr double kVerdictTol = 1e-12;

// ---------------------------------------------------------------------------
// Specification forms.

// Compound autoregressive: X_i | rest = sum over j != i of X_j i.i.d. copies
// of thinning(i,j), plus innovation(i).
struct CARSpec {
  int n = 0;
  // thinning[i*n+j] is the law of the summands of coordinate i driven by
  // coordinate j (diagonal entries unused).
  std::vector<std::optional<CountDistribution>> thinning;
  std::vector<CountDistribution> innovation;

  static CARSpec bivariate(CountDistribution z, CountDistribution w, CountDistribution eps,
                           CountDistribution eta) {
    CARSpec s;
    s.n = 2;
    s.thinning.assign(4, std::nullopt);
    s.thinning[0 * 2 + 1] = std::move(z);
    s.thinning[1 * 2 + 0] = std::move(w);
    s.innovation = {std::move(eps), std::move(eta)};
    return s;
  }
};

// Random coefficient: Bernoulli thinning with beta-distributed probability.
struct RandomCoeffSpec {
  int n = 0;
  // beta_params[i] = (a, b) of the stochastic thinning probability of
  // coordinate i's summands.
  std::vector<std::pair<double, double>> beta_params;
  std::vector<CountDistribution> innovation;
};

struct IndependentPoissonParams {
  double lambda_x, lambda_y;
};

using FamilyDescriptor = std::variant<TrivariatePoissonParams, PoissonGammaParams,
                                      ThetaFamilyParams, TrivariateNBParams,
                                      IndependentPoissonParams>;

struct CompatVerdict {
  bool compatible = false;
  std::optional<FamilyDescriptor> solution;
  std::string reason;  // violated condition when incompatible

  static CompatVerdict yes(FamilyDescriptor f) { return {true, std::move(f), ""}; }
  static CompatVerdict no(std::string why) { return {false, std::nullopt, std::move(why)}; }
};

// ---------------------------------------------------------------------------
// Separability (Arnold's criterion).

struct SeparabilityReport {
  double residual = 0.0;   // max |second difference of log R|
  std::size_t excluded = 0;  // grid cells below the mass floor
  std::size_t quadruples = 0;
};

// Core test on a pair of conditional matrices l1(x|y), l2(y|x), both indexed
// (x, y).  Works in log space; cells where either entry is below the floor
// are excluded, but a cell supported by one conditional and not the other is
// a domain mismatch (incompatibility of type (i)).
inline SeparabilityReport separability_residual(const std::vector<std::vector<double>>& l1,
                                                const std::vector<std::vector<double>>& l2,
                                                double floor = 1e-13) {
  const std::size_t nx = l1.size();
  const std::size_t ny = nx ? l1[0].size() : 0;
  std::vector<std::vector<double>> logR(nx, std::vector<double>(ny, 0.0));
  std::vector<std::vector<bool>> ok(nx, std::vector<bool>(ny, false));
  SeparabilityReport rep;
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      const bool a = l1[x][y] > floor, b = l2[x][y] > floor;
      if (a != b)
        throw domain_mismatch_error("separability: conditional domains differ at (" +
                                    std::to_string(x) + "," + std::to_string(y) + ")");
      if (!a) {
        ++rep.excluded;
        continue;
      }
      logR[x][y] = std::log(l1[x][y]) - std::log(l2[x][y]);
      ok[x][y] = true;
    }
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t xp = x + 1; xp < nx; ++xp)
      for (std::size_t y = 0; y < ny; ++y)
        for (std::size_t yp = y + 1; yp < ny; ++yp) {
          if (!(ok[x][y] && ok[xp][yp] && ok[x][yp] && ok[xp][y])) continue;
          ++rep.quadruples;
          const double d = logR[x][y] + logR[xp][yp] - logR[x][yp] - logR[xp][y];
          rep.residual = std::max(rep.residual, std::fabs(d));
        }
  return rep;
}

// Conditionals derived from a 2-d joint pmf by Bayes division.  Cells whose
// joint mass is below the floor are excluded from the log-ratio test: in the
// far tail the two conditionals underflow at different rates, so per-
// conditional floors would spuriously flag a domain mismatch.
inline SeparabilityReport separability_check(const JointPMF& j, double floor = 1e-13) {
  if (j.n != 2) throw error("separability_check: requires a 2-d pmf");
  const std::size_t s = j.side();
  std::vector<double> mx(s, 0.0), my(s, 0.0);
  for (std::size_t x = 0; x < s; ++x)
    for (std::size_t y = 0; y < s; ++y) {
      mx[x] += j.at2(static_cast<int>(x), static_cast<int>(y));
      my[y] += j.at2(static_cast<int>(x), static_cast<int>(y));
    }
  std::vector<std::vector<double>> logR(s, std::vector<double>(s, 0.0));
  std::vector<std::vector<bool>> ok(s, std::vector<bool>(s, false));
  SeparabilityReport rep;
  for (std::size_t x = 0; x < s; ++x)
    for (std::size_t y = 0; y < s; ++y) {
      const double p = j.at2(static_cast<int>(x), static_cast<int>(y));
      if (!(p > floor)) {
        ++rep.excluded;
        continue;
      }
      // log l1(x|y) - log l2(y|x) = log mx[x] - log my[y].
      logR[x][y] = std::log(mx[x]) - std::log(my[y]);
      ok[x][y] = true;
    }
  for (std::size_t x = 0; x < s; ++x)
    for (std::size_t xp = x + 1; xp < s; ++xp)
      for (std::size_t y = 0; y < s; ++y)
        for (std::size_t yp = y + 1; yp < s; ++yp) {
          if (!(ok[x][y] && ok[xp][yp] && ok[x][yp] && ok[xp][y])) continue;
          ++rep.quadruples;
          const double d = logR[x][y] + logR[xp][yp] - logR[x][yp] - logR[xp][y];
          rep.residual = std::max(rep.residual, std::fabs(d));
        }
  return rep;
}

// ---------------------------------------------------------------------------
// Closed-form verdicts.

// Conditional Poisson model with linear intensities.
inline CompatVerdict check_linear_poisson(double a, double b, double c, double d) {
  if (!(b > 0.0 && d > 0.0)) throw parameter_error("check_linear_poisson: b, d must be > 0");
  if (a < 0.0 || c < 0.0) throw parameter_error("check_linear_poisson: slopes must be >= 0");
  if (a == 0.0 && c == 0.0) return CompatVerdict::yes(IndependentPoissonParams{d, b});
  return CompatVerdict::no("linear Poisson conditionals are compatible only when a = c = 0");
}

// Binomial thinning with general innovations.
inline CompatVerdict check_binomial_thinning(double alpha, double beta,
                                             const CountDistribution& eps,
                                             const CountDistribution& eta) {
  if (!(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0))
    throw parameter_error("check_binomial_thinning: alpha, beta must be in (0,1)");
  const Poisson* pe = std::get_if<Poisson>(&eps);
  const Poisson* ph = std::get_if<Poisson>(&eta);
  if (!pe || !ph)
    return CompatVerdict::no("innovations must both be Poisson");
  const double lhs = alpha / (pe->lambda * (1.0 - alpha));
  const double rhs = beta / (ph->lambda * (1.0 - beta));
  if (std::fabs(lhs - rhs) > kVerdictTol * std::max({1.0, lhs, rhs}))
    return CompatVerdict::no("balance alpha/(lambda_eps(1-alpha)) = beta/(lambda_eta(1-beta)) "
                             "violated by " + std::to_string(lhs - rhs));
  const double lambda0 = alpha * ph->lambda / (1.0 - alpha);
  return CompatVerdict::yes(TrivariatePoissonParams{lambda0, pe->lambda, ph->lambda});
}

namespace detail {

inline bool is_degenerate_law(const CountDistribution& d) {
  if (std::holds_alternative<Degenerate>(d)) return true;
  if (const Bernoulli* b = std::get_if<Bernoulli>(&d)) return b->p == 0.0 || b->p == 1.0;
  return false;
}

// Canonical theta-ratio view of a thinning law, if it has one.
inline std::optional<ThetaRatio> as_theta_ratio(const CountDistribution& d) {
  if (const ThetaRatio* t = std::get_if<ThetaRatio>(&d)) return *t;
  if (const Geometric* g = std::get_if<Geometric>(&d))
    return ThetaRatio{0.0, (1.0 - g->p) / g->p};
  if (const NegBinomial* nb = std::get_if<NegBinomial>(&d))
    if (std::fabs(nb->r - 1.0) <= kVerdictTol) return ThetaRatio{0.0, (1.0 - nb->p) / nb->p};
  return std::nullopt;
}

inline bool close(double a, double b) {
  return std::fabs(a - b) <= kVerdictTol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

}  // namespace detail

inline CompatVerdict check_car_structure(const CARSpec& spec) {
  if (spec.n < 2) throw parameter_error("check_car_structure: need n >= 2");
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.n; ++j) {
      if (i == j) continue;
      if (!spec.thinning[i * spec.n + j])
        throw parameter_error("check_car_structure: missing thinning law");
      if (detail::is_degenerate_law(*spec.thinning[i * spec.n + j]))
        throw degenerate_spec_error("check_car_structure: degenerate thinning law");
    }
  // The theory assumes finite moments of every order; beta-NB laws only have
  // finitely many, so a verdict would be a guess.
  for (int i = 0; i < spec.n; ++i) {
    if (std::holds_alternative<BetaNB>(spec.innovation[i]))
      throw unsupported_law_error("check_car_structure: beta-NB laws lack all finite moments");
    for (int j = 0; j < spec.n; ++j)
      if (i != j && std::holds_alternative<BetaNB>(*spec.thinning[i * spec.n + j]))
        throw unsupported_law_error("check_car_structure: beta-NB laws lack all finite moments");
  }

  if (spec.n == 2) {
    const CountDistribution& z = *spec.thinning[0 * 2 + 1];
    const CountDistribution& w = *spec.thinning[1 * 2 + 0];
    const Bernoulli* bz = std::get_if<Bernoulli>(&z);
    const Bernoulli* bw = std::get_if<Bernoulli>(&w);
    if (bz && bw)
      return check_binomial_thinning(bz->p, bw->p, spec.innovation[0], spec.innovation[1]);
    if (bz || bw) return CompatVerdict::no("thinning laws must be of the same case");

    const auto tz = detail::as_theta_ratio(z);
    const auto tw = detail::as_theta_ratio(w);
    if (!tz || !tw)
      return CompatVerdict::no("thinning laws outside both Theorem-2 cases");
    const NegBinomial* ne = std::get_if<NegBinomial>(&spec.innovation[0]);
    const NegBinomial* nh = std::get_if<NegBinomial>(&spec.innovation[1]);
    NegBinomial geb{1.0, 0.0}, gwb{1.0, 0.0};
    if (!ne)
      if (const Geometric* g = std::get_if<Geometric>(&spec.innovation[0])) {
        geb.p = g->p;
        ne = &geb;
      }
    if (!nh)
      if (const Geometric* g = std::get_if<Geometric>(&spec.innovation[1])) {
        gwb.p = g->p;
        nh = &gwb;
      }
    if (!ne || !nh) return CompatVerdict::no("case-ii innovations must be negative binomial");
    if (!detail::close(ne->r, nh->r))
      return CompatVerdict::no("innovations must share the number-of-successes parameter");
    const double theta_e = (1.0 - ne->p) / ne->p;
    const double theta_h = (1.0 - nh->p) / nh->p;
    if (!detail::close(theta_e, tz->theta_den))
      return CompatVerdict::no("thinning denominator theta must match the X innovation");
    if (!detail::close(theta_h, tw->theta_den))
      return CompatVerdict::no("thinning denominator theta must match the Y innovation");
    ThetaFamilyParams prm{ne->r, tz->theta_den, tz->theta_num, tw->theta_den, tw->theta_num};
    try {
      validate(prm);
    } catch (const incompatible_parameters_error& e) {
      return CompatVerdict::no(e.what());
    }
    return CompatVerdict::yes(prm);
  }

  // n >= 3: geometric thinning (identical per coordinate) + NB innovations
  // with a common delta, jointly consistent with Poisson-gamma conjugacy.
  std::vector<double> theta(spec.n);
  double delta = 0.0;
  for (int i = 0; i < spec.n; ++i) {
    std::optional<double> td;
    for (int j = 0; j < spec.n; ++j) {
      if (i == j) continue;
      const auto t = detail::as_theta_ratio(*spec.thinning[i * spec.n + j]);
      if (!t || t->theta_num != 0.0)
        return CompatVerdict::no("n>=3 requires geometric thinning for every pair");
      if (td && !detail::close(*td, t->theta_den))
        return CompatVerdict::no("thinning laws of one coordinate must be identical");
      td = t->theta_den;
    }
    const NegBinomial* nb = std::get_if<NegBinomial>(&spec.innovation[i]);
    NegBinomial geo{1.0, 0.0};
    if (!nb)
      if (const Geometric* g = std::get_if<Geometric>(&spec.innovation[i])) {
        geo.p = g->p;
        nb = &geo;
      }
    if (!nb) return CompatVerdict::no("n>=3 requires negative binomial innovations");
    if (i == 0)
      delta = nb->r;
    else if (!detail::close(delta, nb->r))
      return CompatVerdict::no("innovations must share a common delta");
    if (!detail::close((1.0 - nb->p) / nb->p, *td))
      return CompatVerdict::no("innovation theta must equal the thinning theta");
    theta[i] = *td;
  }
  // Invert theta_i = lambda_i / (sum_{j != i} lambda_j + beta) with beta = 1.
  double T = 0.0;
  for (double t : theta) T += t / (1.0 + t);
  if (!(T < 1.0))
    return CompatVerdict::no("thinning parameters inconsistent with any Poisson-gamma model");
  const double S = T / (1.0 - T);
  PoissonGammaParams pg;
  pg.alpha = delta;
  pg.beta = 1.0;
  for (double t : theta) pg.lambdas.push_back(t * (S + 1.0) / (1.0 + t));
  return CompatVerdict::yes(pg);
}

inline CompatVerdict check_random_coeff(const RandomCoeffSpec& spec) {
  if (spec.n < 2) throw parameter_error("check_random_coeff: need n >= 2");
  for (const auto& [a, b] : spec.beta_params)
    if (!(a > 0.0 && b > 0.0))
      throw parameter_error("check_random_coeff: beta parameters must be > 0");
  if (spec.n >= 3)
    return CompatVerdict::no("random coefficient model has no non-degenerate solution for n >= 3");

  const auto& [a1, b1] = spec.beta_params[0];
  const auto& [a2, b2] = spec.beta_params[1];
  if (!detail::close(a1, a2))
    return CompatVerdict::no("beta laws must share their first parameter");
  const NegBinomial* ne = std::get_if<NegBinomial>(&spec.innovation[0]);
  const NegBinomial* nh = std::get_if<NegBinomial>(&spec.innovation[1]);
  NegBinomial geb{1.0, 0.0}, gwb{1.0, 0.0};
  if (!ne)
    if (const Geometric* g = std::get_if<Geometric>(&spec.innovation[0])) {
      geb.p = g->p;
      ne = &geb;
    }
  if (!nh)
    if (const Geometric* g = std::get_if<Geometric>(&spec.innovation[1])) {
      gwb.p = g->p;
      nh = &gwb;
    }
  if (!ne || !nh) return CompatVerdict::no("innovations must both be negative binomial");
  if (!detail::close(ne->p, nh->p))
    return CompatVerdict::no("innovations must share a common probability parameter");
  // The second beta parameter of each coordinate equals the other
  // coordinate's number-of-successes parameter.
  if (!detail::close(b1, nh->r) || !detail::close(b2, ne->r))
    return CompatVerdict::no("beta second parameters must cross-match the innovation successes");
  return CompatVerdict::yes(TrivariateNBParams{a1, ne->r, nh->r, ne->p});
}

// ---------------------------------------------------------------------------
// Conditional pmf postulated by a CAR spec, for cross-checking a candidate
// joint: pgf of sum_{j != i} (thinning_ij convolved x_j times) + innovation.
inline std::vector<double> car_conditional_pmf(const CARSpec& spec, int target,
                                               const std::vector<int>& given, std::size_t K) {
  TruncatedSeries acc = pgf_series_of(spec.innovation[target], K);
  int g = 0;
  for (int j = 0; j < spec.n; ++j) {
    if (j == target) continue;
    const int xj = given[g++];
    if (xj > 0) {
      TruncatedSeries t = pgf_series_of(*spec.thinning[target * spec.n + j], K);
      acc = series_mul(acc, series_real_power(t, static_cast<double>(xj)));
    }
  }
  return pgf_to_pmf(acc).pmf;
}

}  // namespace countcompat

#endif
