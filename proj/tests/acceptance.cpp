#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "countcompat/countcompat.hpp"

using namespace countcompat;

namespace {

// One pass/fail line per criterion; failure details listed underneath.
struct Criterion {
  std::vector<std::string> failures;

  void expect(bool cond, const std::string& what) {
    if (!cond) failures.push_back(what);
  }
  void expect_near(double got, double want, double tol, const std::string& what) {
    if (!(std::fabs(got - want) <= tol)) {
      std::ostringstream os;
      os << what << ": got " << got << ", want " << want << " +/- " << tol;
      failures.push_back(os.str());
    }
  }
  bool finish(int num, const std::string& title) {
    std::cout << (failures.empty() ? "[PASS]" : "[FAIL]") << " criterion " << num << ": " << title
              << "\n";
    for (const std::string& f : failures) std::cout << "    - " << f << "\n";
    return failures.empty();
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<CountDistribution> catalogue_grid() {
  return {
      Poisson{0.5},          Poisson{1.0},          Poisson{4.0},
      Poisson{12.0},         NegBinomial{1.0, 0.5}, NegBinomial{2.0, 0.5},
      NegBinomial{0.7, 0.3}, NegBinomial{5.0, 0.8}, Geometric{0.25},
      Geometric{0.5},        Geometric{0.9},        Bernoulli{0.3},
      Bernoulli{1.0},        ThetaRatio{0.0, 2.0},  ThetaRatio{0.5, 2.0},
      ThetaRatio{-0.3, 0.5}, ThetaRatio{1.0, 3.0},  BetaNB{2.0, 3.0, 1.0},
      BetaNB{1.0, 4.0, 2.0}, Degenerate{3},
  };
}

}  // namespace

TEST_CASE("criterion 1") {
  Criterion c;
  const auto t0 = std::chrono::steady_clock::now();
  for (const CountDistribution& dist : catalogue_grid()) {
    TruncatedSeries s = pgf_series_of(dist, 50);
    std::vector<double> pmf = pgf_to_pmf(s).pmf;
    for (long k = 0; k <= 50; ++k)
      c.expect(std::fabs(pmf[std::size_t(k)] - pmf_eval(dist, k)) <= 1e-12,
               describe(dist) + " k=" + std::to_string(k));
  }
  c.expect(seconds_since(t0) < 1.0, "runtime exceeded 1 s");
  REQUIRE(c.finish(1, "pgf/pmf round trip over the 20-member catalogue grid (tol 1e-12)"));
}

TEST_CASE("criterion 2") {
  Criterion c;
  const double l0 = 1.0, l1 = 2.0, l2 = 3.0;
  const double alpha = l0 / (l0 + l2), beta = l0 / (l0 + l1);
  c.expect_near(alpha, 0.25, 1e-15, "alpha");
  c.expect_near(beta, 1.0 / 3.0, 1e-15, "beta");
  const double lhs = alpha / (l1 * (1.0 - alpha));
  const double rhs = beta / (l2 * (1.0 - beta));
  c.expect_near(lhs, 1.0 / 6.0, 1e-14, "balance left-hand side");
  c.expect_near(rhs, 1.0 / 6.0, 1e-14, "balance right-hand side");
  CompatVerdict v = check_binomial_thinning(alpha, beta, Poisson{l1}, Poisson{l2});
  c.expect(v.compatible, "check_binomial_thinning verdict");

  FamilyResult fam = build_trivariate_poisson(l0, l1, l2, 20);
  SeparabilityReport rep = separability_check(fam.pmf);
  c.expect(rep.residual < 1e-9,
           "separability residual " + std::to_string(rep.residual) + " on the 21x21 grid");
  REQUIRE(c.finish(2, "shared-component balance = 1/6 and separability residual < 1e-9"));
}

TEST_CASE("criterion 3") {
  Criterion c;
  const auto t0 = std::chrono::steady_clock::now();
  Rng g(20250824, 0);
  int accepted = 0, attempts = 0;
  while (accepted < 20 && attempts < 100000) {
    ++attempts;
    const double a = 0.1 + 0.8 * g.uniform();
    const double cc = 0.1 + 0.8 * g.uniform();
    if (std::fabs(a - cc) < 5e-3) continue;
    const double root = std::sqrt(a / cc);
    const double edge = a * (1.0 - cc) / (cc * (1.0 - a));
    const double lo = std::min(root, edge), hi = std::max(root, edge);
    const double d = 0.3 + 1.2 * g.uniform();
    const double ratio = lo + (0.15 + 0.7 * g.uniform()) * (hi - lo);
    const double b = ratio * d;

    ThetaDomainResult res = classify_theta_domain(a, b, cc, d);
    if (!res.params) continue;
    const ThetaFamilyParams& p = *res.params;
    double lx, ly;
    theta_family_margins(p, lx, ly);
    // Keep the truncation error at K=60 far below the 1e-10 marginal tolerance.
    if (lx > 1.5 || ly > 1.5) continue;
    const double mx = p.delta * lx, my = p.delta * ly;
    if (mx + 12.0 * std::sqrt(mx * (1.0 + lx)) > 50.0) continue;
    if (my + 12.0 * std::sqrt(my * (1.0 + ly)) > 50.0) continue;
    ++accepted;

    const double lhs = p.theta4 * (p.theta1 + p.theta3 * (p.theta1 - p.theta2));
    const double rhs = p.theta2 * (p.theta3 + p.theta1 * (p.theta3 - p.theta4));
    c.expect(std::fabs(lhs - rhs) <= 1e-12 * std::max({1.0, std::fabs(lhs), std::fabs(rhs)}),
             "cross-product residual at sample " + std::to_string(accepted));

    FamilyResult fam = build_theta_family(p, 60);
    oracle::AffineFitReport rx = oracle::affine_deviation(fam.pmf, 0);
    oracle::AffineFitReport ry = oracle::affine_deviation(fam.pmf, 1);
    const std::string tag = " at sample " + std::to_string(accepted);
    c.expect_near(rx.slopes[0], cc, 1e-6, "recovered c" + tag);
    c.expect_near(rx.intercept, d, 1e-6, "recovered d" + tag);
    c.expect_near(ry.slopes[0], a, 1e-6, "recovered a" + tag);
    c.expect_near(ry.intercept, b, 1e-6, "recovered b" + tag);

    JointPMF mxg = fam.pmf.marginal({0}), myg = fam.pmf.marginal({1});
    const NegBinomial nbx{p.delta, 1.0 / (1.0 + lx)}, nby{p.delta, 1.0 / (1.0 + ly)};
    for (int k = 0; k <= 15; ++k) {
      c.expect(std::fabs(mxg.p[std::size_t(k)] - pmf_eval(nbx, k)) <= 1e-10,
               "X marginal k=" + std::to_string(k) + tag);
      c.expect(std::fabs(myg.p[std::size_t(k)] - pmf_eval(nby, k)) <= 1e-10,
               "Y marginal k=" + std::to_string(k) + tag);
    }
  }
  c.expect(accepted == 20, "only drew " + std::to_string(accepted) + " admissible specs");
  c.expect(seconds_since(t0) < 30.0, "runtime exceeded 30 s");
  REQUIRE(c.finish(3, "20 random classify -> build -> oracle round trips (tol 1e-6 / 1e-10)"));
}

TEST_CASE("criterion 4") {
  Criterion c;
  double worst_solve = 0.0;
  for (double a : {0.2, 0.35, 0.5, 0.65, 0.8})
    for (double cc : {0.2, 0.35, 0.5, 0.65, 0.8})
      for (double b : {0.1, 0.5, 1.0, 2.0})
        for (double d : {0.1, 0.5, 1.0, 2.0}) {
          const int N = choose_support_bound(a, b, cc, d);
          const LinearCESpec spec = LinearCESpec::bivariate(a, b, cc, d);
          const auto t0 = std::chrono::steady_clock::now();
          FeasibilityOutcome out = solve_feasibility(spec, N);
          worst_solve = std::max(worst_solve, seconds_since(t0));
          std::ostringstream tag;
          tag << "(a,b,c,d)=(" << a << "," << b << "," << cc << "," << d << ") N=" << N;
          if (!std::holds_alternative<JointPMF>(out)) {
            c.expect(false, "infeasible at " + tag.str());
            continue;
          }
          const JointPMF& j = std::get<JointPMF>(out);
          LPSystem sys = build_lp_system(spec, N);
          double res = 0.0;
          for (std::size_t r = 0; r < sys.rows; ++r) {
            double acc = -sys.rhs[r];
            for (std::size_t col = 0; col < sys.cols; ++col)
              acc += sys.A[r * sys.cols + col] * j.p[col];
            res = std::max(res, std::fabs(acc));
          }
          c.expect(res <= 1e-8, "equality residual " + std::to_string(res) + " at " + tag.str());
          for (int target : {0, 1}) {
            oracle::CETable tab = oracle::conditional_expectation(j, target, 1e-6);
            const double slope = target == 0 ? cc : a;
            const double icpt = target == 0 ? d : b;
            for (const oracle::CERow& row : tab.rows)
              c.expect(std::fabs(row.mean - (slope * row.config[0] + icpt)) <= 1e-6,
                       "conditional mean off at " + tag.str());
          }
        }
  c.expect(worst_solve < 5.0, "a solve exceeded 5 s");
  REQUIRE(c.finish(4, "400-spec feasibility grid: residuals <= 1e-8, CE verified to 1e-6"));
}

TEST_CASE("criterion 5") {
  Criterion c;
  const LinearCESpec spec = LinearCESpec::bivariate(2.0, 0.1, 2.0, 0.1);
  for (int N : {5, 9, 16}) {
    FeasibilityOutcome out = solve_feasibility(spec, N);
    if (!std::holds_alternative<FarkasCertificate>(out)) {
      c.expect(false, "no certificate at N=" + std::to_string(N));
      continue;
    }
    const FarkasCertificate& cert = std::get<FarkasCertificate>(out);
    c.expect(verify_certificate(cert, spec), "certificate rejected at N=" + std::to_string(N));
    double margin = 1e300;
    for (int i = 0; i <= N; ++i)
      for (int j = 0; j <= N; ++j)
        margin = std::min(margin, (2.0 * i - j + 0.1) * cert.y[i] +
                                      (-i + 2.0 * j + 0.1) * cert.y[N + 1 + j]);
    c.expect(margin > 1e-10,
             "margin " + std::to_string(margin) + " at N=" + std::to_string(N));
  }
  // The outcome type is a strict alternative: a spec yields a pmf or a
  // certificate, never both; spot-check one member of each corpus side.
  c.expect(std::holds_alternative<JointPMF>(
               solve_feasibility(LinearCESpec::bivariate(0.5, 1.0, 0.5, 1.0), 9)),
           "feasible spec failed to produce a pmf");
  REQUIRE(c.finish(5, "Farkas certificates at N in {5,9,16} with margin > 1e-10"));
}

TEST_CASE("criterion 6") {
  Criterion c;
  JointPMF overlap = oracle::build_pairwise_overlap_poisson(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 25);
  oracle::AffineFitReport r1 = oracle::affine_deviation(overlap, 0);
  c.expect(r1.max_abs_deviation > 1e-4,
           "overlap model deviation " + std::to_string(r1.max_abs_deviation));

  FamilyResult chain = build_markov_chain_xyn({1.0, 0.5, 0.5, 0.5}, 40);
  oracle::AffineFitReport r2 = oracle::affine_deviation(chain.pmf, 1);
  c.expect(r2.max_abs_deviation > 1e-4,
           "causal chain deviation " + std::to_string(r2.max_abs_deviation));

  for (auto keep : {std::vector<int>{0, 1}, {0, 2}, {1, 2}}) {
    JointPMF pair = overlap.marginal(keep);
    oracle::AffineFitReport rp = oracle::affine_deviation(pair, 0);
    c.expect(rp.max_abs_deviation < 1e-6, "pairwise marginal " + std::to_string(keep[0]) +
                                              std::to_string(keep[1]) + " deviation " +
                                              std::to_string(rp.max_abs_deviation));
  }
  REQUIRE(c.finish(6, "counter-examples: 3-d deviation > 1e-4, pairwise margins < 1e-6"));
}

TEST_CASE("criterion 7") {
  Criterion c;
  struct Named {
    std::string name;
    FamilyResult fam;
  };
  std::vector<Named> fams;
  fams.push_back({"trivariate_poisson", build_trivariate_poisson(1.0, 2.0, 3.0)});
  fams.push_back({"poisson_gamma", build_poisson_gamma(1.5, 1.2, {0.8, 1.1}, 60)});
  const double delta = 29.0 / 3.0;
  fams.push_back({"theta_family", build_theta_family({delta, 1.0 / delta, 1.0 / delta - 0.4,
                                                      1.8 / delta, 1.8 / delta - 0.6},
                                                     60)});
  fams.push_back({"trivariate_nb", build_trivariate_nb(1.0, 1.0, 1.0, 0.5, 60)});
  fams.push_back({"beta_nb", build_beta_nb(2.0, 2.0, 6.0, 1.0, 800)});
  fams.push_back({"multinomial_mix", build_multinomial_mix(10, 0.2, 0.3, 0.5)});
  for (const Named& f : fams) {
    oracle::Moments m = oracle::moments(f.fam.pmf);
    const double corr = oracle::correlation(m, 0, 1);
    const double ac = f.fam.ce.slope(0, 1) * f.fam.ce.slope(1, 0);
    c.expect(std::fabs(ac - corr * corr) < 1e-6,
             f.name + ": |ac - Corr^2| = " + std::to_string(std::fabs(ac - corr * corr)));
  }

  FamilyResult pg3 = build_poisson_gamma(1.0, 1.0, {1.0, 1.0, 1.0}, 32);
  LinearCESpec spec;
  spec.n = 3;
  spec.A = pg3.ce.A;
  spec.intercepts = pg3.ce.b;
  ConditionReport rep = necessary_conditions(spec);
  c.expect(rep.minors.size() == 4, "expected 4 principal minors");
  const double want[4] = {8.0 / 9.0, 8.0 / 9.0, 8.0 / 9.0, 16.0 / 27.0};
  for (std::size_t i = 0; i < rep.minors.size() && i < 4; ++i)
    c.expect_near(rep.minors[i], want[i], 1e-12, "minor " + std::to_string(i));
  c.expect(rep.all_minors_positive, "a principal minor is non-positive");
  REQUIRE(c.finish(7, "Lemma-3 slope identity on all families; I-A minors {8/9,8/9,8/9,16/27}"));
}

TEST_CASE("criterion 8") {
  Criterion c;
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t sweeps = 1000000;
  const std::uint64_t seed = 20240817;

  GibbsSpec compat = CARSpec::bivariate(Bernoulli{0.25}, Bernoulli{1.0 / 3.0}, Poisson{2.0},
                                        Poisson{3.0});
  GibbsDiagnostic good = gibbs_compat_diagnostic(compat, sweeps, seed);
  c.expect(good.max_discrepancy < 0.05,
           "compatible discrepancy " + std::to_string(good.max_discrepancy));

  GibbsDiagnostic bad =
      gibbs_compat_diagnostic(GibbsSpec{LinearPoissonSpec{0.5, 1.0, 0.5, 1.0}}, sweeps, seed);
  c.expect(bad.max_discrepancy > 0.1,
           "incompatible discrepancy " + std::to_string(bad.max_discrepancy));

  bool diverged = false;
  try {
    gibbs_run(GibbsSpec{LinearPoissonSpec{1.2, 1.0, 1.2, 1.0}}, sweeps, sweeps / 10, seed);
  } catch (const divergence_error&) {
    diverged = true;
  }
  c.expect(diverged, "supercritical spec did not trip the divergence guard");
  c.expect(seconds_since(t0) < 60.0, "runtime exceeded 60 s");
  REQUIRE(c.finish(8, "Gibbs diagnostic separation at 1e6 sweeps (<0.05 vs >0.1, guard trips)"));
}

TEST_CASE("criterion 9") {
  Criterion c;
  struct Cfg {
    std::string name;
    SampleDescriptor desc;
    FamilyResult fam;
  };
  const double delta = 29.0 / 3.0;
  const ThetaFamilyParams tp{delta, 1.0 / delta, 1.0 / delta - 0.4, 1.8 / delta,
                             1.8 / delta - 0.6};
  std::vector<Cfg> cfgs;
  cfgs.push_back({"trivariate_poisson", TrivariatePoissonParams{1.0, 2.0, 3.0},
                  build_trivariate_poisson(1.0, 2.0, 3.0, 60)});
  cfgs.push_back({"trivariate_nb", TrivariateNBParams{1.0, 1.0, 1.0, 0.5},
                  build_trivariate_nb(1.0, 1.0, 1.0, 0.5, 60)});
  cfgs.push_back({"poisson_gamma", PoissonGammaParams{1.5, 1.2, {0.8, 1.1}},
                  build_poisson_gamma(1.5, 1.2, {0.8, 1.1}, 60)});
  cfgs.push_back({"beta_nb", BetaNBPairParams{2.0, 2.0, 3.0, 2.0},
                  build_beta_nb(2.0, 2.0, 3.0, 2.0, 300)});
  cfgs.push_back({"theta_family", tp, build_theta_family(tp, 60)});
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    SampleMatrix s = sample_family(cfgs[i].desc, 1000000, 90000 + i);
    JointPMF emp = empirical_pmf(s, 10);
    JointPMF exact(2, 10);
    for (int x = 0; x <= 10; ++x)
      for (int y = 0; y <= 10; ++y) exact.at2(x, y) = cfgs[i].fam.pmf.at2(x, y);
    exact.recompute_mass();
    const double tv = total_variation(emp, exact);
    c.expect(tv <= 0.01, cfgs[i].name + ": total variation " + std::to_string(tv));
  }
  REQUIRE(c.finish(9, "1e6-draw empirical pmfs within TV 0.01 of the constructed tensors"));
}
