#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "countcompat/families.hpp"
#include "countcompat/simulate.hpp"

using namespace countcompat;

namespace {

struct PairStats {
  double mean_x = 0.0, mean_y = 0.0, cov = 0.0;
};

PairStats pair_stats(const SampleMatrix& s) {
  PairStats st;
  double sxy = 0.0;
  for (std::size_t r = 0; r < s.rows; ++r) {
    st.mean_x += s.at(r, 0);
    st.mean_y += s.at(r, 1);
    sxy += double(s.at(r, 0)) * double(s.at(r, 1));
  }
  st.mean_x /= double(s.rows);
  st.mean_y /= double(s.rows);
  st.cov = sxy / double(s.rows) - st.mean_x * st.mean_y;
  return st;
}

}  // namespace

TEST_CASE("sample_family is deterministic in the seed") {
  SampleDescriptor desc = TrivariatePoissonParams{1.0, 2.0, 3.0};
  SampleMatrix a = sample_family(desc, 2000, 42);
  SampleMatrix b = sample_family(desc, 2000, 42);
  SampleMatrix c = sample_family(desc, 2000, 43);
  CHECK(a.data == b.data);
  CHECK(a.data != c.data);
}

TEST_CASE("trivariate Poisson draws reproduce the shared-component covariance") {
  SampleMatrix s = sample_family(TrivariatePoissonParams{1.0, 2.0, 3.0}, 400000, 7);
  PairStats st = pair_stats(s);
  CHECK(st.mean_x == Catch::Approx(3.0).margin(0.02));
  CHECK(st.mean_y == Catch::Approx(4.0).margin(0.02));
  CHECK(st.cov == Catch::Approx(1.0).margin(0.03));
}

TEST_CASE("Poisson-gamma draws reproduce the posterior-predictive mean at X=0") {
  SampleMatrix s = sample_family(PoissonGammaParams{1.0, 1.0, {1.0, 1.0}}, 400000, 11);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r < s.rows; ++r)
    if (s.at(r, 0) == 0) {
      sum += s.at(r, 1);
      ++count;
    }
  REQUIRE(count > 10000);
  CHECK(sum / double(count) == Catch::Approx(0.5).margin(0.02));
}

TEST_CASE("multinomial mix draws always satisfy X <= Y <= size") {
  SampleMatrix s = sample_family(MultinomialMixParams{10, 0.2, 0.3, 0.5}, 50000, 3);
  for (std::size_t r = 0; r < s.rows; ++r) {
    REQUIRE(s.at(r, 0) <= s.at(r, 1));
    REQUIRE(s.at(r, 1) <= 10);
  }
}

TEST_CASE("beta-NB draws reproduce the marginal mean") {
  SampleMatrix s = sample_family(BetaNBPairParams{2.0, 2.0, 3.0, 2.0}, 400000, 5);
  PairStats st = pair_stats(s);
  // E[X] = r1 * alpha2 / (alpha1 - 1).
  CHECK(st.mean_x == Catch::Approx(2.0).margin(0.05));
  CHECK(st.mean_y == Catch::Approx(2.0).margin(0.05));
}

TEST_CASE("empirical pmfs match the constructed tensors in total variation") {
  struct Case {
    SampleDescriptor desc;
    FamilyResult fam;
  };
  const double delta = 29.0 / 3.0;
  const double t1 = 1.0 / delta, t2 = t1 - 0.4, t3 = 1.8 / delta, t4 = t3 - 0.6;
  std::vector<Case> cases;
  cases.push_back({TrivariateNBParams{1.0, 1.0, 1.0, 0.5}, build_trivariate_nb(1.0, 1.0, 1.0, 0.5, 60)});
  cases.push_back({ThetaFamilyParams{delta, t1, t2, t3, t4}, build_theta_family({delta, t1, t2, t3, t4}, 60)});
  cases.push_back({MultinomialMixParams{10, 0.2, 0.3, 0.5}, build_multinomial_mix(10, 0.2, 0.3, 0.5)});
  for (std::size_t i = 0; i < cases.size(); ++i) {
    SampleMatrix s = sample_family(cases[i].desc, 300000, 101 + i);
    const int box = 10;
    JointPMF emp = empirical_pmf(s, box);
    JointPMF exact(2, box);
    for (int x = 0; x <= box; ++x)
      for (int y = 0; y <= box; ++y) exact.at2(x, y) = cases[i].fam.pmf.at2(x, y);
    exact.recompute_mass();
    INFO("case " << i);
    CHECK(total_variation(emp, exact) <= 0.02);
  }
}

TEST_CASE("gibbs_run on a compatible spec reaches the joint marginal means") {
  CARSpec spec =
      CARSpec::bivariate(Bernoulli{0.25}, Bernoulli{1.0 / 3.0}, Poisson{2.0}, Poisson{3.0});
  SampleMatrix chain = gibbs_run(spec, 200000, 20000, 12);
  PairStats st = pair_stats(chain);
  CHECK(st.mean_x == Catch::Approx(3.0).margin(0.05));
  CHECK(st.mean_y == Catch::Approx(4.0).margin(0.05));
}

TEST_CASE("gibbs_run is deterministic and guards against divergence") {
  GibbsSpec spec = LinearPoissonSpec{0.5, 1.0, 0.5, 1.0};
  SampleMatrix a = gibbs_run(spec, 5000, 500, 9);
  SampleMatrix b = gibbs_run(spec, 5000, 500, 9);
  CHECK(a.data == b.data);
  CHECK_THROWS_AS(gibbs_run(LinearPoissonSpec{1.2, 1.0, 1.2, 1.0}, 100000, 1000, 1),
                  divergence_error);
}

TEST_CASE("gibbs diagnostic separates compatible from incompatible specs") {
  GibbsSpec compat = CARSpec::bivariate(Bernoulli{0.25}, Bernoulli{1.0 / 3.0}, Poisson{2.0},
                                        Poisson{3.0});
  GibbsDiagnostic good = gibbs_compat_diagnostic(compat, 400000, 2);
  CHECK(good.configs_used > 3);
  CHECK(good.max_discrepancy < 0.05);

  GibbsDiagnostic bad =
      gibbs_compat_diagnostic(GibbsSpec{LinearPoissonSpec{0.5, 1.0, 0.5, 1.0}}, 400000, 2);
  CHECK(bad.max_discrepancy > 0.1);

  GibbsDiagnostic indep =
      gibbs_compat_diagnostic(GibbsSpec{LinearPoissonSpec{0.0, 1.0, 0.0, 1.0}}, 400000, 2);
  CHECK(indep.max_discrepancy < 0.02);

  CHECK(bad.max_discrepancy >= 2.0 * good.max_discrepancy);
  CHECK(bad.max_discrepancy >= 2.0 * indep.max_discrepancy);
}

TEST_CASE("gibbs diagnostic reports when no conditioning value is visited enough") {
  // A huge intercept spreads the chain so thin that no value reaches 1000
  // visits within a short run.
  CHECK_THROWS_AS(
      gibbs_compat_diagnostic(GibbsSpec{LinearPoissonSpec{0.0, 500.0, 0.0, 500.0}}, 1500, 4),
      inconclusive_diagnostic_error);
}
