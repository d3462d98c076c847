#include <catch2/catch_amalgamated.hpp>

#include <sstream>
#include <string>
#include <variant>

#include "countcompat/model_config.hpp"

using namespace countcompat;

namespace {

ModelConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_model_config(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const config_error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("parse_model_config: family schemas") {
  ModelConfig pg = parse("family=poisson_gamma alpha=1.5 beta=1.2 lambdas=0.8,1.1");
  auto& pgd = std::get<PoissonGammaParams>(std::get<SampleDescriptor>(pg));
  CHECK(pgd.alpha == 1.5);
  CHECK(pgd.lambdas == std::vector<double>{0.8, 1.1});

  ModelConfig tp = parse("family=trivariate_poisson lambda0=1 lambda1=2 lambda2=3");
  CHECK(std::get<TrivariatePoissonParams>(std::get<SampleDescriptor>(tp)).lambda2 == 3.0);

  ModelConfig th = parse(
      "family=theta delta=2 theta1=0.5 theta2=0 theta3=0.5 theta4=0");
  CHECK(std::get<ThetaFamilyParams>(std::get<SampleDescriptor>(th)).delta == 2.0);

  ModelConfig nb = parse("family=trivariate_nb alpha=1 beta1=1 beta2=1 theta=0.5");
  CHECK(std::get<TrivariateNBParams>(std::get<SampleDescriptor>(nb)).theta == 0.5);

  ModelConfig bn = parse("family=beta_nb r1=2 r2=2 alpha1=3 alpha2=2");
  CHECK(std::get<BetaNBPairParams>(std::get<SampleDescriptor>(bn)).alpha1 == 3.0);

  ModelConfig mm = parse("family=multinomial_mix size=10 p1=0.2 p2=0.3 p3=0.5");
  CHECK(std::get<MultinomialMixParams>(std::get<SampleDescriptor>(mm)).size == 10);
}

TEST_CASE("parse_model_config: spec schemas") {
  ModelConfig ce = parse("spec=linear_ce a=0.5 b=1 c=0.4 d=2");
  const LinearCESpec& s = std::get<LinearCESpec>(ce);
  CHECK(s.a() == 0.5);
  CHECK(s.b() == 1.0);
  CHECK(s.c() == 0.4);
  CHECK(s.d() == 2.0);

  ModelConfig ce3 = parse(
      "spec=linear_ce n=3\n"
      "intercept_0=1 a_0_1=0.2 a_0_2=0.3\n"
      "intercept_1=1 a_1_0=0.2 a_1_2=0.3\n"
      "intercept_2=1 a_2_0=0.2 a_2_1=0.3\n");
  CHECK(std::get<LinearCESpec>(ce3).A[0 * 3 + 2] == 0.3);

  ModelConfig lp = parse("spec=linear_poisson a=0.5 b=1 c=0.5 d=1");
  CHECK(std::get<LinearPoissonSpec>(lp).a == 0.5);

  ModelConfig car = parse(
      "spec=car\n"
      "thinning_0_1=bernoulli:0.25 innovation_0=poisson:2\n"
      "thinning_1_0=bernoulli:0.33333333333333331 innovation_1=poisson:3\n");
  const CARSpec& cs = std::get<CARSpec>(car);
  CHECK(cs.n == 2);
  CHECK(std::get<Bernoulli>(*cs.thinning[1]).p == 0.25);
  CHECK(std::get<Poisson>(cs.innovation[1]).lambda == 3.0);

  ModelConfig rc = parse(
      "spec=random_coeff beta_0=1,1 beta_1=1,1 "
      "innovation_0=negbinomial:1,0.5 innovation_1=negbinomial:1,0.5");
  const RandomCoeffSpec& rs = std::get<RandomCoeffSpec>(rc);
  CHECK(rs.beta_params[0].first == 1.0);
  CHECK(std::get<NegBinomial>(rs.innovation[0]).p == 0.5);
}

TEST_CASE("parse_model_config: comments and blank lines are ignored") {
  ModelConfig m = parse(
      "# a linear spec\n"
      "\n"
      "spec=linear_poisson  a=0 b=1  # slopes zero\n"
      "c=0 d=2\n");
  CHECK(std::get<LinearPoissonSpec>(m).d == 2.0);
}

TEST_CASE("parse_model_config: line-anchored diagnostics") {
  // Family invariant breach points at the declaring line.
  std::string err = error_of(
      "family=theta\n"
      "delta=1 theta1=0.2 theta2=0.5 theta3=0.5 theta4=0.4\n");
  CHECK(err.find("line 1") != std::string::npos);
  CHECK(err.find("theta2") != std::string::npos);

  CHECK(error_of("family=zeta x=1").find("unknown family") != std::string::npos);
  CHECK(error_of("spec=zeta x=1").find("unknown spec") != std::string::npos);
  CHECK(error_of("x=1").find("family") != std::string::npos);

  err = error_of("spec=linear_poisson a=0.5 b=1 c=0.5\nd=oops\n");
  CHECK(err.find("line 2") != std::string::npos);
  CHECK(err.find("not a number") != std::string::npos);

  err = error_of("spec=linear_poisson a=1 b=1 c=1 d=1 a=2");
  CHECK(err.find("duplicate key 'a'") != std::string::npos);

  CHECK(error_of("spec=linear_poisson a=0.5 b=1 c=0.5").find("missing required key 'd'") !=
        std::string::npos);
  CHECK(error_of("spec=linear_poisson a=-1 b=1 c=0 d=1").find("slopes") != std::string::npos);
  CHECK(error_of("spec=linear_poisson\nnonsense\n").find("key=value") != std::string::npos);
}

TEST_CASE("parse_model_config: distribution literal errors") {
  CHECK(error_of("spec=car thinning_0_1=bernoulli innovation_0=poisson:1 "
                 "thinning_1_0=bernoulli:0.5 innovation_1=poisson:1")
            .find("name:params") != std::string::npos);
  CHECK(error_of("spec=car thinning_0_1=cauchy:1 innovation_0=poisson:1 "
                 "thinning_1_0=bernoulli:0.5 innovation_1=poisson:1")
            .find("unknown distribution") != std::string::npos);
  CHECK(error_of("spec=car thinning_0_1=poisson:1,2 innovation_0=poisson:1 "
                 "thinning_1_0=bernoulli:0.5 innovation_1=poisson:1")
            .find("takes 1 parameter") != std::string::npos);
  // Parameter-domain violations surface as config errors too.
  CHECK(error_of("spec=car thinning_0_1=bernoulli:1.5 innovation_0=poisson:1 "
                 "thinning_1_0=bernoulli:0.5 innovation_1=poisson:1")
            .find("line 1") != std::string::npos);
}

TEST_CASE("parse_model_config_file: missing file") {
  CHECK_THROWS_AS(parse_model_config_file("/nonexistent/model.cfg"), config_error);
}
