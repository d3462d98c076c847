// countcompat: build compatible multivariate count distributions, check
// conditional specifications for compatibility, and solve bounded-support
// linear-conditional-expectation feasibility problems.
//
// Exit codes: 0 = compatible/feasible, 1 = incompatible/infeasible,
// 2 = error (bad input, divergence, I/O failure).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "countcompat/countcompat.hpp"

namespace cc = countcompat;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::string format = "text";
  int trunc = -1;
  std::uint64_t seed = 1;
  std::size_t count = 100000;
  std::size_t sweeps = 100000;
  // classify can also take parameters directly
  double a = -1.0, b = -1.0, c = -1.0, d = -1.0;
};

void report_line(std::ostream& os, const std::string& key, const std::string& value,
                 const std::string& format) {
  if (format == "csv")
    os << key << "," << value << "\n";
  else
    os << key << ": " << value << "\n";
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(12);
  ss << v;
  return ss.str();
}

cc::FamilyResult build_from_descriptor(const cc::SampleDescriptor& desc, int trunc) {
  if (const auto* p = std::get_if<cc::TrivariatePoissonParams>(&desc))
    return cc::build_trivariate_poisson(p->lambda0, p->lambda1, p->lambda2, trunc);
  if (const auto* p = std::get_if<cc::TrivariateNBParams>(&desc))
    return cc::build_trivariate_nb(p->alpha, p->beta1, p->beta2, p->theta, trunc);
  if (const auto* p = std::get_if<cc::PoissonGammaParams>(&desc))
    return cc::build_poisson_gamma(p->alpha, p->beta, p->lambdas, trunc);
  if (const auto* p = std::get_if<cc::ThetaFamilyParams>(&desc))
    return cc::build_theta_family(*p, trunc);
  if (const auto* p = std::get_if<cc::BetaNBPairParams>(&desc))
    return cc::build_beta_nb(p->r1, p->r2, p->alpha1, p->alpha2, trunc);
  const auto& m = std::get<cc::MultinomialMixParams>(desc);
  return cc::build_multinomial_mix(m.size, m.p1, m.p2, m.p3);
}

std::string family_name(const cc::SampleDescriptor& desc) {
  if (std::holds_alternative<cc::TrivariatePoissonParams>(desc)) return "trivariate_poisson";
  if (std::holds_alternative<cc::TrivariateNBParams>(desc)) return "trivariate_nb";
  if (std::holds_alternative<cc::PoissonGammaParams>(desc)) return "poisson_gamma";
  if (std::holds_alternative<cc::ThetaFamilyParams>(desc)) return "theta";
  if (std::holds_alternative<cc::BetaNBPairParams>(desc)) return "beta_nb";
  return "multinomial_mix";
}

std::string describe_solution(const cc::FamilyDescriptor& f) {
  std::ostringstream ss;
  ss.precision(12);
  if (const auto* p = std::get_if<cc::TrivariatePoissonParams>(&f))
    ss << "trivariate_poisson lambda0=" << p->lambda0 << " lambda1=" << p->lambda1
       << " lambda2=" << p->lambda2;
  else if (const auto* p = std::get_if<cc::PoissonGammaParams>(&f)) {
    ss << "poisson_gamma alpha=" << p->alpha << " beta=" << p->beta << " lambdas=";
    for (std::size_t i = 0; i < p->lambdas.size(); ++i) ss << (i ? "," : "") << p->lambdas[i];
  } else if (const auto* p = std::get_if<cc::ThetaFamilyParams>(&f))
    ss << "theta delta=" << p->delta << " theta1=" << p->theta1 << " theta2=" << p->theta2
       << " theta3=" << p->theta3 << " theta4=" << p->theta4;
  else if (const auto* p = std::get_if<cc::TrivariateNBParams>(&f))
    ss << "trivariate_nb alpha=" << p->alpha << " beta1=" << p->beta1
       << " beta2=" << p->beta2 << " theta=" << p->theta;
  else if (const auto* p = std::get_if<cc::IndependentPoissonParams>(&f))
    ss << "independent_poisson lambda_x=" << p->lambda_x << " lambda_y=" << p->lambda_y;
  return ss.str();
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::string path = dir + "/" + name;
  std::ofstream f(path);
  if (!f) throw cc::error("cannot write " + path);
  return f;
}

int cmd_classify(const Options& opt, std::ostream& os) {
  double a = opt.a, b = opt.b, c = opt.c, d = opt.d;
  if (!opt.config.empty()) {
    cc::ModelConfig m = cc::parse_model_config_file(opt.config);
    const auto& spec = std::get<cc::LinearCESpec>(m);
    a = spec.a();
    b = spec.b();
    c = spec.c();
    d = spec.d();
  }
  cc::ThetaDomainResult res = cc::classify_theta_domain(a, b, c, d);
  if (res.region == 'x') {
    report_line(os, "region", "outside", opt.format);
    return 1;
  }
  report_line(os, "region", std::string(1, res.region), opt.format);
  report_line(os, "delta", fmt(res.params->delta), opt.format);
  report_line(os, "theta1", fmt(res.params->theta1), opt.format);
  report_line(os, "theta2", fmt(res.params->theta2), opt.format);
  report_line(os, "theta3", fmt(res.params->theta3), opt.format);
  report_line(os, "theta4", fmt(res.params->theta4), opt.format);
  return 0;
}

int cmd_build(const Options& opt, std::ostream& os) {
  cc::ModelConfig m = cc::parse_model_config_file(opt.config);
  const auto& desc = std::get<cc::SampleDescriptor>(m);
  cc::FamilyResult fam = build_from_descriptor(desc, opt.trunc);
  std::ofstream f = open_out(opt.out, "pmf.csv");
  cc::write_csv(f, fam.pmf);
  report_line(os, "family", family_name(desc), opt.format);
  report_line(os, "n", std::to_string(fam.pmf.n), opt.format);
  report_line(os, "N", std::to_string(fam.pmf.N), opt.format);
  report_line(os, "captured_mass", fmt(fam.pmf.mass), opt.format);
  report_line(os, "pmf_csv", opt.out + "/pmf.csv", opt.format);
  return 0;
}

int cmd_check_compat(const Options& opt, std::ostream& os) {
  cc::ModelConfig m = cc::parse_model_config_file(opt.config);
  cc::CompatVerdict v;
  if (const auto* lp = std::get_if<cc::LinearPoissonSpec>(&m))
    v = cc::check_linear_poisson(lp->a, lp->b, lp->c, lp->d);
  else if (const auto* car = std::get_if<cc::CARSpec>(&m))
    v = cc::check_car_structure(*car);
  else if (const auto* rc = std::get_if<cc::RandomCoeffSpec>(&m))
    v = cc::check_random_coeff(*rc);
  else
    throw cc::config_error("check-compat needs a car, random_coeff or linear_poisson spec");
  report_line(os, "compatible", v.compatible ? "yes" : "no", opt.format);
  if (v.compatible)
    report_line(os, "solution", describe_solution(*v.solution), opt.format);
  else
    report_line(os, "reason", v.reason, opt.format);
  return v.compatible ? 0 : 1;
}

int cmd_solve_lp(const Options& opt, std::ostream& os) {
  cc::ModelConfig m = cc::parse_model_config_file(opt.config);
  const auto& spec = std::get<cc::LinearCESpec>(m);
  int N = opt.trunc;
  if (N < 0) N = cc::choose_support_bound(spec.a(), spec.b(), spec.c(), spec.d());
  report_line(os, "N", std::to_string(N), opt.format);
  cc::FeasibilityOutcome res = cc::solve_feasibility(spec, N);
  if (const auto* pmf = std::get_if<cc::JointPMF>(&res)) {
    std::ofstream f = open_out(opt.out, "pmf.csv");
    cc::write_csv(f, *pmf);
    report_line(os, "feasible", "yes", opt.format);
    report_line(os, "pmf_csv", opt.out + "/pmf.csv", opt.format);
    return 0;
  }
  const auto& cert = std::get<cc::FarkasCertificate>(res);
  std::ofstream f = open_out(opt.out, "certificate.csv");
  cc::write_certificate_csv(f, cert);
  report_line(os, "feasible", "no", opt.format);
  report_line(os, "certificate_csv", opt.out + "/certificate.csv", opt.format);
  return 1;
}

int cmd_oracle(const Options& opt, std::ostream& os) {
  cc::ModelConfig m = cc::parse_model_config_file(opt.config);
  const auto& desc = std::get<cc::SampleDescriptor>(m);
  cc::FamilyResult fam = build_from_descriptor(desc, opt.trunc);
  for (int t = 0; t < fam.pmf.n; ++t) {
    cc::oracle::CETable table = cc::oracle::conditional_expectation(fam.pmf, t);
    std::ofstream f = open_out(opt.out, "ce_" + std::to_string(t) + ".csv");
    cc::oracle::write_ce_csv(f, table);
    cc::oracle::AffineFitReport fit = cc::oracle::affine_deviation(fam.pmf, t);
    report_line(os, "target_" + std::to_string(t) + "_intercept", fmt(fit.intercept),
                opt.format);
    for (std::size_t s = 0; s < fit.slopes.size(); ++s)
      report_line(os, "target_" + std::to_string(t) + "_slope_" + std::to_string(s),
                  fmt(fit.slopes[s]), opt.format);
    report_line(os, "target_" + std::to_string(t) + "_max_abs_deviation",
                fmt(fit.max_abs_deviation), opt.format);
  }
  return 0;
}

int cmd_sample(const Options& opt, std::ostream& os) {
  cc::ModelConfig m = cc::parse_model_config_file(opt.config);
  const auto& desc = std::get<cc::SampleDescriptor>(m);
  cc::SampleMatrix s = cc::sample_family(desc, opt.count, opt.seed);
  std::ofstream f = open_out(opt.out, "samples.csv");
  cc::write_samples_csv(f, s);
  report_line(os, "family", family_name(desc), opt.format);
  report_line(os, "draws", std::to_string(s.rows), opt.format);
  report_line(os, "samples_csv", opt.out + "/samples.csv", opt.format);
  return 0;
}

int cmd_gibbs(const Options& opt, std::ostream& os) {
  cc::ModelConfig m = cc::parse_model_config_file(opt.config);
  cc::GibbsSpec spec;
  if (const auto* lp = std::get_if<cc::LinearPoissonSpec>(&m))
    spec = *lp;
  else if (const auto* car = std::get_if<cc::CARSpec>(&m))
    spec = *car;
  else if (const auto* rc = std::get_if<cc::RandomCoeffSpec>(&m))
    spec = *rc;
  else
    throw cc::config_error("gibbs needs a car, random_coeff or linear_poisson spec");
  cc::GibbsDiagnostic diag = cc::gibbs_compat_diagnostic(spec, opt.sweeps, opt.seed);
  report_line(os, "sweeps", std::to_string(opt.sweeps), opt.format);
  report_line(os, "configs_used", std::to_string(diag.configs_used), opt.format);
  report_line(os, "max_discrepancy", fmt(diag.max_discrepancy), opt.format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compatible multivariate count distributions"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "model config file (key=value lines)");
    sub->add_option("--trunc", opt.trunc, "support truncation bound N");
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--format", opt.format, "report format: text|csv")
        ->check(CLI::IsMember({"text", "csv"}));
  };

  CLI::App* classify = app.add_subcommand("classify", "theta-domain classification of (a,b,c,d)");
  add_common(classify);
  classify->add_option("-a", opt.a, "slope of E[Y|X]");
  classify->add_option("-b", opt.b, "intercept of E[Y|X]");
  classify->add_option("-c", opt.c, "slope of E[X|Y]");
  classify->add_option("-d", opt.d, "intercept of E[X|Y]");

  CLI::App* build = app.add_subcommand("build", "construct a joint pmf for a family");
  add_common(build);
  CLI::App* check = app.add_subcommand("check-compat", "compatibility verdict for a spec");
  add_common(check);
  CLI::App* lp = app.add_subcommand("solve-lp", "bounded-support feasibility solve");
  add_common(lp);
  CLI::App* oracle = app.add_subcommand("oracle", "conditional-expectation tables and fits");
  add_common(oracle);
  CLI::App* sample = app.add_subcommand("sample", "exact sampling of a family");
  add_common(sample);
  sample->add_option("--count", opt.count, "number of draws");
  CLI::App* gibbs = app.add_subcommand("gibbs", "Gibbs chain compatibility diagnostic");
  add_common(gibbs);
  gibbs->add_option("--sweeps", opt.sweeps, "post-burnin sweeps");

  CLI11_PARSE(app, argc, argv);

  try {
    if (classify->parsed()) return cmd_classify(opt, std::cout);
    if (build->parsed()) return cmd_build(opt, std::cout);
    if (check->parsed()) return cmd_check_compat(opt, std::cout);
    if (lp->parsed()) return cmd_solve_lp(opt, std::cout);
    if (oracle->parsed()) return cmd_oracle(opt, std::cout);
    if (sample->parsed()) return cmd_sample(opt, std::cout);
    if (gibbs->parsed()) return cmd_gibbs(opt, std::cout);
  } catch (const std::bad_variant_access&) {
    std::cerr << "error: config type does not match this subcommand\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
