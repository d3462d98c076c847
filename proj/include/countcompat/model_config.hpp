#ifndef COUNTCOMPAT_MODEL_CONFIG_HPP
#define COUNTCOMPAT_MODEL_CONFIG_HPP

#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "countcompat/compat.hpp"
#include "countcompat/errors.hpp"
#include "countcompat/lince.hpp"
#include "countcompat/simulate.hpp"

// Flat key=value model configuration files.  One `key=value` token per
// whitespace-separated field, `#` starts a comment, and either `family=` (a
// constructible joint family) or `spec=` (a conditional specification to be
// checked or simulated) selects the schema.

namespace countcompat {

using ModelConfig =
    std::variant<SampleDescriptor, LinearCESpec, LinearPoissonSpec, CARSpec, RandomCoeffSpec>;

namespace config_detail {

struct Entry {
  std::string value;
  int line = 0;
};

using KVMap = std::map<std::string, Entry>;

[[noreturn]] inline void fail(int line, const std::string& msg) {
  throw config_error("line " + std::to_string(line) + ": " + msg);
}

inline KVMap read_kv(std::istream& in) {
  KVMap kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      const std::size_t eq = tok.find('=');
      if (eq == std::string::npos || eq == 0)
        fail(lineno, "expected key=value, got '" + tok + "'");
      const std::string key = tok.substr(0, eq);
      if (kv.count(key)) fail(lineno, "duplicate key '" + key + "'");
      kv[key] = {tok.substr(eq + 1), lineno};
    }
  }
  return kv;
}

inline double to_double(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(line, "not a number: '" + s + "'");
  }
}

inline double need_double(const KVMap& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw config_error("missing required key '" + key + "'");
  return to_double(it->second.value, it->second.line);
}

inline int need_int(const KVMap& kv, const std::string& key) {
  const double v = need_double(kv, key);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    fail(kv.at(key).line, "'" + key + "' must be an integer");
  return i;
}

inline std::vector<double> need_list(const KVMap& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw config_error("missing required key '" + key + "'");
  std::vector<double> out;
  std::stringstream ss(it->second.value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(item, it->second.line));
  if (out.empty()) fail(it->second.line, "'" + key + "' must be a comma-separated list");
  return out;
}

// Distribution literal: name:p1[,p2[,p3]], e.g. poisson:2 or negbinomial:2,0.5.
inline CountDistribution parse_dist(const std::string& text, int line) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) fail(line, "distribution literal needs name:params");
  const std::string name = text.substr(0, colon);
  std::vector<double> p;
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) p.push_back(to_double(item, line));
  auto arity = [&](std::size_t k) {
    if (p.size() != k) fail(line, "'" + name + "' takes " + std::to_string(k) + " parameter(s)");
  };
  CountDistribution d;
  if (name == "poisson") {
    arity(1);
    d = Poisson{p[0]};
  } else if (name == "negbinomial") {
    arity(2);
    d = NegBinomial{p[0], p[1]};
  } else if (name == "geometric") {
    arity(1);
    d = Geometric{p[0]};
  } else if (name == "bernoulli") {
    arity(1);
    d = Bernoulli{p[0]};
  } else if (name == "thetaratio") {
    arity(2);
    d = ThetaRatio{p[0], p[1]};
  } else if (name == "betanb") {
    arity(3);
    d = BetaNB{p[0], p[1], p[2]};
  } else if (name == "degenerate") {
    arity(1);
    d = Degenerate{static_cast<long>(p[0])};
  } else {
    fail(line, "unknown distribution '" + name + "'");
  }
  try {
    validate(d);
  } catch (const parameter_error& e) {
    fail(line, e.what());
  }
  return d;
}

inline CountDistribution need_dist(const KVMap& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw config_error("missing required key '" + key + "'");
  return parse_dist(it->second.value, it->second.line);
}

}  // namespace config_detail

inline ModelConfig parse_model_config(std::istream& in) {
  using namespace config_detail;
  KVMap kv = read_kv(in);

  if (kv.count("family")) {
    const std::string fam = kv.at("family").value;
    const int famline = kv.at("family").line;
    if (fam == "poisson_gamma") {
      PoissonGammaParams p;
      p.alpha = need_double(kv, "alpha");
      p.beta = need_double(kv, "beta");
      p.lambdas = need_list(kv, "lambdas");
      if (!(p.alpha > 0.0 && p.beta > 0.0)) fail(famline, "alpha, beta must be > 0");
      for (double l : p.lambdas)
        if (l < 0.0) fail(kv.at("lambdas").line, "lambdas must be >= 0");
      return SampleDescriptor{p};
    }
    if (fam == "theta") {
      ThetaFamilyParams p{need_double(kv, "delta"), need_double(kv, "theta1"),
                          need_double(kv, "theta2"), need_double(kv, "theta3"),
                          need_double(kv, "theta4")};
      try {
        validate(p);
      } catch (const error& e) {
        fail(famline, e.what());
      }
      return SampleDescriptor{p};
    }
    if (fam == "trivariate_poisson") {
      TrivariatePoissonParams p{need_double(kv, "lambda0"), need_double(kv, "lambda1"),
                                need_double(kv, "lambda2")};
      if (!(p.lambda0 > 0.0 && p.lambda1 > 0.0 && p.lambda2 > 0.0))
        fail(famline, "rates must be > 0");
      return SampleDescriptor{p};
    }
    if (fam == "trivariate_nb") {
      TrivariateNBParams p{need_double(kv, "alpha"), need_double(kv, "beta1"),
                           need_double(kv, "beta2"), need_double(kv, "theta")};
      if (!(p.alpha > 0.0 && p.beta1 > 0.0 && p.beta2 > 0.0 && p.theta > 0.0 && p.theta < 1.0))
        fail(famline, "need alpha,beta1,beta2 > 0 and theta in (0,1)");
      return SampleDescriptor{p};
    }
    if (fam == "beta_nb") {
      BetaNBPairParams p{need_double(kv, "r1"), need_double(kv, "r2"),
                         need_double(kv, "alpha1"), need_double(kv, "alpha2")};
      if (!(p.r1 > 0.0 && p.r2 > 0.0 && p.alpha1 > 0.0 && p.alpha2 > 0.0))
        fail(famline, "all beta-NB parameters must be > 0");
      return SampleDescriptor{p};
    }
    if (fam == "multinomial_mix") {
      MultinomialMixParams p{need_int(kv, "size"), need_double(kv, "p1"),
                             need_double(kv, "p2"), need_double(kv, "p3")};
      if (p.size <= 0) fail(famline, "size must be > 0");
      if (!(p.p1 > 0.0 && p.p2 > 0.0 && p.p3 > 0.0) ||
          std::fabs(p.p1 + p.p2 + p.p3 - 1.0) > 1e-12)
        fail(famline, "p1,p2,p3 must be positive and sum to 1");
      return SampleDescriptor{p};
    }
    fail(famline, "unknown family '" + fam + "'");
  }

  if (kv.count("spec")) {
    const std::string sp = kv.at("spec").value;
    const int specline = kv.at("spec").line;
    if (sp == "linear_ce") {
      const int n = kv.count("n") ? need_int(kv, "n") : 2;
      if (n == 2 && kv.count("a")) {
        return LinearCESpec::bivariate(need_double(kv, "a"), need_double(kv, "b"),
                                       need_double(kv, "c"), need_double(kv, "d"));
      }
      LinearCESpec s;
      s.n = n;
      s.A.assign(n * n, 0.0);
      s.intercepts.assign(n, 0.0);
      for (int i = 0; i < n; ++i) {
        s.intercepts[i] = need_double(kv, "intercept_" + std::to_string(i));
        for (int j = 0; j < n; ++j)
          if (i != j)
            s.A[i * n + j] =
                need_double(kv, "a_" + std::to_string(i) + "_" + std::to_string(j));
      }
      return s;
    }
    if (sp == "linear_poisson") {
      LinearPoissonSpec s{need_double(kv, "a"), need_double(kv, "b"), need_double(kv, "c"),
                          need_double(kv, "d")};
      if (!(s.b > 0.0 && s.d > 0.0)) fail(specline, "intercepts b, d must be > 0");
      if (s.a < 0.0 || s.c < 0.0) fail(specline, "slopes a, c must be >= 0");
      return s;
    }
    if (sp == "car") {
      CARSpec s;
      s.n = kv.count("n") ? need_int(kv, "n") : 2;
      if (s.n < 2) fail(specline, "car spec needs n >= 2");
      s.thinning.assign(s.n * s.n, std::nullopt);
      s.innovation.clear();
      for (int i = 0; i < s.n; ++i) {
        s.innovation.push_back(need_dist(kv, "innovation_" + std::to_string(i)));
        for (int j = 0; j < s.n; ++j)
          if (i != j)
            s.thinning[i * s.n + j] =
                need_dist(kv, "thinning_" + std::to_string(i) + "_" + std::to_string(j));
      }
      return s;
    }
    if (sp == "random_coeff") {
      RandomCoeffSpec s;
      s.n = kv.count("n") ? need_int(kv, "n") : 2;
      if (s.n < 2) fail(specline, "random_coeff spec needs n >= 2");
      for (int i = 0; i < s.n; ++i) {
        std::vector<double> bp = need_list(kv, "beta_" + std::to_string(i));
        if (bp.size() != 2 || !(bp[0] > 0.0 && bp[1] > 0.0))
          fail(kv.at("beta_" + std::to_string(i)).line,
               "beta_" + std::to_string(i) + " must be two positive numbers");
        s.beta_params.emplace_back(bp[0], bp[1]);
        s.innovation.push_back(need_dist(kv, "innovation_" + std::to_string(i)));
      }
      return s;
    }
    fail(specline, "unknown spec '" + sp + "'");
  }

  throw config_error("config must declare either 'family=' or 'spec='");
}

inline ModelConfig parse_model_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  return parse_model_config(in);
}

}  // namespace countcompat

#endif
