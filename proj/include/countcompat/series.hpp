#ifndef COUNTCOMPAT_SERIES_HPP
#define COUNTCOMPAT_SERIES_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "countcompat/errors.hpp"

// Truncated power-series arithmetic.  A pgf is represented by its Taylor
// coefficients at u=0 up to a truncation order K; the k-th coefficient of a
// pgf is exactly pmf(k), so coefficient extraction is pmf extraction.

namespace countcompat {

inline constexpr double kPgfClampTol = 1e-12;

struct TruncatedSeries {
  // coeffs[k] is the coefficient of u^k, k = 0..K.
  std::vector<double> coeffs;

  TruncatedSeries() = default;
  explicit TruncatedSeries(std::size_t order) : coeffs(order + 1, 0.0) {}
  explicit TruncatedSeries(std::vector<double> c) : coeffs(std::move(c)) {}

  std::size_t order() const { return coeffs.size() - 1; }
  double operator[](std::size_t k) const { return coeffs[k]; }
  double& operator[](std::size_t k) { return coeffs[k]; }

  // Value at u=1, i.e. the mass captured by the truncation.
  double sum() const {
    double s = 0.0;
    for (double c : coeffs) s += c;
    return s;
  }
};

struct BivariateSeries {
  // coeffs[i*(K+1)+j] is the coefficient of u^i v^j.
  std::size_t K = 0;
  std::vector<double> coeffs;

  BivariateSeries() = default;
  explicit BivariateSeries(std::size_t order)
      : K(order), coeffs((order + 1) * (order + 1), 0.0) {}

  double at(std::size_t i, std::size_t j) const { return coeffs[i * (K + 1) + j]; }
  double& at(std::size_t i, std::size_t j) { return coeffs[i * (K + 1) + j]; }
};

// Cauchy product truncated at the common order.
inline TruncatedSeries series_mul(const TruncatedSeries& a, const TruncatedSeries& b) {
  if (a.order() != b.order())
    throw order_mismatch_error("series_mul: truncation orders differ");
  const std::size_t K = a.order();
  TruncatedSeries c(K);
  for (std::size_t n = 0; n <= K; ++n) {
    double s = 0.0;
    for (std::size_t k = 0; k <= n; ++k) s += a[k] * b[n - k];
    c[n] = s;
  }
  return c;
}

// base^exponent by the Miller power recurrence:
//   c_0 = b_0^e,  n b_0 c_n = sum_{k=1..n} (k e - (n-k)) b_k c_{n-k}.
// Exact (up to rounding) for polynomial base and integer exponent.
inline TruncatedSeries series_real_power(const TruncatedSeries& base, double exponent) {
  if (!(base[0] > 0.0))
    throw singular_constant_error("series_real_power: constant term must be positive");
  const std::size_t K = base.order();
  TruncatedSeries c(K);
  c[0] = std::pow(base[0], exponent);
  for (std::size_t n = 1; n <= K; ++n) {
    double s = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
      s += (exponent * k - static_cast<double>(n - k)) * base[k] * c[n - k];
    c[n] = s / (static_cast<double>(n) * base[0]);
  }
  return c;
}

// base^exponent for a bivariate polynomial base with positive constant term.
// Row 0 is the univariate expansion of base(0,v)^e; rows m>=1 follow from
//   f * dg/du = e * g * df/du.
inline BivariateSeries bivariate_real_power(const BivariateSeries& base, double exponent) {
  if (!(base.at(0, 0) > 0.0))
    throw singular_constant_error("bivariate_real_power: constant term must be positive");
  const std::size_t K = base.K;

  // Degree bounds of the polynomial base, to keep the recurrence short.
  std::size_t du = 0, dv = 0;
  for (std::size_t i = 0; i <= K; ++i)
    for (std::size_t j = 0; j <= K; ++j)
      if (base.at(i, j) != 0.0) {
        du = std::max(du, i);
        dv = std::max(dv, j);
      }

  BivariateSeries g(K);

  TruncatedSeries axis(K);
  for (std::size_t j = 0; j <= K; ++j) axis[j] = base.at(0, j);
  TruncatedSeries row0 = series_real_power(axis, exponent);
  for (std::size_t j = 0; j <= K; ++j) g.at(0, j) = row0[j];

  const double f00 = base.at(0, 0);
  for (std::size_t m = 1; m <= K; ++m) {
    for (std::size_t n = 0; n <= K; ++n) {
      double s = 0.0;
      for (std::size_t k = 0; k <= std::min(du, m); ++k) {
        for (std::size_t l = 0; l <= std::min(dv, n); ++l) {
          if (k == 0 && l == 0) continue;
          const double fkl = base.at(k, l);
          if (fkl == 0.0) continue;
          s += (exponent * k - static_cast<double>(m - k)) * fkl * g.at(m - k, n - l);
        }
      }
      g.at(m, n) = s / (static_cast<double>(m) * f00);
    }
  }
  return g;
}

struct PmfExtraction {
  std::vector<double> pmf;
  double captured_mass = 0.0;
};

// Coefficient extraction with clamping of floating-point noise.  Coefficients
// below -kPgfClampTol indicate a series that is not a pgf.
inline PmfExtraction pgf_to_pmf(const TruncatedSeries& s) {
  PmfExtraction out;
  out.pmf.reserve(s.coeffs.size());
  for (double c : s.coeffs) {
    if (c < -kPgfClampTol)
      throw invalid_pgf_error("pgf_to_pmf: negative coefficient " + std::to_string(c));
    out.pmf.push_back(c < 0.0 ? 0.0 : c);
    out.captured_mass += out.pmf.back();
  }
  if (out.captured_mass > 1.0 + 1e-9)
    throw invalid_pgf_error("pgf_to_pmf: coefficients sum to more than 1");
  return out;
}

}  // namespace countcompat

#endif
