#pragma once

// Independent numerical oracles for the test suite. These deliberately avoid
// the library's series/continued-fraction code paths: integer-shape Gamma CDFs
// use the finite Poisson-sum identity, quantiles use plain bisection on that
// closed form, and binomial tails use exact log-space summation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

/// Gamma(shape, scale) CDF via the closed form valid for integer shape:
/// P(X <= x) = 1 - exp(-t) * sum_{k=0}^{shape-1} t^k / k!, with t = x/scale.
inline double gamma_cdf_int(double x, int shape, double scale) {
  if (x <= 0.0) return 0.0;
  const double t = x / scale;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < shape; ++k) {
    term *= t / k;
    sum += term;
  }
  return 1.0 - std::exp(-t) * sum;
}

/// Quantile of Gamma(shape, scale) by bisection on gamma_cdf_int.
inline double gamma_quantile_int(double q, int shape, double scale) {
  double lo = 0.0;
  double hi = scale * shape;
  while (gamma_cdf_int(hi, shape, scale) < q) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (gamma_cdf_int(mid, shape, scale) < q) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Exact lower tail P(B <= b) for B ~ Binomial(m, a), log-space summation.
inline double binomial_lower_tail_exact(std::int64_t m, double a, double b) {
  const auto bmax = static_cast<std::int64_t>(std::floor(b));
  double sum = 0.0;
  for (std::int64_t j = 0; j <= bmax; ++j) {
    const double log_term = std::lgamma(static_cast<double>(m) + 1.0) -
                            std::lgamma(static_cast<double>(j) + 1.0) -
                            std::lgamma(static_cast<double>(m - j) + 1.0) +
                            j * std::log(a) + (m - j) * std::log1p(-a);
    sum += std::exp(log_term);
  }
  return sum;
}

/// One-sample Kolmogorov-Smirnov distance between a sample and a CDF.
inline double ks_distance(std::vector<double> sample,
                          const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::max(f - i / n, (i + 1) / n - f));
  }
  return d;
}

/// Two-sample Kolmogorov-Smirnov distance.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i; else ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  return d;
}

}  // namespace oracle
