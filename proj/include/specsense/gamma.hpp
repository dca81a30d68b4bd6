#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "specsense/random.hpp"

namespace specsense {

/// Shape/scale parameters of a Gamma distribution with integer shape.
/// Density: x^(shape-1) exp(-x/scale) / (scale^shape (shape-1)!).
struct GammaParams {
  int shape = 1;
  double scale = 1.0;

  void validate() const {
    if (shape < 1) throw std::invalid_argument("GammaParams: shape must be a positive integer");
    if (!(scale > 0.0) || !std::isfinite(scale))
      throw std::invalid_argument("GammaParams: scale must be positive and finite");
  }
};

namespace detail {

inline constexpr int kMaxSeriesIter = 500;
inline constexpr double kConvergeEps = 1e-16;

/// Lower regularized incomplete gamma P(a, x) by power series.
/// Converges fast for x < a + 1.
inline double reg_lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int k = 1; k < kMaxSeriesIter; ++k) {
    term *= x / (a + k);
    sum += term;
    if (term < sum * kConvergeEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Upper regularized incomplete gamma Q(a, x) by Lentz continued fraction.
/// Converges fast for x >= a + 1.
inline double reg_upper_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / (b == 0.0 ? tiny : b);
  double h = d;
  for (int k = 1; k < kMaxSeriesIter; ++k) {
    const double an = -static_cast<double>(k) * (k - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kConvergeEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/// Lower regularized incomplete gamma P(a, x) for a > 0, x >= 0.
inline double reg_lower(double a, double x) {
  if (x <= 0.0) return 0.0;
  if (x < a + 1.0) return reg_lower_series(a, x);
  return 1.0 - reg_upper_cf(a, x);
}

}  // namespace detail

/// CDF of Gamma(shape, scale) at x. Exactly 0 for x <= 0.
inline double gamma_cdf(double x, const GammaParams& params) {
  params.validate();
  if (!(x == x)) throw std::invalid_argument("gamma_cdf: x is NaN");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return detail::reg_lower(static_cast<double>(params.shape), x / params.scale);
}

/// Density of Gamma(shape, scale) at x (0 for x < 0).
inline double gamma_pdf(double x, const GammaParams& params) {
  params.validate();
  if (x < 0.0) return 0.0;
  const double a = static_cast<double>(params.shape);
  if (x == 0.0) return params.shape == 1 ? 1.0 / params.scale : 0.0;
  const double t = x / params.scale;
  return std::exp((a - 1.0) * std::log(t) - t - std::lgamma(a)) / params.scale;
}

/// Quantile of Gamma(shape, scale): the x with gamma_cdf(x) = q, solved by
/// bracketed Newton iteration with bisection fallback. Converges to
/// |cdf(x) - q| <= 1e-12 * q (never more than 200 iterations).
inline double gamma_quantile(double q, const GammaParams& params) {
  params.validate();
  if (!(q > 0.0 && q < 1.0))
    throw std::invalid_argument("gamma_quantile: q must lie strictly inside (0, 1)");

  const double a = static_cast<double>(params.shape);
  // Work at scale 1 and rescale at the end; the CDF is scale-equivariant.
  double lo = 0.0;
  double hi = a;
  while (detail::reg_lower(a, hi) < q) {
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("gamma_quantile: bracket expansion failed");
  }

  const double tol = 1e-12 * q;
  double x = std::min(hi, a);  // start at the mean, inside the bracket
  double f = detail::reg_lower(a, x) - q;
  for (int it = 0; it < 200 && std::fabs(f) > tol; ++it) {
    if (f > 0.0) hi = x; else lo = x;
    const double pdf = std::exp((a - 1.0) * std::log(x) - x - std::lgamma(a));
    double next = x - f / pdf;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // Newton left the bracket
    if (next == x) break;  // converged to machine resolution
    x = next;
    f = detail::reg_lower(a, x) - q;
  }
  return x * params.scale;
}

/// Median of Gamma(shape, 1).
inline double gamma_median(int shape) {
  return gamma_quantile(0.5, GammaParams{shape, 1.0});
}

/// One Gamma(shape, scale) draw as the sum of `shape` exponential draws.
/// Consumes exactly `shape` engine words.
inline double sample_gamma(const GammaParams& params, RandomStream& rng) {
  params.validate();
  double sum = 0.0;
  for (int k = 0; k < params.shape; ++k) sum += rng.exponential(params.scale);
  return sum;
}

/// Squared norm of `count` i.i.d. circularly symmetric complex normal samples
/// with total variance `variance` each: real and imaginary parts are the two
/// halves of a Box-Muller pair (variance/2 per component). Consumes exactly
/// 2 * count engine words.
/// Distribution: Gamma(count, variance); kept as the slow reference path for
/// validating the sufficient-statistic reduction used by sample_gamma.
inline double sample_energy_exact(int count, double variance, RandomStream& rng) {
  if (count < 1) throw std::invalid_argument("sample_energy_exact: count must be positive");
  if (!(variance > 0.0)) throw std::invalid_argument("sample_energy_exact: variance must be positive");
  constexpr double two_pi = 6.283185307179586476925286766559;
  double sum = 0.0;
  for (int k = 0; k < count; ++k) {
    const double radius = std::sqrt(-variance * std::log(rng.uniform_pos()));
    const double angle = two_pi * rng.uniform();
    const double re = radius * std::cos(angle);
    const double im = radius * std::sin(angle);
    sum += re * re + im * im;
  }
  return sum;
}

/// Query for the limiting CDF of a low-rank order statistic of many Gamma
/// draws: `rank` is the order-statistic index i >= 1, `shape` the Gamma shape,
/// `argument` the scaled value w >= 0.
struct OrderStatLimitQuery {
  int rank = 1;
  int shape = 1;
  double argument = 0.0;

  void validate() const {
    if (rank < 1) throw std::invalid_argument("OrderStatLimitQuery: rank must be >= 1");
    if (shape < 1) throw std::invalid_argument("OrderStatLimitQuery: shape must be >= 1");
    if (!(argument >= 0.0)) throw std::invalid_argument("OrderStatLimitQuery: argument must be >= 0");
  }
};

/// Limiting CDF of the i-th smallest of m i.i.d. Gamma(M, b) draws divided by
/// order_stat_scale(m, {M, b}), as m grows:
///   Q_i(w) = 1 - exp(-w^M) * sum_{k=0}^{i-1} w^(kM) / k!
/// Evaluated in log-space so large w^M cannot overflow the partial sums.
inline double order_stat_limit_cdf(const OrderStatLimitQuery& query) {
  query.validate();
  const double w = query.argument;
  if (w == 0.0) return 0.0;
  const double m = static_cast<double>(query.shape);
  const double wm = std::pow(w, m);
  double tail = 0.0;
  for (int k = 0; k < query.rank; ++k)
    tail += std::exp(k * m * std::log(w) - wm - std::lgamma(k + 1.0));
  double cdf = 1.0 - tail;
  if (cdf < 0.0) cdf = 0.0;
  if (cdf > 1.0) cdf = 1.0;
  return cdf;
}

inline double order_stat_limit_cdf(int rank, int shape, double argument) {
  return order_stat_limit_cdf(OrderStatLimitQuery{rank, shape, argument});
}

/// Normalizing constant b_m = scale * (shape! / m)^(1/shape) under which the
/// smallest of m Gamma draws converges to the order_stat_limit_cdf law.
inline double order_stat_scale(std::int64_t m, const GammaParams& params) {
  params.validate();
  if (m < 1) throw std::invalid_argument("order_stat_scale: m must be >= 1");
  const double a = static_cast<double>(params.shape);
  return params.scale *
         std::exp((std::lgamma(a + 1.0) - std::log(static_cast<double>(m))) / a);
}

/// Exponential lower-tail proxy 1 - exp(-threshold/scale) for the Gamma CDF
/// at `threshold`. Coincides with the CDF at shape 1 and upper-bounds it for
/// larger shapes (a Gamma sum stochastically dominates one of its terms).
inline double gamma_tail_bound(double threshold, const GammaParams& params) {
  params.validate();
  if (!(threshold >= 0.0)) throw std::invalid_argument("gamma_tail_bound: threshold must be >= 0");
  return -std::expm1(-threshold / params.scale);
}

/// Chernoff bound on the lower binomial tail: for B ~ Binomial(m, a) and
/// b < m*a,  P(B <= b) <= ((m - m*a)/(m - b))^(m-b) * (m*a/b)^b .
/// Computed in log-space.
inline double binomial_lower_tail_bound(std::int64_t m, double a, double b) {
  if (m < 1) throw std::invalid_argument("binomial_lower_tail_bound: m must be >= 1");
  if (!(a > 0.0 && a < 1.0))
    throw std::invalid_argument("binomial_lower_tail_bound: a must lie in (0, 1)");
  const double md = static_cast<double>(m);
  if (!(b > 0.0 && b < md * a))
    throw std::invalid_argument("binomial_lower_tail_bound: need 0 < b < m*a");
  const double log_bound = (md - b) * std::log(md * (1.0 - a) / (md - b)) +
                           b * std::log(md * a / b);
  return std::exp(log_bound);
}

}  // namespace specsense
