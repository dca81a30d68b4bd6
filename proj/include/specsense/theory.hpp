#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace specsense {
namespace theory {

namespace detail {

/// Shared error shape 1 - (1 + 1/x)^(-T) with log(x) = log_separation +
/// log(epsilon); the separation term collects the power/sample advantage of
/// occupied channels. Evaluated through log1p/expm1 so x may be huge or tiny.
inline double error_from_separation(double log_separation, double epsilon, int t) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("theory: epsilon must lie in (0, 1)");
  if (t < 1) throw std::invalid_argument("theory: requested hole count must be >= 1");
  const double log_x = log_separation + std::log(epsilon);
  const double inv_x = std::exp(-log_x);  // overflow to inf is benign: result -> 1
  return -std::expm1(-t * std::log1p(inv_x));
}

inline void require_gamma(double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("theory: gamma must be positive");
}

}  // namespace detail

/// Limiting miss probability of the one-shot detector: M samples per channel,
/// occupied power at least gamma, hole density epsilon, t holes requested:
///   1 - (1 + [(1+gamma)^M * epsilon]^(-1))^(-t)
inline double p_na_asymptotic(double gamma, int m, double epsilon, int t) {
  detail::require_gamma(gamma);
  if (m < 1) throw std::invalid_argument("theory: samples per channel must be >= 1");
  return detail::error_from_separation(m * std::log1p(gamma), epsilon, t);
}

/// Limiting miss probability of the adaptive detector after k halving passes
/// and a detection phase with m_detect samples per survivor (real-valued to
/// admit the asymptotic allocation):
///   1 - (1 + [(1+gamma)^m_detect * 2^k * epsilon]^(-1))^(-t)
/// k = 0 with m_detect = M reduces exactly to p_na_asymptotic.
inline double p_a_asymptotic(double gamma, double m_detect, int k, double epsilon, int t) {
  detail::require_gamma(gamma);
  if (!std::isfinite(m_detect))
    throw std::invalid_argument("theory: detection allocation must be finite");
  if (k < 0) throw std::invalid_argument("theory: cycle count must be >= 0");
  const double log_sep = m_detect * std::log1p(gamma) + k * std::log(2.0);
  return detail::error_from_separation(log_sep, epsilon, t);
}

/// Detection-phase allocation left by k single-sample exploration passes out
/// of a per-channel budget of M: M - k/log(1+gamma), natural log. May be
/// negative, signalling that exploration alone exceeds the budget.
inline double detection_allocation_asymptotic(double m, int k, double gamma) {
  detail::require_gamma(gamma);
  return m - k / std::log1p(gamma);
}

/// Lower bound on the budget ratio (one-shot / adaptive) at equal error:
/// (2^(-k) + 2/M)^(-1), M the one-shot per-channel budget.
inline double agility_gain_lower_bound(double m, int k) {
  if (!(m >= 1.0)) throw std::invalid_argument("theory: per-channel budget must be >= 1");
  if (k < 0) throw std::invalid_argument("theory: cycle count must be >= 0");
  return 1.0 / (std::exp2(-k) + 2.0 / m);
}

/// Detection samples per survivor the adaptive scheme affords at the total
/// budget that gives the one-shot detector M per channel: 2^k (M-2) + 2.
inline std::int64_t m_prime(int m, int k) {
  if (m < 1) throw std::invalid_argument("theory: per-channel budget must be >= 1");
  if (k < 0) throw std::invalid_argument("theory: cycle count must be >= 0");
  return (static_cast<std::int64_t>(1) << k) * (static_cast<std::int64_t>(m) - 2) + 2;
}

/// Power-scaling exponents (beta in gamma = n^beta) below which each scheme
/// stops driving the error to zero, at hole-density exponent alpha
/// (epsilon = n^(alpha-1)). Returns {(1-alpha)/M, (1-alpha)/m_prime(M,k)}.
inline std::pair<double, double> power_scaling_boundaries(double alpha, int m, int k) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("theory: alpha must lie in [0, 1]");
  const double m_eff = static_cast<double>(m_prime(m, k));
  return {(1.0 - alpha) / m, (1.0 - alpha) / m_eff};
}

/// Cycle count beyond which extra exploration passes stop paying for
/// themselves: log(log(1/epsilon)), natural logarithms. Requires
/// epsilon < 1/e so the inner logarithm exceeds 1.
inline double optimal_cycles(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < std::exp(-1.0)))
    throw std::domain_error("theory: optimal_cycles needs epsilon in (0, 1/e)");
  return std::log(std::log(1.0 / epsilon));
}

/// Bundle of the closed-form quantities at one operating point; p_a is
/// evaluated at the budget-conserving detection allocation m_prime(M, k),
/// the same convention the experiment overlays use.
struct TheoryPoint {
  double p_na = 0.0;
  double p_a = 0.0;
  double agility_gain_lb = 0.0;
  std::int64_t m_prime = 0;
  double k_star = 0.0;
};

inline TheoryPoint make_theory_point(double gamma, int m, int k, double epsilon, int t) {
  TheoryPoint point;
  point.p_na = p_na_asymptotic(gamma, m, epsilon, t);
  point.m_prime = specsense::theory::m_prime(m, k);
  point.p_a = p_a_asymptotic(gamma, static_cast<double>(point.m_prime), k, epsilon, t);
  point.agility_gain_lb = agility_gain_lower_bound(m, k);
  point.k_star = optimal_cycles(epsilon);
  return point;
}

}  // namespace theory
}  // namespace specsense
