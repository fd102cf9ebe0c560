#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "compbf/errors.hpp"

namespace compbf {

inline constexpr double kZ95 = 1.959963984540054;  // two-sided 95% normal quantile

namespace detail {

// Lower regularized incomplete gamma by power series (valid for x < a + 1).
inline double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw QuadratureError("incomplete gamma series failed to converge");
}

// Upper regularized incomplete gamma by Lentz continued fraction (x >= a + 1).
inline double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16)
      return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw QuadratureError("incomplete gamma continued fraction failed to converge");
}

}  // namespace detail

// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw DomainError("gamma_p requires a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return detail::gamma_p_series(a, x);
  return 1.0 - detail::gamma_q_cf(a, x);
}

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw DomainError("gamma_q requires a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_cf(a, x);
}

// Solves P(a, x) = p for x by bracketed bisection (robust over the full range).
inline double gamma_quantile(double a, double p) {
  if (!(a > 0.0) || !(p >= 0.0) || !(p < 1.0))
    throw DomainError("gamma_quantile requires a > 0 and p in [0, 1)");
  if (p == 0.0) return 0.0;
  double lo = 0.0;
  double hi = a + 1.0;
  while (gamma_p(a, hi) < p) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) break;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (gamma_p(a, mid) < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-14 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

// Wilson score interval for a binomial proportion (default 95%).
inline std::pair<double, double> wilson_interval(long long successes, long long n,
                                                 double z = kZ95) {
  if (n <= 0 || successes < 0 || successes > n)
    throw DomainError("wilson_interval requires 0 <= successes <= n, n > 0");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double hw = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {center - hw, center + hw};
}

// One-sample Kolmogorov-Smirnov statistic; samples must be sorted ascending.
template <class Cdf>
inline double ks_statistic(std::span<const double> sorted_samples, Cdf&& cdf) {
  const std::size_t n = sorted_samples.size();
  if (n == 0) throw DomainError("ks_statistic requires at least one sample");
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double F = cdf(sorted_samples[i]);
    const double hi = static_cast<double>(i + 1) / static_cast<double>(n) - F;
    const double lo = F - static_cast<double>(i) / static_cast<double>(n);
    d = std::max({d, hi, lo});
  }
  return d;
}

// Asymptotic KS critical value at significance alpha: c(alpha)/sqrt(n).
inline double ks_critical(std::size_t n, double alpha = 0.01) {
  if (n == 0 || !(alpha > 0.0) || !(alpha < 1.0))
    throw DomainError("ks_critical requires n > 0 and alpha in (0, 1)");
  return std::sqrt(-0.5 * std::log(alpha / 2.0)) / std::sqrt(static_cast<double>(n));
}

}  // namespace compbf
