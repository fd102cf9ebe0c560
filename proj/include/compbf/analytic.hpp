#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "compbf/errors.hpp"
#include "compbf/quadrature.hpp"
#include "compbf/specfun.hpp"
#include "compbf/stats.hpp"

namespace compbf {

struct CcdfBounds {
  double lower = 0.0;
  double upper = 0.0;
};

inline void validate_cluster(int k, int nt, double beta) {
  if (k < 1) throw DomainError("cluster size must be >= 1");
  if (nt < k) throw DomainError("zero-forcing feasibility requires nt >= k");
  if (!(beta > 2.0) || !std::isfinite(beta))
    throw DomainError("pathloss exponent must exceed 2");
}

inline void validate_delta1(double delta1) {
  if (!(delta1 > 0.0) || !(delta1 <= 1.0))
    throw DomainError("delta1 must lie in (0, 1]");
}

inline void validate_gamma(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw DomainError("gamma must be finite and >= 0");
}

// kappa_M = (M!)^(-1/M), the tight exponential-rate constant in Alzer's
// chi-squared CDF sandwich.
inline double alzer_kappa(int m) {
  if (m < 1) throw DomainError("alzer_kappa requires m >= 1");
  return std::exp(-std::lgamma(static_cast<double>(m) + 1.0) / m);
}

namespace detail {

// Closed form at beta = 4 for hot paths; generic quadrature route otherwise.
// The quadrature route in specfun stays independent for identity tests.
inline double d_eval(double A, double beta) {
  return beta == 4.0 ? d_function_beta4(A) : d_function(A, beta);
}

inline double a_eval(double y, double beta) {
  if (beta == 4.0) return y > 0.0 ? std::atan(1.0 / y) : std::numbers::pi / 2.0;
  return a_function(y, beta);
}

inline double binom(int n, int r) {
  double v = 1.0;
  for (int i = 1; i <= r; ++i) v *= static_cast<double>(n - r + i) / i;
  return v;
}

// One Alzer-form conditional CCDF sum for a given exponential rate kappa.
inline double conditional_alzer_sum(int k, int nt, double beta, double delta1,
                                    double gamma, double kap) {
  const int m = nt - k + 1;
  const double t0 = std::pow(delta1, beta) * gamma;
  double sum = 0.0;
  for (int l = 1; l <= m; ++l) {
    const double term =
        binom(m, l) * std::pow(1.0 + d_eval(l * kap * t0, beta), -k);
    sum += (l % 2 == 1) ? term : -term;
  }
  return std::clamp(sum, 0.0, 1.0);
}

// Central finite differences with one Richardson step. Base step follows the
// s*1e-4 rule for orders 1-2; the third order uses a larger step because the
// 1e-4 step leaves it roundoff-dominated (see decisions ledger).
struct DDerivatives {
  double d0 = 0.0, d1 = 0.0, d2 = 0.0, d3 = 0.0;
  double err1 = 0.0, err2 = 0.0, err3 = 0.0;
};

inline DDerivatives fd_d_derivatives(double t0, double beta, int order) {
  DDerivatives out;
  auto f = [beta](double u) { return d_eval(u, beta); };
  out.d0 = f(t0);
  if (order >= 1) {
    const double h = 1e-4 * t0;
    auto est = [&](double hh) { return (f(t0 + hh) - f(t0 - hh)) / (2.0 * hh); };
    const double a = est(h);
    const double b = est(0.5 * h);
    out.d1 = (4.0 * b - a) / 3.0;
    out.err1 = std::abs(b - a) / 3.0;
  }
  if (order >= 2) {
    const double h = 1e-4 * t0;
    const double f0 = out.d0;
    auto est = [&](double hh) {
      return (f(t0 + hh) - 2.0 * f0 + f(t0 - hh)) / (hh * hh);
    };
    const double a = est(h);
    const double b = est(0.5 * h);
    out.d2 = (4.0 * b - a) / 3.0;
    out.err2 = std::abs(b - a) / 3.0;
  }
  if (order >= 3) {
    const double h = (beta == 4.0 ? 1e-3 : 1e-2) * t0;
    auto est = [&](double hh) {
      return (f(t0 + 2.0 * hh) - 2.0 * f(t0 + hh) + 2.0 * f(t0 - hh) -
              f(t0 - 2.0 * hh)) /
             (2.0 * hh * hh * hh);
    };
    const double a = est(h);
    const double b = est(0.5 * h);
    out.d3 = (4.0 * b - a) / 3.0;
    out.err3 = std::abs(b - a) / 3.0;
  }
  return out;
}

}  // namespace detail

// Alzer sandwich on the delta1-conditioned SIR CCDF: the upper member uses
// kappa = (M!)^(-1/M), the lower kappa = 1; they coincide when k == nt.
inline CcdfBounds ccdf_conditional_bounds(int k, int nt, double beta,
                                          double delta1, double gamma) {
  validate_cluster(k, nt, beta);
  validate_delta1(delta1);
  validate_gamma(gamma);
  if (gamma == 0.0) return {1.0, 1.0};
  const int m = nt - k + 1;
  CcdfBounds out;
  out.upper = detail::conditional_alzer_sum(k, nt, beta, delta1, gamma,
                                            alzer_kappa(m));
  out.lower = detail::conditional_alzer_sum(k, nt, beta, delta1, gamma, 1.0);
  if (out.lower > out.upper) std::swap(out.lower, out.upper);
  return out;
}

// Exact delta1-conditioned CCDF, available in closed form when k == nt:
// F(gamma) = [1 + D(delta1^beta * gamma, beta)]^(-k).
inline double ccdf_conditional_exact(int k, int nt, double beta, double delta1,
                                     double gamma) {
  validate_cluster(k, nt, beta);
  if (k != nt)
    throw DomainError("closed-form conditional CCDF requires k == nt");
  validate_delta1(delta1);
  validate_gamma(gamma);
  if (gamma == 0.0) return 1.0;
  const double t0 = std::pow(delta1, beta) * gamma;
  return std::pow(1.0 + detail::d_eval(t0, beta), -k);
}

// Exact delta1-conditioned CCDF as a Laplace-transform derivative series,
// supported for nt - k <= 3. The interference Laplace transform is
// exp(-pi*lambda*r^2 * D(s/r^beta, beta)); its s-derivatives are assembled by
// Faa di Bruno from finite-difference derivatives of D, and the expectation
// over the cluster radius uses the x = pi*lambda*r^2 substitution, under which
// lambda cancels identically. The function still evaluates at lambda and
// 2*lambda and returns the mean so that any future lambda leakage is caught.
inline double ccdf_conditional_series(int k, int nt, double beta, double delta1,
                                      double gamma, double lambda = 1.0) {
  validate_cluster(k, nt, beta);
  validate_delta1(delta1);
  validate_gamma(gamma);
  if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
  const int order = nt - k;
  if (order > 3)
    throw UnsupportedOrderError(
        "series CCDF supports at most three Laplace-transform derivatives (nt - k <= 3)");
  if (gamma == 0.0) return 1.0;

  const double t0 = std::pow(delta1, beta) * gamma;
  const auto d = detail::fd_d_derivatives(t0, beta, order);

  // Propagated finite-difference uncertainty; large values mean the series
  // would be numerically meaningless rather than slightly off.
  double propagated = 0.0;
  double poch = static_cast<double>(k);
  propagated += t0 * d.err1 * poch;
  poch *= k + 1;
  propagated += 0.5 * t0 * t0 * d.err2 * poch;
  poch *= k + 2;
  propagated += t0 * t0 * t0 * d.err3 * poch / 6.0;
  if (propagated > 1e-4)
    throw DerivativeInstabilityError(
        "finite-difference derivatives of the interference scaling are unstable here");

  const double inv_gamma_k = std::exp(-std::lgamma(static_cast<double>(k)));
  const double x_max = gamma_quantile(static_cast<double>(k), 1.0 - 1e-10);

  auto eval_at = [&](double /*lam*/) {
    auto integrand = [&](double x) {
      double bracket = 1.0;
      if (order >= 1) bracket += t0 * d.d1 * x;
      if (order >= 2)
        bracket += 0.5 * t0 * t0 * (d.d1 * d.d1 * x * x - d.d2 * x);
      if (order >= 3)
        bracket += (t0 * t0 * t0 / 6.0) *
                   (d.d1 * d.d1 * d.d1 * x * x * x -
                    3.0 * d.d1 * d.d2 * x * x + d.d3 * x);
      return std::exp(-x * (1.0 + d.d0)) * std::pow(x, k - 1) * inv_gamma_k *
             bracket;
    };
    return integrate(integrand, 0.0, x_max, {1e-11, 1e-9, 52});
  };

  const double f1 = eval_at(lambda);
  const double f2 = eval_at(2.0 * lambda);
  if (std::abs(f1 - f2) > 1e-4)
    throw InvariantError("series CCDF lambda-consistency check failed");
  return std::clamp(0.5 * (f1 + f2), 0.0, 1.0);
}

// Density of delta1 = d_1/d_K for a cluster of size K >= 2:
// f(x) = 2(K-1) x (1-x^2)^(K-2) on [0, 1].
inline double delta1_pdf(int k, double x) {
  if (k < 2) throw DomainError("delta1 density requires k >= 2");
  if (!(x >= 0.0) || !(x <= 1.0)) throw DomainError("delta1 must lie in [0, 1]");
  return 2.0 * (k - 1) * x * std::pow(1.0 - x * x, k - 2);
}

inline double delta1_cdf(int k, double x) {
  if (k < 2) throw DomainError("delta1 distribution requires k >= 2");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return 1.0 - std::pow(1.0 - x * x, k - 1);
}

// Mean of delta1: exact Gamma-ratio value and the 1/sqrt(K) scaling
// approximation; K = 1 is the degenerate delta1 = 1 case.
struct Delta1Mean {
  double exact = 1.0;
  double approx = 1.0;
};

inline Delta1Mean delta1_mean(int k) {
  if (k < 1) throw DomainError("delta1_mean requires k >= 1");
  Delta1Mean out;
  out.approx = 1.0 / std::sqrt(static_cast<double>(k));
  if (k == 1) {
    out.exact = 1.0;
    return out;
  }
  out.exact = std::exp(0.5 * std::log(std::numbers::pi) +
                       std::lgamma(static_cast<double>(k)) - std::log(2.0) -
                       std::lgamma(k + 0.5));
  return out;
}

namespace detail {

// Marginal (delta1-averaged) Alzer-form CCDF for a single kappa. Tolerance
// hierarchy: the integrand carries ~1e-12 of scaling-integral noise, and the
// SE quadrature that integrates over *this* function needs its error (which
// jumps discontinuously in gamma as the adaptive panels split) to stay below
// the SE absolute budget -- so this level runs at 1e-11, between the two.
inline double marginal_alzer_sum(int k, int nt, double beta, double gamma,
                                 double kap) {
  if (k == 1) return conditional_alzer_sum(1, nt, beta, 1.0, gamma, kap);
  auto integrand = [&](double x) {
    return delta1_pdf(k, x) * conditional_alzer_sum(k, nt, beta, x, gamma, kap);
  };
  const QuadratureOptions opt{1e-11, 1e-11, 52};
  // At large gamma the mass sits in a boundary layer of width ~gamma^(-1/beta)
  // at x = 0, which top-down bisection can step right over; carve the layer
  // out explicitly (the split point varies smoothly with gamma, so the
  // quadrature error stays smooth in gamma too).
  const double x_c = std::min(1.0, 8.0 * std::pow(1.0 + gamma, -1.0 / beta));
  const double head = integrate(integrand, 0.0, x_c, opt);
  const double tail = x_c < 1.0 ? integrate(integrand, x_c, 1.0, opt) : 0.0;
  return std::clamp(head + tail, 0.0, 1.0);
}

inline double marginal_upper(int k, int nt, double beta, double gamma) {
  if (gamma == 0.0) return 1.0;
  return marginal_alzer_sum(k, nt, beta, gamma, alzer_kappa(nt - k + 1));
}

}  // namespace detail

// Marginal CCDF bounds: the conditional Alzer sandwich integrated against the
// delta1 density.
inline CcdfBounds ccdf_marginal_bounds(int k, int nt, double beta, double gamma) {
  validate_cluster(k, nt, beta);
  validate_gamma(gamma);
  if (gamma == 0.0) return {1.0, 1.0};
  CcdfBounds out;
  out.upper = detail::marginal_alzer_sum(k, nt, beta, gamma,
                                         alzer_kappa(nt - k + 1));
  out.lower = detail::marginal_alzer_sum(k, nt, beta, gamma, 1.0);
  if (out.lower > out.upper) std::swap(out.lower, out.upper);
  return out;
}

// Closed-form approximation of the marginal CCDF: each Alzer term uses the
// constant-geometry surrogate 1 / (1 + (g^(2/beta)/sqrt(K)) * A(sqrt(K)/g^(2/beta)))
// with g = kappa*l*gamma. Exact for K = 1; at beta = 4, K = Nt it reduces to
// 1 / (1 + sqrt(gamma/K) * arccot(sqrt(K/gamma))).
inline CcdfBounds ccdf_marginal_approx(int k, int nt, double beta, double gamma) {
  validate_cluster(k, nt, beta);
  validate_gamma(gamma);
  if (gamma == 0.0) return {1.0, 1.0};
  const int m = nt - k + 1;
  const double sqrt_k = std::sqrt(static_cast<double>(k));
  auto sum_for = [&](double kap) {
    double sum = 0.0;
    for (int l = 1; l <= m; ++l) {
      const double g = kap * l * gamma;
      const double ge = std::pow(g, 2.0 / beta);
      const double term =
          detail::binom(m, l) /
          (1.0 + (ge / sqrt_k) * detail::a_eval(sqrt_k / ge, beta));
      sum += (l % 2 == 1) ? term : -term;
    }
    return std::clamp(sum, 0.0, 1.0);
  };
  CcdfBounds out;
  out.upper = sum_for(alzer_kappa(m));
  out.lower = sum_for(1.0);
  if (out.lower > out.upper) std::swap(out.lower, out.upper);
  return out;
}

// First-order low-SIR expansion of the marginal CCDF for k == nt:
// 1 - gamma * [K(K-1)/(beta-2)] * Gamma(beta/2+1) Gamma(K-1) / Gamma(beta/2+K);
// at beta = 4 the outage slope reduces to gamma/(K+1).
inline double low_sir_expansion(int k, double beta, double gamma) {
  if (k < 2) throw DomainError("low-SIR expansion requires k >= 2");
  if (!(beta > 2.0)) throw DomainError("pathloss exponent must exceed 2");
  validate_gamma(gamma);
  const double coeff =
      static_cast<double>(k) * (k - 1) / (beta - 2.0) *
      std::exp(std::lgamma(0.5 * beta + 1.0) + std::lgamma(k - 1.0) -
               std::lgamma(0.5 * beta + k));
  return 1.0 - coeff * gamma;
}

}  // namespace compbf
