#pragma once

#include <cmath>
#include <numbers>

#include "compbf/errors.hpp"
#include "compbf/quadrature.hpp"

namespace compbf {

// Argument pair of the interference scaling function; A >= 0 and B > 2 keep
// the defining tail integral finite.
struct DParams {
  double a = 0.0;
  double b = 4.0;

  void validate() const {
    if (!(a >= 0.0) || !std::isfinite(a))
      throw DomainError("interference scaling requires A >= 0");
    if (!(b > 2.0) || !std::isfinite(b))
      throw DomainError("pathloss exponent must exceed 2");
  }
};

// A(y) = integral over [y, inf) of dv / (1 + v^p), p = beta/2 > 1.
// The tail beyond max(y, 1) maps exactly onto a finite interval under
// w = v^(1-p):
//   integral_Y^inf dv/(1+v^p) = 1/(p-1) * integral_0^{Y^(1-p)} dw/(1+w^(p/(p-1))),
// leaving only smooth bounded integrands (a rational compactification instead
// produces a (1-t)^(p-2) endpoint singularity that defeats bisection for
// p < 2). The beta=4 closed form arccot(y) is deliberately NOT used here so
// that this route stays independent of the closed forms it is tested against.
inline double a_function(double y, double beta) {
  if (!(y >= 0.0) || !std::isfinite(y)) throw DomainError("a_function requires y >= 0");
  if (!(beta > 2.0)) throw DomainError("pathloss exponent must exceed 2");
  const double p = 0.5 * beta;
  const double q = p / (p - 1.0);
  // Near machine tolerance: callers integrate over this function again, so
  // its error must sit well below their tolerances (see marginal_alzer_sum).
  const QuadratureOptions opt{1e-15, 1e-13, 52};
  const double w_hi = y >= 1.0 ? std::pow(y, 1.0 - p) : 1.0;
  double total =
      integrate([q](double w) { return 1.0 / (1.0 + std::pow(w, q)); }, 0.0,
                w_hi, opt) /
      (p - 1.0);
  if (y < 1.0)
    total += integrate([p](double v) { return 1.0 / (1.0 + std::pow(v, p)); },
                       y, 1.0, opt);
  return total;
}

// Interference scaling D(A, B) = A^(2/B) * A(A^(-2/B)); D(0, B) = 0.
inline double d_function(double A, double B) {
  DParams{A, B}.validate();
  if (A == 0.0) return 0.0;
  const double e = 2.0 / B;
  return std::pow(A, e) * a_function(std::pow(A, -e), B);
}

// Closed form at beta = 4: D(xi, 4) = sqrt(xi) * arccot(1/sqrt(xi)).
inline double d_function_beta4(double xi) {
  if (!(xi >= 0.0) || !std::isfinite(xi))
    throw DomainError("interference scaling requires A >= 0");
  if (xi == 0.0) return 0.0;
  const double s = std::sqrt(xi);
  return s * std::atan(s);
}

// Laplace transform of the out-of-cluster interference seen beyond radius r:
// E[exp(-s I_r)] = exp(-pi * lambda * r^2 * D(s / r^beta, beta)).
inline double laplace_interference(double s, double r, double lambda, double beta) {
  if (!(s >= 0.0)) throw DomainError("laplace_interference requires s >= 0");
  if (!(r > 0.0)) throw DomainError("laplace_interference requires r > 0");
  if (!(lambda > 0.0)) throw DomainError("laplace_interference requires lambda > 0");
  if (!(beta > 2.0)) throw DomainError("pathloss exponent must exceed 2");
  const double arg = s * std::pow(r, -beta);
  return std::exp(-std::numbers::pi * lambda * r * r * d_function(arg, beta));
}

}  // namespace compbf
