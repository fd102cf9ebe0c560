#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "compbf/errors.hpp"

namespace compbf {

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_depth = 52;
};

namespace detail {

// 15-point Kronrod extension of 7-point Gauss (QUADPACK dqk15 constants).
inline constexpr double kGk15X[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
inline constexpr double kGk15Wk[8] = {
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278};
inline constexpr double kGk15Wg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694};

template <class F>
inline void gk15_panel(F& f, double a, double b, double& value, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = kGk15Wk[7] * fc;
  double resg = kGk15Wg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kGk15X[j];
    const double f1 = f(c - dx);
    const double f2 = f(c + dx);
    resk += kGk15Wk[j] * (f1 + f2);
    if (j % 2 == 1) resg += kGk15Wg[j / 2] * (f1 + f2);
  }
  value = resk * h;
  err = std::abs((resk - resg) * h);
}

template <class F>
inline double adapt(F& f, double a, double b, double abs_tol, double rel_tol,
                    int depth, int max_depth) {
  double value = 0.0;
  double err = 0.0;
  gk15_panel(f, a, b, value, err);
  if (err <= abs_tol || err <= rel_tol * std::abs(value)) return value;
  if (depth >= max_depth)
    throw QuadratureError("adaptive quadrature failed to reach the requested tolerance");
  const double c = 0.5 * (a + b);
  const double half_tol = 0.5 * abs_tol;
  return adapt(f, a, c, half_tol, rel_tol, depth + 1, max_depth) +
         adapt(f, c, b, half_tol, rel_tol, depth + 1, max_depth);
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration of f over [a, b].
template <class F>
inline double integrate(F&& f, double a, double b, QuadratureOptions opt = {}) {
  if (!(a <= b)) throw DomainError("integration bounds must satisfy a <= b");
  if (a == b) return 0.0;
  auto& fn = f;
  return detail::adapt(fn, a, b, opt.abs_tol, opt.rel_tol, 0, opt.max_depth);
}

// Integral of f over [a, inf) via the v = a + y/(1-y) substitution on y in [0,1).
template <class F>
inline double integrate_to_infinity(F&& f, double a, QuadratureOptions opt = {}) {
  auto g = [&f, a](double y) {
    const double om = 1.0 - y;
    const double v = a + y / om;
    return f(v) / (om * om);
  };
  return integrate(g, 0.0, 1.0, opt);
}

}  // namespace compbf
