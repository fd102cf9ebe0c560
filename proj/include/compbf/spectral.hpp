#pragma once

#include <cmath>
#include <vector>

#include "compbf/analytic.hpp"
#include "compbf/errors.hpp"
#include "compbf/quadrature.hpp"

namespace compbf {

inline constexpr double kLog2E = 1.4426950408889634;

// Pilot repetition factor needed to reach a target channel-estimation MMSE at
// a given pilot SINR; approaches 1 as the SINR grows.
inline int eta_from_pilot_sinr(double sinr, double mmse) {
  if (!(sinr > 0.0)) throw DomainError("pilot sinr must be positive");
  if (!(mmse > 0.0) || !(mmse <= 1.0))
    throw DomainError("mmse target must lie in (0, 1]");
  const double raw = std::floor((1.0 / sinr) * (1.0 / mmse - 1.0));
  return raw < 1.0 ? 1 : static_cast<int>(raw);
}

// Training overhead: eta pilots per antenna, K*Nt antennas trained per
// coherence block of L_b symbols.
struct OverheadModel {
  double coherence = 0.0;  // L_b, symbols per fading coherence block
  double eta = 1.0;        // pilots per transmit antenna

  static OverheadModel from_pilot_sinr(double coherence, double sinr,
                                       double mmse) {
    return OverheadModel{coherence,
                         static_cast<double>(eta_from_pilot_sinr(sinr, mmse))};
  }

  double alpha(int k, int nt) const {
    if (k < 1) throw DomainError("cluster size must be >= 1");
    if (nt < k) throw DomainError("zero-forcing feasibility requires nt >= k");
    if (!(coherence > 0.0)) throw DomainError("coherence must be positive");
    if (!(eta >= 1.0)) throw DomainError("eta must be at least 1");
    const double a = eta * static_cast<double>(k) * static_cast<double>(nt) /
                     coherence;
    if (a > 1.0)
      throw InfeasibleOverheadError("training overhead exceeds the frame");
    return a;
  }
};

struct SpectralEfficiency {
  double value = 0.0;       // bits/s/Hz
  bool bound_based = false; // true when the CCDF route is an upper bound
};

// C = log2(e) * Integral_0^inf F(gamma)/(1+gamma) dgamma, computed under the
// substitution t = gamma/(1+gamma) so the domain becomes [0, 1), composed
// with the power map 1 - t = u^8: a CCDF tail gamma^(-a) then enters the
// integrand as u^(8a-1), smooth for every tail exponent a >= 1/4, where the
// bare rational substitution leaves a (1-t)^(a-1) endpoint singularity that
// defeats bisection whenever a < 1.
template <typename Ccdf>
double se_from_ccdf(Ccdf&& ccdf,
                    const QuadratureOptions& opt = {1e-11, 1e-9, 52}) {
  constexpr double s = 8.0;
  const double integral = integrate(
      [&](double u) {
        const double us = std::pow(u, s);
        return ccdf((1.0 - us) / us) * s / u;
      },
      0.0, 1.0, opt);
  return kLog2E * integral;
}

namespace detail {

inline void validate_alpha(double alpha) {
  if (!(alpha >= 0.0) || !(alpha <= 1.0))
    throw DomainError("overhead fraction must lie in [0, 1]");
}

}  // namespace detail

// Ergodic spectral efficiency for a user at relative cluster location delta1.
// Exact when K = Nt; otherwise generated from the conditional upper bound and
// flagged accordingly.
inline SpectralEfficiency ergodic_se_conditional(int k, int nt, double beta,
                                                 double delta1, double alpha) {
  detail::validate_alpha(alpha);
  validate_cluster(k, nt, beta);
  validate_delta1(delta1);
  SpectralEfficiency out;
  out.bound_based = k != nt;
  if (alpha == 1.0) return out;
  const double c0 =
      k == nt
          ? se_from_ccdf([&](double g) {
              return ccdf_conditional_exact(k, nt, beta, delta1, g);
            })
          : se_from_ccdf([&](double g) {
              return ccdf_conditional_bounds(k, nt, beta, delta1, g).upper;
            });
  out.value = (1.0 - alpha) * c0;
  return out;
}

// Ergodic spectral efficiency of the typical user (delta1 averaged out),
// generated from the marginal upper bound, which is exact when K = Nt.
inline SpectralEfficiency ergodic_se_marginal(int k, int nt, double beta,
                                              double alpha) {
  detail::validate_alpha(alpha);
  validate_cluster(k, nt, beta);
  SpectralEfficiency out;
  out.bound_based = k != nt;
  if (alpha == 1.0) return out;
  // Looser than the conditional route: the marginal CCDF is itself computed
  // by adaptive quadrature whose ~1e-11 error is discontinuous in gamma, so
  // the outer absolute budget must stay a decade above that noise floor.
  const double c0 = se_from_ccdf(
      [&](double g) { return ccdf_marginal_bounds(k, nt, beta, g).upper; },
      {1e-9, 1e-8, 52});
  out.value = (1.0 - alpha) * c0;
  return out;
}

enum class OptimizeMode { fixed_nt, nt_equals_k, fixed_geometry };

inline const char* optimize_mode_name(OptimizeMode mode) {
  switch (mode) {
    case OptimizeMode::fixed_nt: return "fixed-nt";
    case OptimizeMode::nt_equals_k: return "nt-equals-k";
    case OptimizeMode::fixed_geometry: return "fixed-geometry";
  }
  return "unknown";
}

struct OptimizeRequest {
  OptimizeMode mode = OptimizeMode::nt_equals_k;
  double coherence_ratio = 0.0;  // L_b / eta, symbols
  int nt = 0;                    // fixed_nt mode: antennas per BS
  double beta = 4.0;
  double c = 0.0;  // fixed_geometry mode: delta1 = sqrt(c/K)
};

struct OptimizationResult {
  OptimizeMode mode = OptimizeMode::nt_equals_k;
  int k_star = 0;
  bool bound_based = false;
  std::vector<int> k_values;
  std::vector<double> alpha_values;
  std::vector<double> se_values;
};

// Sweep the feasible cluster cardinalities for the chosen architecture and
// return the argmax of effective spectral efficiency (ties toward smaller K).
inline OptimizationResult optimize_k(const OptimizeRequest& req) {
  if (!(req.coherence_ratio > 0.0))
    throw DomainError("coherence ratio must be positive");
  if (!(req.beta > 2.0)) throw DomainError("beta must exceed 2");

  OptimizationResult out;
  out.mode = req.mode;

  int k_begin = 1;
  int k_end = 0;  // inclusive
  switch (req.mode) {
    case OptimizeMode::fixed_nt: {
      if (req.nt < 1) throw DomainError("fixed-nt mode needs nt >= 1");
      k_end = req.nt;
      break;
    }
    case OptimizeMode::nt_equals_k:
    case OptimizeMode::fixed_geometry: {
      // alpha = K^2 / ratio <= 1
      k_end = static_cast<int>(std::floor(std::sqrt(req.coherence_ratio) +
                                          1e-12));
      if (req.mode == OptimizeMode::fixed_geometry) {
        if (!(req.c > 0.0))
          throw DomainError("fixed-geometry mode needs c > 0");
        k_begin = std::max(1, static_cast<int>(std::ceil(req.c - 1e-12)));
      }
      break;
    }
  }

  for (int k = k_begin; k <= k_end; ++k) {
    const int nt = req.mode == OptimizeMode::fixed_nt ? req.nt : k;
    const double alpha = static_cast<double>(k) * static_cast<double>(nt) /
                         req.coherence_ratio;
    if (alpha > 1.0 + 1e-12) break;  // overhead grows with k
    const double a = std::min(alpha, 1.0);
    SpectralEfficiency se;
    if (req.mode == OptimizeMode::fixed_geometry) {
      const double delta1 = std::min(1.0, std::sqrt(req.c / k));
      se = ergodic_se_conditional(k, nt, req.beta, delta1, a);
    } else {
      se = ergodic_se_marginal(k, nt, req.beta, a);
    }
    out.k_values.push_back(k);
    out.alpha_values.push_back(a);
    out.se_values.push_back(se.value);
    out.bound_based = out.bound_based || se.bound_based;
  }

  if (out.k_values.empty())
    throw InfeasibleOverheadError(
        "no cluster size fits the coherence budget");

  std::size_t best = 0;
  for (std::size_t i = 1; i < out.se_values.size(); ++i)
    if (out.se_values[i] > out.se_values[best]) best = i;
  out.k_star = out.k_values[best];
  return out;
}

}  // namespace compbf
