#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "compbf/analytic.hpp"
#include "compbf/channel.hpp"
#include "compbf/montecarlo.hpp"
#include "compbf/specfun.hpp"
#include "compbf/spectral.hpp"
#include "compbf/stats.hpp"

namespace compbf {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationOptions {
  std::string only;         // substring filter on criterion names
  int only_id = 0;          // nonzero: run just this criterion id
  int inject_fail = 0;      // force this criterion id to fail (testing hook)
  std::uint64_t seed = 1729;
  int threads = 0;
};

namespace detail {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

inline std::string fmt(double v, int prec = 5) {
  std::ostringstream ss;
  ss << std::setprecision(prec) << v;
  return ss.str();
}

using CheckResult = std::pair<bool, std::string>;

// 1: conditional ergodic SE at K=Nt=2, beta=4 against the reference column.
inline CheckResult check_conditional_se_table(const ValidationOptions&) {
  Timer timer;
  const double deltas[] = {1.0 / 3.0, 0.5, 2.0 / 3.0};
  const double refs[] = {5.377, 3.3361, 2.1318};
  bool ok = true;
  std::ostringstream d;
  for (int i = 0; i < 3; ++i) {
    const double v = ergodic_se_conditional(2, 2, 4.0, deltas[i], 0.0).value;
    const double rel = std::fabs(v / refs[i] - 1.0);
    ok = ok && rel <= 0.005;
    d << "se(" << fmt(deltas[i], 4) << ")=" << fmt(v, 7) << " ref " << refs[i]
      << " (" << fmt(rel * 100.0, 2) << "%); ";
  }
  const double sec = timer.seconds();
  ok = ok && sec < 1.0;
  d << fmt(sec, 3) << " s (limit 1)";
  return {ok, d.str()};
}

// 2: effective SE table (rows alpha=0, ratio 200, ratio 20; K=1..4, Nt=4)
// plus the quoted K=2-over-K=1 gains.
inline CheckResult check_overhead_se_table(const ValidationOptions&) {
  Timer timer;
  const double refs[3][4] = {{3.968, 5.018, 4.249, 3.517},
                             {3.889, 4.817, 3.994, 3.236},
                             {3.174, 3.011, 1.699, 0.703}};
  const double ref_gains[2] = {26.4, 23.8};  // rows alpha=0 and ratio 200
  const double ratios[3] = {0.0, 200.0, 20.0};  // 0 marks the alpha=0 row
  const int fixed_nt = 4;

  double c0[4];
  for (int k = 1; k <= 4; ++k)
    c0[k - 1] = ergodic_se_marginal(k, fixed_nt, 4.0, 0.0).value;

  bool ok = true;
  std::ostringstream d;
  for (int r = 0; r < 3; ++r) {
    d << (r == 0 ? "alpha=0:" : (r == 1 ? " | ratio 200:" : " | ratio 20:"));
    for (int k = 1; k <= 4; ++k) {
      const double alpha =
          ratios[r] == 0.0 ? 0.0 : k * fixed_nt / ratios[r];
      const double cell = (1.0 - alpha) * c0[k - 1];
      const double rel = std::fabs(cell / refs[r][k - 1] - 1.0);
      ok = ok && rel <= 0.01;
      d << ' ' << fmt(cell, 5) << (rel <= 0.01 ? "" : "(!)");
    }
  }
  for (int r = 0; r < 2; ++r) {
    const double a1 = ratios[r] == 0.0 ? 0.0 : 1.0 * fixed_nt / ratios[r];
    const double a2 = ratios[r] == 0.0 ? 0.0 : 2.0 * fixed_nt / ratios[r];
    const double gain =
        100.0 * ((1.0 - a2) * c0[1] / ((1.0 - a1) * c0[0]) - 1.0);
    const double rel = std::fabs(gain / ref_gains[r] - 1.0);
    ok = ok && rel <= 0.01;
    d << " | gain" << (r == 0 ? "(alpha=0)=" : "(ratio 200)=") << fmt(gain, 3)
      << "% vs quoted " << ref_gains[r] << '%' << (rel <= 0.01 ? "" : "(!)");
  }
  const double sec = timer.seconds();
  ok = ok && sec < 10.0;
  d << " | " << fmt(sec, 3) << " s (limit 10)";
  return {ok, d.str()};
}

// 3: optimal cluster cardinality endpoints in nt-equals-k mode.
inline CheckResult check_optimal_cluster_size(const ValidationOptions&) {
  OptimizeRequest req;
  req.mode = OptimizeMode::nt_equals_k;
  req.beta = 4.0;
  req.coherence_ratio = 20.0;
  const auto r20 = optimize_k(req);
  req.coherence_ratio = 200.0;
  const auto r200 = optimize_k(req);
  const bool ok = r20.k_star == 2 && r200.k_star == 5;
  std::ostringstream d;
  d << "k_star(20)=" << r20.k_star << " (want 2), k_star(200)=" << r200.k_star
    << " (want 5)";
  return {ok, d.str()};
}

// 4: closed-form marginal approximation vs empirical CCDF, K=Nt in
// {1,2,4,8}, beta=4, gamma in [-10, 20] dB.
inline CheckResult check_marginal_approx_vs_mc(const ValidationOptions& opts) {
  Timer timer;
  bool ok = true;
  std::ostringstream d;
  for (const int k : {1, 2, 4, 8}) {
    McExperiment e;
    e.mode = McMode::ppp;
    e.k = k;
    e.nt = k;
    e.beta = 4.0;
    e.trials = 100000;
    e.seed = opts.seed + static_cast<std::uint64_t>(k);
    e.threads = opts.threads;
    e.gamma_grid_db.clear();
    for (int db = -10; db <= 20; ++db) e.gamma_grid_db.push_back(db);
    const EmpiricalCcdf emp = run_experiment(e);
    double max_gap = 0.0;
    for (std::size_t i = 0; i < e.gamma_grid_db.size(); ++i) {
      const double approx =
          ccdf_marginal_approx(k, k, 4.0, db_to_linear(e.gamma_grid_db[i]))
              .upper;
      max_gap = std::max(max_gap, std::fabs(approx - emp.curve.value[i]));
    }
    ok = ok && max_gap <= 0.03;
    d << "K=" << k << " max|approx-emp|=" << fmt(max_gap, 4)
      << (max_gap <= 0.03 ? "" : "(!)") << "; ";
  }
  const double sec = timer.seconds();
  ok = ok && sec < 120.0;
  d << fmt(sec, 4) << " s (limit 120)";
  return {ok, d.str()};
}

// 5: delta1-conditioned Monte-Carlo vs the exact conditional CCDF.
inline CheckResult check_conditional_mc_vs_exact(const ValidationOptions& opts) {
  McExperiment e;
  e.mode = McMode::ppp_conditional_delta1;
  e.k = 2;
  e.nt = 2;
  e.beta = 4.0;
  e.delta1_target = 0.5;
  e.delta1_tolerance = 0.01;
  e.trials = 25000;
  e.seed = opts.seed + 21;
  e.threads = opts.threads;
  const EmpiricalCcdf emp = run_experiment(e);

  bool ok = emp.accepted_trials >= 20000;
  double worst = 0.0;
  for (std::size_t i = 0; i < emp.curve.gamma_db.size(); ++i) {
    const double exact = ccdf_conditional_exact(
        2, 2, 4.0, 0.5, db_to_linear(emp.curve.gamma_db[i]));
    const double hw = 0.5 * (emp.ci_hi[i] - emp.ci_lo[i]);
    const double ratio = std::fabs(emp.curve.value[i] - exact) / (3.0 * hw);
    worst = std::max(worst, ratio);
  }
  ok = ok && worst <= 1.0;
  std::ostringstream d;
  d << "accepted=" << emp.accepted_trials << " (floor 20000), acceptance rate "
    << fmt(emp.acceptance_rate, 4) << ", worst |emp-exact|/(3 Wilson hw)="
    << fmt(worst, 4);
  return {ok, d.str()};
}

// 6: explicit-pipeline ZF desired gain vs Gamma(Nt-K+1, 1), plus residuals.
inline CheckResult check_fading_law(const ValidationOptions& opts) {
  const std::pair<int, int> configs[] = {{2, 2}, {4, 2}, {4, 4}};  // (nt, k)
  const std::size_t n = 100000;
  bool ok = true;
  std::ostringstream d;
  int cfg_idx = 0;
  for (const auto& [nt, k] : configs) {
    std::vector<double> gains(n);
    double max_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      auto rng = make_stream(opts.seed + 101 * (cfg_idx + 1),
                             static_cast<std::uint64_t>(i));
      const ChannelSet channels = draw_channel_set(k, nt, rng);
      const BeamformingSolution bf = solve_zf_beamformer(channels.rows);
      gains[i] = bf.gain;
      max_res = std::max(max_res, bf.max_residual);
    }
    std::sort(gains.begin(), gains.end());
    const int m = nt - k + 1;
    const double ks = ks_statistic(
        std::span<const double>(gains), [m](double x) { return gamma_p(m, x); });
    const double crit = ks_critical(n);
    ok = ok && ks <= crit && max_res < 1e-10;
    d << "(Nt=" << nt << ",K=" << k << ") KS=" << fmt(ks, 4) << " crit "
      << fmt(crit, 4) << " max_res=" << fmt(max_res, 3) << "; ";
    ++cfg_idx;
  }
  return {ok, d.str()};
}

// 7: empirical Kth-neighbor distance and delta1 laws.
inline CheckResult check_distance_laws(const ValidationOptions& opts) {
  const std::size_t n = 2000;
  bool ok = true;
  std::ostringstream d;
  for (const int k : {2, 3, 5}) {
    std::vector<double> dk(n);
    std::vector<double> delta1(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto rng = make_stream(opts.seed + 201 + static_cast<std::uint64_t>(k),
                             static_cast<std::uint64_t>(i));
      std::exponential_distribution<double> exp1(1.0);
      double first = 0.0;
      double acc = 0.0;
      for (int j = 0; j < k; ++j) {
        acc += exp1(rng);
        if (j == 0) first = acc;
      }
      dk[i] = std::sqrt(acc / std::numbers::pi);  // lambda = 1
      delta1[i] = std::sqrt(first / acc);
    }
    std::sort(dk.begin(), dk.end());
    std::sort(delta1.begin(), delta1.end());
    const double ks_d = ks_statistic(
        std::span<const double>(dk),
        [k](double x) { return gamma_p(k, std::numbers::pi * x * x); });
    const double ks_delta = ks_statistic(
        std::span<const double>(delta1),
        [k](double x) { return delta1_cdf(k, std::clamp(x, 0.0, 1.0)); });
    const double crit = ks_critical(n);
    ok = ok && ks_d <= crit && ks_delta <= crit;
    d << "K=" << k << " KS(dK)=" << fmt(ks_d, 4) << " KS(delta1)="
      << fmt(ks_delta, 4) << " crit " << fmt(crit, 4) << "; ";
  }
  return {ok, d.str()};
}

// 8: empirical marginal CCDF sandwiched by the analytic bounds.
inline CheckResult check_bound_sandwich(const ValidationOptions& opts) {
  const std::pair<int, int> configs[] = {{1, 2}, {2, 4}};  // (k, nt)
  bool ok = true;
  std::ostringstream d;
  int cfg_idx = 0;
  for (const auto& [k, nt] : configs) {
    McExperiment e;
    e.mode = McMode::ppp;
    e.k = k;
    e.nt = nt;
    e.beta = 4.0;
    e.trials = 50000;
    e.seed = opts.seed + 301 + static_cast<std::uint64_t>(cfg_idx);
    e.threads = opts.threads;
    const EmpiricalCcdf emp = run_experiment(e);
    double worst = 0.0;  // positive = violation in units of 3*halfwidth
    for (std::size_t i = 0; i < emp.curve.gamma_db.size(); ++i) {
      const CcdfBounds b =
          ccdf_marginal_bounds(k, nt, 4.0, db_to_linear(emp.curve.gamma_db[i]));
      const double hw = 0.5 * (emp.ci_hi[i] - emp.ci_lo[i]);
      const double margin = 3.0 * hw;
      const double below = b.lower - margin - emp.curve.value[i];
      const double above = emp.curve.value[i] - (b.upper + margin);
      worst = std::max({worst, below, above});
    }
    ok = ok && worst <= 0.0;
    d << "(K=" << k << ",Nt=" << nt << ") worst violation=" << fmt(worst, 4)
      << "; ";
    ++cfg_idx;
  }
  return {ok, d.str()};
}

// 9: low-SIR slope of the closed-form approximation at gamma = 1e-3.
inline CheckResult check_low_sir_slope(const ValidationOptions&) {
  const double gamma = 1e-3;
  bool ok = true;
  std::ostringstream d;
  for (const int k : {2, 3, 4}) {
    const double f_approx = ccdf_marginal_approx(k, k, 4.0, gamma).upper;
    const double stat = (1.0 - f_approx) * (k + 1) / gamma;
    const double f_exact = ccdf_marginal_bounds(k, k, 4.0, gamma).upper;
    const double stat_exact = (1.0 - f_exact) * (k + 1) / gamma;
    ok = ok && std::fabs(stat - 1.0) < 0.02;
    d << "K=" << k << " approx-stat=" << fmt(stat, 5) << " (exact-route "
      << fmt(stat_exact, 5) << "); ";
  }
  return {ok, d.str()};
}

// 10: quadrature route vs closed form for the interference scaling, and the
// exponential sandwich of the chi-squared CDF.
inline CheckResult check_specfun_identities(const ValidationOptions&) {
  bool ok = true;
  double worst_rel = 0.0;
  for (int p = -6; p <= 6; ++p) {
    const double xi = std::pow(10.0, p);
    const double quad = d_function(xi, 4.0);
    const double closed = d_function_beta4(xi);
    worst_rel = std::max(worst_rel, std::fabs(quad / closed - 1.0));
  }
  ok = ok && worst_rel <= 1e-10;

  double worst_gap = 0.0;
  for (const int m : {1, 2, 3}) {
    const double kap = alzer_kappa(m);
    for (int i = 0; i < 100; ++i) {
      const double x = std::pow(10.0, -2.0 + 3.5 * i / 99.0);
      const double p = gamma_p(m, x);
      const double lo = std::pow(1.0 - std::exp(-kap * x), m);
      const double hi = std::pow(1.0 - std::exp(-x), m);
      worst_gap = std::max({worst_gap, lo - p, p - hi});
    }
  }
  ok = ok && worst_gap <= 1e-12;

  double worst_order = 0.0;  // bound curves must satisfy lower <= upper
  for (const int m : {1, 2, 3}) {
    for (int i = 0; i < 100; ++i) {
      const double g = std::pow(10.0, -2.0 + 3.5 * i / 99.0);
      const CcdfBounds b = ccdf_conditional_bounds(2, 1 + m, 4.0, 0.7, g);
      worst_order = std::max(worst_order, b.lower - b.upper);
    }
  }
  ok = ok && worst_order <= 1e-12;

  std::ostringstream d;
  d << "max rel(d_function vs closed form)=" << fmt(worst_rel, 3)
    << ", max sandwich violation=" << fmt(worst_gap, 3)
    << ", max bound-order violation=" << fmt(worst_order, 3);
  return {ok, d.str()};
}

// 11: the density cancels: analytic series agrees across lambda, and
// empirical curves at lambda in {0.5, 2} overlap within 95% CIs.
inline CheckResult check_lambda_invariance(const ValidationOptions& opts) {
  bool ok = true;
  std::ostringstream d;
  double worst_series = 0.0;
  for (const double gdb : {-5.0, 0.0, 5.0, 10.0}) {
    const double g = db_to_linear(gdb);
    const double f_a = ccdf_conditional_series(2, 3, 4.0, 0.6, g, 0.5);
    const double f_b = ccdf_conditional_series(2, 3, 4.0, 0.6, g, 2.0);
    worst_series = std::max(worst_series, std::fabs(f_a - f_b));
  }
  ok = ok && worst_series <= 1e-4;
  d << "max series |F(0.5)-F(2)|=" << fmt(worst_series, 3);

  McExperiment e;
  e.mode = McMode::ppp;
  e.k = 2;
  e.nt = 3;
  e.beta = 4.0;
  e.trials = 50000;
  e.threads = opts.threads;
  e.lambda = 0.5;
  e.seed = opts.seed + 401;
  const EmpiricalCcdf lo_density = run_experiment(e);
  e.lambda = 2.0;
  e.seed = opts.seed + 402;
  const EmpiricalCcdf hi_density = run_experiment(e);
  double worst_gap = 0.0;
  for (std::size_t i = 0; i < lo_density.curve.gamma_db.size(); ++i) {
    const double gap = std::max(lo_density.ci_lo[i], hi_density.ci_lo[i]) -
                       std::min(lo_density.ci_hi[i], hi_density.ci_hi[i]);
    worst_gap = std::max(worst_gap, gap);
  }
  ok = ok && worst_gap <= 0.0;
  d << ", worst empirical CI gap=" << fmt(worst_gap, 3) << " (<=0 overlaps)";
  return {ok, d.str()};
}

// 12: lattice deployments dominate the PPP CCDF (ordering only).
inline CheckResult check_grid_vs_ppp(const ValidationOptions& opts) {
  bool ok = true;
  std::ostringstream d;
  for (const int k : {1, 2}) {
    McExperiment grid;
    grid.mode = McMode::grid;
    grid.k = k;
    grid.nt = k;
    grid.beta = 4.0;
    grid.trials = 100000;
    grid.seed = opts.seed + 501 + static_cast<std::uint64_t>(k);
    grid.threads = opts.threads;
    const EmpiricalCcdf g = run_experiment(grid);

    McExperiment ppp;
    ppp.mode = McMode::ppp;
    ppp.k = k;
    ppp.nt = k;
    ppp.beta = 4.0;
    ppp.trials = 100000;
    ppp.seed = opts.seed + 601 + static_cast<std::uint64_t>(k);
    ppp.threads = opts.threads;
    const EmpiricalCcdf p = run_experiment(ppp);

    double worst = 0.0;
    for (std::size_t i = 0; i < p.curve.gamma_db.size(); ++i) {
      const double hw = 0.5 * (p.ci_hi[i] - p.ci_lo[i]);
      worst = std::max(worst, p.curve.value[i] - 3.0 * hw - g.curve.value[i]);
    }
    ok = ok && worst <= 0.0;
    d << "K=Nt=" << k << " worst (ppp-3hw)-grid=" << fmt(worst, 4) << "; ";
  }
  return {ok, d.str()};
}

}  // namespace detail

inline std::vector<CriterionResult> run_acceptance(
    const ValidationOptions& opts) {
  struct Entry {
    int id;
    const char* name;
    detail::CheckResult (*fn)(const ValidationOptions&);
  };
  static const Entry entries[] = {
      {1, "conditional-se-table", &detail::check_conditional_se_table},
      {2, "overhead-se-table", &detail::check_overhead_se_table},
      {3, "optimal-cluster-size", &detail::check_optimal_cluster_size},
      {4, "marginal-approx-vs-mc", &detail::check_marginal_approx_vs_mc},
      {5, "conditional-mc-vs-exact", &detail::check_conditional_mc_vs_exact},
      {6, "fading-law", &detail::check_fading_law},
      {7, "distance-laws", &detail::check_distance_laws},
      {8, "bound-sandwich", &detail::check_bound_sandwich},
      {9, "low-sir-slope", &detail::check_low_sir_slope},
      {10, "specfun-identities", &detail::check_specfun_identities},
      {11, "lambda-invariance", &detail::check_lambda_invariance},
      {12, "grid-vs-ppp", &detail::check_grid_vs_ppp},
  };

  std::vector<CriterionResult> results;
  for (const Entry& entry : entries) {
    if (opts.only_id != 0 && entry.id != opts.only_id) continue;
    if (!opts.only.empty() &&
        std::string(entry.name).find(opts.only) == std::string::npos)
      continue;
    CriterionResult r;
    r.id = entry.id;
    r.name = entry.name;
    if (opts.inject_fail == entry.id) {
      r.passed = false;
      r.detail = "failure injected via the inject-fail testing hook";
    } else {
      try {
        const auto [ok, detail_text] = entry.fn(opts);
        r.passed = ok;
        r.detail = detail_text;
      } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
      }
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace compbf
