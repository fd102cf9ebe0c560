#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "compbf/analytic.hpp"
#include "compbf/channel.hpp"
#include "compbf/curve.hpp"
#include "compbf/errors.hpp"
#include "compbf/geometry.hpp"
#include "compbf/rng.hpp"
#include "compbf/stats.hpp"

namespace compbf {

enum class McMode { ppp, ppp_conditional_delta1, grid };

inline const char* mc_mode_name(McMode mode) {
  switch (mode) {
    case McMode::ppp: return "ppp";
    case McMode::ppp_conditional_delta1: return "ppp-conditional-delta1";
    case McMode::grid: return "grid";
  }
  return "unknown";
}

inline std::vector<double> default_gamma_grid_db() {
  std::vector<double> grid;
  for (int db = -10; db <= 30; ++db) grid.push_back(static_cast<double>(db));
  return grid;
}

struct McExperiment {
  McMode mode = McMode::ppp;
  int k = 1;
  int nt = 1;
  double beta = 4.0;
  long long trials = 100000;
  std::vector<double> gamma_grid_db = default_gamma_grid_db();
  double lambda = 1.0;
  double window_radius = 0.0;  // 0 = derive from expected-count rule
  double delta1_target = 0.5;
  double delta1_tolerance = 0.01;
  std::uint64_t seed = 1;
  bool full_pipeline = false;  // explicit channels + ZF instead of gain laws
  int threads = 0;             // 0 = COMPBF_THREADS, then hardware count
  GridSpec grid{};

  void validate() const {
    validate_cluster(k, nt, beta);
    if (trials < 1) throw DomainError("trials must be positive");
    if (gamma_grid_db.empty()) throw DomainError("gamma grid is empty");
    for (std::size_t i = 1; i < gamma_grid_db.size(); ++i)
      if (!(gamma_grid_db[i] > gamma_grid_db[i - 1]))
        throw DomainError("gamma grid must be strictly ascending");
    if (mode != McMode::grid) {
      if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
      if (window_radius < 0.0) throw DomainError("window radius must be nonnegative");
    }
    if (mode == McMode::ppp_conditional_delta1) {
      if (!(delta1_tolerance > 0.0))
        throw DomainError("delta1 tolerance must be positive");
      if (!(delta1_target > 0.0) || !(delta1_target <= 1.0))
        throw DomainError("delta1 target must lie in (0, 1]");
    }
    if (mode == McMode::grid) {
      if (grid.side_count < 1 || !(grid.spacing > 0.0))
        throw DomainError("grid spec requires side_count >= 1 and spacing > 0");
      if (!(grid.drop_region[2] > grid.drop_region[0]) ||
          !(grid.drop_region[3] > grid.drop_region[1]))
        throw DomainError("grid drop region must have positive extent");
      if (k >= grid.side_count * grid.side_count)
        throw DomainError("cluster size must leave at least one interferer");
    }
  }
};

struct EmpiricalCcdf {
  SirCcdfCurve curve;  // kind = "empirical"
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;
  long long trials = 0;
  long long accepted_trials = 0;
  double acceptance_rate = 1.0;
};

struct SpectralEfficiencyEstimate {
  double value = 0.0;      // (1 - alpha) * mean log2(1 + SIR)
  double std_error = 0.0;  // standard error of `value`
  long long trials = 0;
};

namespace detail {

inline constexpr long long kChunk = 1024;
inline constexpr long long kMaxAttemptsPerTrial = 200000;

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("COMPBF_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Expected point count in the simulation window: enough tail mass beyond the
// cluster that truncation bias is far below Monte-Carlo noise.
inline double window_expected_points(int k) {
  return std::max(500.0, 1001.0 * static_cast<double>(k));
}

inline double auto_window_radius(const McExperiment& exp) {
  if (exp.window_radius > 0.0) return exp.window_radius;
  const double n = window_expected_points(exp.k);
  return std::sqrt(n / (exp.lambda * std::numbers::pi));
}

// Window edge in scaled squared distance (pi*lambda*d^2), i.e. the expected
// number of points inside the window.
inline double scaled_window_max(const McExperiment& exp) {
  if (exp.mode == McMode::grid) return 0.0;
  const double r = auto_window_radius(exp);
  return exp.lambda * std::numbers::pi * r * r;
}

// Per-trial reusable buffers.
struct TrialScratch {
  std::vector<double> scaled_sq;               // pi*lambda*d^2 arrivals
  std::vector<std::array<double, 2>> grid_bs;  // grid mode: fixed positions
  std::vector<double> grid_d2;
};

// Draw one SIR sample. Draw order is fixed (radial gaps, desired-link fading,
// interferer fadings in ascending distance) so results are reproducible for a
// given (seed, trial) pair. Conditional mode rejects on the first k arrivals
// only and continues the tail once accepted. Returns +inf when no interferer
// lies inside the window.
inline double sample_sir(const McExperiment& exp, std::mt19937_64& rng,
                         double s_max, TrialScratch& scratch,
                         long long& attempts) {
  std::exponential_distribution<double> exp1(1.0);
  const int k = exp.k;
  const double half_beta = 0.5 * exp.beta;
  const bool beta4 = exp.beta == 4.0;

  double d2_serving = 0.0;  // squared serving distance
  std::size_t first_interferer = 0;
  const double* d2_values = nullptr;  // squared distances, scaled or raw
  std::size_t n_points = 0;
  double d2_scale = 1.0;  // multiply scaled values by this to get d^2

  if (exp.mode == McMode::grid) {
    auto& d2 = scratch.grid_d2;
    d2.resize(scratch.grid_bs.size());
    std::uniform_real_distribution<double> ux(exp.grid.drop_region[0],
                                              exp.grid.drop_region[2]);
    std::uniform_real_distribution<double> uy(exp.grid.drop_region[1],
                                              exp.grid.drop_region[3]);
    const double x = ux(rng);
    const double y = uy(rng);
    for (std::size_t i = 0; i < scratch.grid_bs.size(); ++i) {
      const double dx = scratch.grid_bs[i][0] - x;
      const double dy = scratch.grid_bs[i][1] - y;
      d2[i] = dx * dx + dy * dy;
    }
    std::sort(d2.begin(), d2.end());
    ++attempts;
    d2_serving = d2[0];
    first_interferer = static_cast<std::size_t>(k);
    d2_values = d2.data();
    n_points = d2.size();
  } else {
    auto& s = scratch.scaled_sq;
    s.clear();
    double acc = 0.0;
    if (exp.mode == McMode::ppp_conditional_delta1) {
      const double lo = exp.delta1_target - exp.delta1_tolerance;
      const double hi = exp.delta1_target + exp.delta1_tolerance;
      for (;;) {
        ++attempts;
        s.clear();
        acc = 0.0;
        for (int i = 0; i < k; ++i) {
          acc += exp1(rng);
          s.push_back(acc);
        }
        const double delta1 = std::sqrt(s.front() / s.back());
        if (delta1 >= lo && delta1 <= hi) break;
        if (attempts >= kMaxAttemptsPerTrial)
          throw StarvationError(
              "delta1 acceptance band too narrow: attempt cap reached");
      }
    } else {
      ++attempts;
    }
    for (;;) {
      const double next = acc + exp1(rng);
      if (next > s_max) break;
      acc = next;
      s.push_back(acc);
    }
    if (s.size() < static_cast<std::size_t>(k))
      return std::numeric_limits<double>::infinity();
    d2_scale = 1.0 / (exp.lambda * std::numbers::pi);
    d2_serving = s[0] * d2_scale;
    first_interferer = static_cast<std::size_t>(k);
    d2_values = s.data();
    n_points = s.size();
  }

  double desired_gain = 0.0;
  if (exp.full_pipeline) {
    const ChannelSet channels = draw_channel_set(k, exp.nt, rng);
    desired_gain = solve_zf_beamformer(channels.rows).gain;
  } else {
    desired_gain = fading_shortcut_sample(k, exp.nt, rng);
  }

  double denom = 0.0;
  for (std::size_t i = first_interferer; i < n_points; ++i) {
    const double d2 = d2_values[i] * d2_scale;
    const double w = beta4 ? 1.0 / (d2 * d2) : std::pow(d2, -half_beta);
    denom += exp1(rng) * w;
  }
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();

  const double num =
      desired_gain *
      (beta4 ? 1.0 / (d2_serving * d2_serving) : std::pow(d2_serving, -half_beta));
  return num / denom;
}

// Deterministic chunked execution: trials are split into fixed-size chunks,
// each chunk's accumulator is filled by whichever worker claims it, and the
// results are merged in chunk order so the output is independent of thread
// count and scheduling.
template <typename State, typename PerTrial>
void run_chunked(const McExperiment& exp, std::vector<State>& states,
                 PerTrial per_trial) {
  const long long n_chunks = (exp.trials + kChunk - 1) / kChunk;
  states.assign(static_cast<std::size_t>(n_chunks), State{});
  const int n_threads = static_cast<int>(
      std::min<long long>(resolve_threads(exp.threads), n_chunks));
  std::atomic<long long> next_chunk{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;

  auto worker = [&]() {
    TrialScratch scratch;
    if (exp.mode == McMode::grid) scratch.grid_bs = build_grid(exp.grid);
    for (;;) {
      const long long c = next_chunk.fetch_add(1, std::memory_order_relaxed);
      if (c >= n_chunks || failed.load(std::memory_order_relaxed)) break;
      State& state = states[static_cast<std::size_t>(c)];
      const long long lo = c * kChunk;
      const long long hi = std::min(exp.trials, lo + kChunk);
      try {
        for (long long t = lo; t < hi; ++t) {
          auto rng = make_stream(exp.seed, static_cast<std::uint64_t>(t));
          per_trial(state, t, rng, scratch);
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) error_message = e.what();
        break;
      }
    }
  };

  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failed.load()) throw StarvationError(error_message);
}

// Reject configurations whose acceptance band carries negligible probability
// before burning any samples.
inline void check_conditional_feasibility(const McExperiment& exp) {
  const double lo = exp.delta1_target - exp.delta1_tolerance;
  const double hi = exp.delta1_target + exp.delta1_tolerance;
  double mass = 0.0;
  if (exp.k == 1) {
    mass = (lo <= 1.0 && hi >= 1.0) ? 1.0 : 0.0;  // delta1 is identically 1
  } else {
    const double a = std::clamp(lo, 0.0, 1.0);
    const double b = std::clamp(hi, 0.0, 1.0);
    mass = b > a ? delta1_cdf(exp.k, b) - delta1_cdf(exp.k, a) : 0.0;
  }
  if (mass < 1e-4)
    throw StarvationError("delta1 acceptance band mass below 1e-4");
}

}  // namespace detail

inline EmpiricalCcdf run_experiment(const McExperiment& exp) {
  exp.validate();
  if (exp.mode == McMode::ppp_conditional_delta1)
    detail::check_conditional_feasibility(exp);

  const double s_max = detail::scaled_window_max(exp);

  std::vector<double> gamma_lin(exp.gamma_grid_db.size());
  for (std::size_t i = 0; i < gamma_lin.size(); ++i)
    gamma_lin[i] = db_to_linear(exp.gamma_grid_db[i]);

  struct ChunkState {
    std::vector<long long> bin;  // bin[j]: trials with j grid points below SIR
    long long attempts = 0;
  };
  const std::size_t n_bins = gamma_lin.size() + 1;

  std::vector<ChunkState> states;
  detail::run_chunked(exp, states,
                      [&](ChunkState& st, long long, std::mt19937_64& rng,
                          detail::TrialScratch& scratch) {
                        if (st.bin.empty()) st.bin.assign(n_bins, 0);
                        const double sir = detail::sample_sir(
                            exp, rng, s_max, scratch, st.attempts);
                        const std::size_t j = static_cast<std::size_t>(
                            std::lower_bound(gamma_lin.begin(), gamma_lin.end(),
                                             sir) -
                            gamma_lin.begin());
                        ++st.bin[j];
                      });

  std::vector<long long> bin(n_bins, 0);
  long long attempts = 0;
  for (const auto& st : states) {
    attempts += st.attempts;
    if (st.bin.empty()) continue;
    for (std::size_t j = 0; j < n_bins; ++j) bin[j] += st.bin[j];
  }

  // exceed[i] = # trials with SIR strictly above gamma_lin[i]
  EmpiricalCcdf out;
  out.trials = exp.trials;
  out.accepted_trials = exp.trials;
  out.acceptance_rate =
      attempts > 0 ? static_cast<double>(exp.trials) / static_cast<double>(attempts)
                   : 1.0;
  out.curve.kind = "empirical";
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out.curve.config = {
      {"mode", mc_mode_name(exp.mode)},
      {"k", std::to_string(exp.k)},
      {"nt", std::to_string(exp.nt)},
      {"beta", num(exp.beta)},
      {"trials", std::to_string(exp.trials)},
      {"seed", std::to_string(exp.seed)},
      {"full_pipeline", exp.full_pipeline ? "1" : "0"},
  };
  if (exp.mode != McMode::grid) {
    out.curve.config.emplace_back("lambda", num(exp.lambda));
    out.curve.config.emplace_back("window_radius",
                                  num(detail::auto_window_radius(exp)));
  }
  if (exp.mode == McMode::ppp_conditional_delta1) {
    out.curve.config.emplace_back("delta1_target", num(exp.delta1_target));
    out.curve.config.emplace_back("delta1_tolerance", num(exp.delta1_tolerance));
    out.curve.config.emplace_back("acceptance_rate", num(out.acceptance_rate));
  }
  out.curve.gamma_db = exp.gamma_grid_db;
  out.curve.value.resize(gamma_lin.size());
  out.ci_lo.resize(gamma_lin.size());
  out.ci_hi.resize(gamma_lin.size());
  long long exceed = 0;
  for (std::size_t i = gamma_lin.size(); i-- > 0;) {
    exceed += bin[i + 1];
    out.curve.value[i] =
        static_cast<double>(exceed) / static_cast<double>(exp.trials);
    const auto [lo, hi] = wilson_interval(exceed, exp.trials);
    out.ci_lo[i] = lo;
    out.ci_hi[i] = hi;
  }
  validate_curve(out.curve);
  return out;
}

// Empirical ergodic spectral efficiency: (1 - alpha) * E[log2(1 + SIR)] with
// the expectation taken per trial and a standard-error CI.
inline SpectralEfficiencyEstimate empirical_spectral_efficiency(
    const McExperiment& exp, double alpha) {
  exp.validate();
  if (!(alpha >= 0.0) || alpha > 1.0)
    throw DomainError("overhead fraction must lie in [0, 1]");
  if (exp.mode == McMode::ppp_conditional_delta1)
    detail::check_conditional_feasibility(exp);

  const double s_max = detail::scaled_window_max(exp);

  struct ChunkState {
    double sum = 0.0;
    double sum_sq = 0.0;
    long long attempts = 0;
  };
  std::vector<ChunkState> states;
  detail::run_chunked(exp, states,
                      [&](ChunkState& st, long long, std::mt19937_64& rng,
                          detail::TrialScratch& scratch) {
                        const double sir = detail::sample_sir(
                            exp, rng, s_max, scratch, st.attempts);
                        const double se = std::log2(1.0 + sir);
                        st.sum += se;
                        st.sum_sq += se * se;
                      });

  double sum = 0.0;
  double sum_sq = 0.0;
  for (const auto& st : states) {
    sum += st.sum;
    sum_sq += st.sum_sq;
  }
  const double n = static_cast<double>(exp.trials);
  const double mean = sum / n;
  const double var =
      exp.trials > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;

  SpectralEfficiencyEstimate out;
  out.trials = exp.trials;
  out.value = (1.0 - alpha) * mean;
  out.std_error = (1.0 - alpha) * std::sqrt(var / n);
  return out;
}

}  // namespace compbf
