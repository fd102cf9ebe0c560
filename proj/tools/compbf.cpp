// Command-line front end: analytical CCDF curves, Monte-Carlo experiments,
// spectral-efficiency tables, cluster-size optimization, and the validation
// suite. Exit codes: 0 ok, 1 usage, 2 domain/runtime, 3 validation failure.
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "compbf/compbf.hpp"

namespace fs = std::filesystem;

namespace {

struct CcdfArgs {
  std::vector<int> ks{2};
  int nt = 0;  // 0: track k
  double beta = 4.0;
  double delta1 = 0.5;
  std::string mode = "marginal";
  long long trials = 100000;
  std::uint64_t seed = 1;
  double lambda = 1.0;
  std::string out_dir = "out";
  int fig = 0;
  bool k_given = false;
};

struct TablesArgs {
  int which = 0;
  std::string out_dir = "out";
};

struct OptimizeArgs {
  std::string mode = "nt-equals-k";
  std::vector<double> coherence;
  int nt = 4;
  std::vector<double> c_values;
  double beta = 4.0;
  std::string out_dir = "out";
};

// Collects output files for one invocation and writes the manifest last.
struct OutputSet {
  fs::path dir;
  compbf::RunManifest manifest;

  void add_curve(const std::string& name, const compbf::SirCcdfCurve& curve,
                 const std::vector<double>& ci_lo = {},
                 const std::vector<double>& ci_hi = {}) {
    compbf::write_curve_csv(dir / name, curve, ci_lo, ci_hi);
    manifest.outputs.push_back(name);
    std::printf("wrote %s\n", (dir / name).string().c_str());
  }

  void add_text(const std::string& name, const std::string& content) {
    compbf::atomic_write_text(dir / name, content);
    manifest.outputs.push_back(name);
    std::printf("wrote %s\n", (dir / name).string().c_str());
  }

  void finish(const std::string& manifest_name) {
    compbf::write_manifest(dir / manifest_name, manifest);
    std::printf("wrote %s\n", (dir / manifest_name).string().c_str());
  }
};

compbf::SirCcdfCurve analytic_curve(
    const std::string& kind, const std::vector<double>& gamma_db,
    const std::function<double(double)>& ccdf_of_gamma,
    std::vector<std::pair<std::string, std::string>> config) {
  compbf::SirCcdfCurve curve;
  curve.kind = kind;
  curve.gamma_db = gamma_db;
  curve.config = std::move(config);
  curve.value.reserve(gamma_db.size());
  for (const double db : gamma_db) {
    const double v = ccdf_of_gamma(compbf::db_to_linear(db));
    curve.value.push_back(std::clamp(v, 0.0, 1.0));
  }
  compbf::validate_curve(curve);
  return curve;
}

std::vector<std::pair<std::string, std::string>> base_config(int k, int nt,
                                                             double beta) {
  return {{"k", std::to_string(k)},
          {"nt", std::to_string(nt)},
          {"beta", compbf::format_double(beta)}};
}

compbf::McExperiment make_experiment(const CcdfArgs& args, int k, int nt,
                                     std::uint64_t seed_offset) {
  compbf::McExperiment e;
  e.k = k;
  e.nt = nt;
  e.beta = args.beta;
  e.trials = args.trials;
  e.lambda = args.lambda;
  e.seed = args.seed + seed_offset;
  return e;
}

// Conditional-mode analytic curve(s): exact at K=Nt, the series form while
// the fading order stays within the supported derivative depth, bounds
// otherwise.
void emit_conditional_analytic(OutputSet& out, const std::string& base,
                               int k, int nt, double beta, double delta1,
                               const std::vector<double>& grid) {
  auto config = base_config(k, nt, beta);
  config.emplace_back("delta1", compbf::format_double(delta1));
  if (k == nt) {
    out.add_curve(base + "_exact.csv",
                  analytic_curve(
                      "exact", grid,
                      [&](double g) {
                        return compbf::ccdf_conditional_exact(k, nt, beta,
                                                              delta1, g);
                      },
                      config));
  } else if (nt - k <= 3) {
    out.add_curve(base + "_series.csv",
                  analytic_curve(
                      "series", grid,
                      [&](double g) {
                        return compbf::ccdf_conditional_series(k, nt, beta,
                                                               delta1, g);
                      },
                      config));
  }
  if (k != nt) {
    out.add_curve(base + "_bound-lower.csv",
                  analytic_curve(
                      "bound-lower", grid,
                      [&](double g) {
                        return compbf::ccdf_conditional_bounds(k, nt, beta,
                                                               delta1, g)
                            .lower;
                      },
                      config));
    out.add_curve(base + "_bound-upper.csv",
                  analytic_curve(
                      "bound-upper", grid,
                      [&](double g) {
                        return compbf::ccdf_conditional_bounds(k, nt, beta,
                                                               delta1, g)
                            .upper;
                      },
                      config));
  }
}

int run_ccdf(const CcdfArgs& args) {
  const std::vector<double> grid = compbf::default_gamma_grid_db();
  OutputSet out;
  out.dir = args.out_dir;
  out.manifest.command = "ccdf";
  out.manifest.seed = args.seed;
  out.manifest.parameters = {
      {"beta", compbf::format_double(args.beta)},
      {"delta1", compbf::format_double(args.delta1)},
      {"fig", std::to_string(args.fig)},
      {"lambda", compbf::format_double(args.lambda)},
      {"mode", args.mode},
      {"nt", std::to_string(args.nt)},
      {"trials", std::to_string(args.trials)},
  };

  std::vector<int> ks = args.ks;
  if (!args.k_given) {
    if (args.fig == 3) ks = {2, 4};
    if (args.fig == 4) ks = {1, 2, 4, 8};
    if (args.fig == 8) ks = {1, 2};
  }
  {
    std::string klist;
    for (int k : ks) klist += (klist.empty() ? "" : ",") + std::to_string(k);
    out.manifest.parameters["k"] = klist;
  }

  std::uint64_t offset = 0;
  if (args.fig == 2) {
    // Uncoordinated single-BS service (K=1) across antenna counts.
    for (const int nt : {1, 2, 4}) {
      const std::string base = "fig2_k1_nt" + std::to_string(nt);
      emit_conditional_analytic(out, base, 1, nt, args.beta, 1.0, grid);
      auto e = make_experiment(args, 1, nt, offset++);
      const auto emp = compbf::run_experiment(e);
      out.add_curve(base + "_empirical.csv", emp.curve, emp.ci_lo, emp.ci_hi);
    }
  } else if (args.fig == 3) {
    for (const int k : ks) {
      const std::string base = "fig3_k" + std::to_string(k);
      emit_conditional_analytic(out, base, k, k, args.beta, args.delta1, grid);
      auto e = make_experiment(args, k, k, offset++);
      e.mode = compbf::McMode::ppp_conditional_delta1;
      e.delta1_target = args.delta1;
      e.delta1_tolerance = 0.01;
      const auto emp = compbf::run_experiment(e);
      out.add_curve(base + "_empirical.csv", emp.curve, emp.ci_lo, emp.ci_hi);
    }
  } else if (args.fig == 4) {
    for (const int k : ks) {
      const std::string base = "fig4_k" + std::to_string(k);
      out.add_curve(base + "_approx-upper.csv",
                    analytic_curve(
                        "approx-upper", grid,
                        [&](double g) {
                          return compbf::ccdf_marginal_approx(k, k, args.beta,
                                                              g)
                              .upper;
                        },
                        base_config(k, k, args.beta)));
      auto e = make_experiment(args, k, k, offset++);
      const auto emp = compbf::run_experiment(e);
      out.add_curve(base + "_empirical.csv", emp.curve, emp.ci_lo, emp.ci_hi);
    }
  } else if (args.fig == 8) {
    for (const int k : ks) {
      const std::string base = "fig8_k" + std::to_string(k);
      out.add_curve(base + "_exact.csv",
                    analytic_curve(
                        "exact", grid,
                        [&](double g) {
                          return compbf::ccdf_marginal_bounds(k, k, args.beta,
                                                              g)
                              .upper;
                        },
                        base_config(k, k, args.beta)));
      auto ppp = make_experiment(args, k, k, offset++);
      const auto ppp_emp = compbf::run_experiment(ppp);
      out.add_curve(base + "_ppp-empirical.csv", ppp_emp.curve, ppp_emp.ci_lo,
                    ppp_emp.ci_hi);
      auto grid_exp = make_experiment(args, k, k, offset++);
      grid_exp.mode = compbf::McMode::grid;
      const auto grid_emp = compbf::run_experiment(grid_exp);
      out.add_curve(base + "_grid-empirical.csv", grid_emp.curve,
                    grid_emp.ci_lo, grid_emp.ci_hi);
    }
  } else {
    for (const int k : ks) {
      const int nt = args.nt == 0 ? k : args.nt;
      const std::string base =
          "ccdf_" + args.mode + "_k" + std::to_string(k) + "_nt" +
          std::to_string(nt);
      if (args.mode == "conditional") {
        emit_conditional_analytic(out, base, k, nt, args.beta, args.delta1,
                                  grid);
        auto e = make_experiment(args, k, nt, offset++);
        e.mode = compbf::McMode::ppp_conditional_delta1;
        e.delta1_target = args.delta1;
        e.delta1_tolerance = 0.01;
        const auto emp = compbf::run_experiment(e);
        out.add_curve(base + "_empirical.csv", emp.curve, emp.ci_lo,
                      emp.ci_hi);
      } else {
        auto config = base_config(k, nt, args.beta);
        out.add_curve(base + "_bound-lower.csv",
                      analytic_curve(
                          "bound-lower", grid,
                          [&](double g) {
                            return compbf::ccdf_marginal_bounds(k, nt,
                                                                args.beta, g)
                                .lower;
                          },
                          config));
        out.add_curve(base + "_bound-upper.csv",
                      analytic_curve(
                          "bound-upper", grid,
                          [&](double g) {
                            return compbf::ccdf_marginal_bounds(k, nt,
                                                                args.beta, g)
                                .upper;
                          },
                          config));
        out.add_curve(base + "_approx-upper.csv",
                      analytic_curve(
                          "approx-upper", grid,
                          [&](double g) {
                            return compbf::ccdf_marginal_approx(k, nt,
                                                                args.beta, g)
                                .upper;
                          },
                          config));
        auto e = make_experiment(args, k, nt, offset++);
        const auto emp = compbf::run_experiment(e);
        out.add_curve(base + "_empirical.csv", emp.curve, emp.ci_lo,
                      emp.ci_hi);
      }
    }
  }

  const std::string manifest_name =
      args.fig != 0 ? "fig" + std::to_string(args.fig) + "_manifest.json"
                    : "ccdf_manifest.json";
  out.finish(manifest_name);
  return 0;
}

int run_tables(const TablesArgs& args) {
  OutputSet out;
  out.dir = args.out_dir;
  out.manifest.command = "tables";
  out.manifest.parameters = {{"which", std::to_string(args.which)}};

  if (args.which == 1) {
    const double deltas[] = {1.0 / 3.0, 0.5, 2.0 / 3.0};
    const double refs[] = {5.377, 3.3361, 2.1318};
    std::string csv = "delta1,K,alpha,C,ref,rel_err_percent\n";
    std::printf("ergodic spectral efficiency, K=Nt=2, beta=4, alpha=0\n");
    for (int i = 0; i < 3; ++i) {
      const double c = compbf::ergodic_se_conditional(2, 2, 4.0, deltas[i],
                                                      0.0)
                           .value;
      const double rel = 100.0 * std::fabs(c / refs[i] - 1.0);
      std::printf("  delta1=%-8.4g C=%-10.6g ref=%-8g rel_err=%.3g%%\n",
                  deltas[i], c, refs[i], rel);
      csv += compbf::format_double(deltas[i]) + ",2,0," +
             compbf::format_double(c) + ',' + compbf::format_double(refs[i]) +
             ',' + compbf::format_double(rel) + "\n";
    }
    out.add_text("table1.csv", csv);
    out.finish("table1_manifest.json");
    return 0;
  }
  if (args.which == 2) {
    const double refs[3][4] = {{3.968, 5.018, 4.249, 3.517},
                               {3.889, 4.817, 3.994, 3.236},
                               {3.174, 3.011, 1.699, 0.703}};
    const char* row_names[3] = {"alpha=0", "ratio=200", "ratio=20"};
    const double ratios[3] = {0.0, 200.0, 20.0};
    const int nt = 4;
    double c0[4];
    for (int k = 1; k <= 4; ++k)
      c0[k - 1] = compbf::ergodic_se_marginal(k, nt, 4.0, 0.0).value;

    std::string csv = "row,K,alpha,C,gain_vs_K1_percent,ref,rel_err_percent\n";
    std::printf("effective spectral efficiency, Nt=4, beta=4\n");
    for (int r = 0; r < 3; ++r) {
      double cell_k1 = 0.0;
      for (int k = 1; k <= 4; ++k) {
        const double alpha = ratios[r] == 0.0 ? 0.0 : k * nt / ratios[r];
        const double cell = (1.0 - alpha) * c0[k - 1];
        if (k == 1) cell_k1 = cell;
        const double gain = 100.0 * (cell / cell_k1 - 1.0);
        const double rel = 100.0 * std::fabs(cell / refs[r][k - 1] - 1.0);
        std::printf(
            "  %-10s K=%d alpha=%-6.4g C=%-10.6g gain=%-8.4g ref=%-7g "
            "rel_err=%.3g%%\n",
            row_names[r], k, alpha, cell, gain, refs[r][k - 1], rel);
        csv += std::string(row_names[r]) + ',' + std::to_string(k) + ',' +
               compbf::format_double(alpha) + ',' +
               compbf::format_double(cell) + ',' +
               compbf::format_double(gain) + ',' +
               compbf::format_double(refs[r][k - 1]) + ',' +
               compbf::format_double(rel) + "\n";
      }
    }
    out.add_text("table2.csv", csv);
    out.finish("table2_manifest.json");
    return 0;
  }
  std::fprintf(stderr, "tables: --which must be 1 or 2\n");
  return 1;
}

int run_optimize(const OptimizeArgs& args) {
  if (args.coherence.empty()) {
    std::fprintf(stderr, "optimize: --coherence needs at least one ratio\n");
    return 1;
  }
  OutputSet out;
  out.dir = args.out_dir;
  out.manifest.command = "optimize";
  out.manifest.parameters = {{"beta", compbf::format_double(args.beta)},
                             {"mode", args.mode}};

  compbf::OptimizeRequest req;
  req.beta = args.beta;
  if (args.mode == "nt-equals-k") {
    req.mode = compbf::OptimizeMode::nt_equals_k;
  } else if (args.mode == "fixed-nt") {
    req.mode = compbf::OptimizeMode::fixed_nt;
    req.nt = args.nt;
  } else if (args.mode == "fixed-geometry") {
    req.mode = compbf::OptimizeMode::fixed_geometry;
    if (args.c_values.empty()) {
      std::fprintf(stderr, "optimize: fixed-geometry needs --c values\n");
      return 1;
    }
  } else {
    std::fprintf(stderr, "optimize: unknown mode %s\n", args.mode.c_str());
    return 1;
  }

  auto emit = [&](const compbf::OptimizationResult& res, double ratio,
                  double c_value, const std::string& name) {
    std::string csv = "K,alpha,C,gain_vs_K1_percent\n";
    const double base_se =
        res.k_values.front() == 1 ? res.se_values.front() : 0.0;
    for (std::size_t i = 0; i < res.k_values.size(); ++i) {
      const double gain =
          base_se > 0.0 ? 100.0 * (res.se_values[i] / base_se - 1.0) : 0.0;
      csv += std::to_string(res.k_values[i]) + ',' +
             compbf::format_double(res.alpha_values[i]) + ',' +
             compbf::format_double(res.se_values[i]) + ',' +
             compbf::format_double(gain) + "\n";
    }
    out.add_text(name, csv);
    if (c_value > 0.0)
      std::printf("mode=%s ratio=%g c=%g k_star=%d\n", args.mode.c_str(),
                  ratio, c_value, res.k_star);
    else
      std::printf("mode=%s ratio=%g k_star=%d\n", args.mode.c_str(), ratio,
                  res.k_star);
  };

  for (const double ratio : args.coherence) {
    req.coherence_ratio = ratio;
    if (req.mode == compbf::OptimizeMode::fixed_geometry) {
      for (const double c : args.c_values) {
        req.c = c;
        const auto res = compbf::optimize_k(req);
        emit(res, ratio, c,
             "optimize_" + args.mode + "_L" + compbf::format_double(ratio) +
                 "_c" + compbf::format_double(c) + ".csv");
      }
    } else {
      const auto res = compbf::optimize_k(req);
      emit(res, ratio, 0.0,
           "optimize_" + args.mode + "_L" + compbf::format_double(ratio) +
               ".csv");
    }
  }
  out.finish("optimize_manifest.json");
  return 0;
}

int run_validate(const compbf::ValidationOptions& opts) {
  const auto results = compbf::run_acceptance(opts);
  if (results.empty()) {
    std::fprintf(stderr, "validate: no criterion matched the selection\n");
    return 1;
  }
  bool all_passed = true;
  for (const auto& r : results) {
    all_passed = all_passed && r.passed;
    std::printf("[%s] %2d %s: %s\n", r.passed ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.detail.c_str());
    std::fflush(stdout);
  }
  return all_passed ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"analytical and Monte-Carlo SIR/spectral-efficiency toolkit "
               "for coordinated zero-forcing beamforming"};
  app.require_subcommand(1);

  CcdfArgs ccdf_args;
  auto* ccdf = app.add_subcommand("ccdf", "CCDF curves (analytic + empirical)");
  ccdf->add_option("--k", ccdf_args.ks, "cluster sizes (comma separated)")
      ->delimiter(',');
  ccdf->add_option("--nt", ccdf_args.nt, "antennas per BS (default: k)");
  ccdf->add_option("--beta", ccdf_args.beta, "pathloss exponent (> 2)");
  ccdf->add_option("--delta1", ccdf_args.delta1,
                   "relative location d1/dK for conditional mode");
  ccdf->add_option("--mode", ccdf_args.mode, "conditional | marginal")
      ->check(CLI::IsMember({"conditional", "marginal"}));
  ccdf->add_option("--trials", ccdf_args.trials, "Monte-Carlo trials");
  ccdf->add_option("--seed", ccdf_args.seed, "base RNG seed");
  ccdf->add_option("--lambda", ccdf_args.lambda, "BS density");
  ccdf->add_option("--out-dir", ccdf_args.out_dir, "output directory");
  ccdf->add_option("--fig", ccdf_args.fig, "figure preset: 2, 3, 4 or 8")
      ->check(CLI::IsMember({0, 2, 3, 4, 8}));

  TablesArgs tables_args;
  auto* tables = app.add_subcommand("tables", "reference table reproduction");
  tables->add_option("--which", tables_args.which, "1 or 2")->required();
  tables->add_option("--out-dir", tables_args.out_dir, "output directory");

  OptimizeArgs optimize_args;
  auto* optimize =
      app.add_subcommand("optimize", "optimal cluster cardinality sweeps");
  optimize
      ->add_option("--mode", optimize_args.mode,
                   "nt-equals-k | fixed-nt | fixed-geometry")
      ->check(CLI::IsMember({"nt-equals-k", "fixed-nt", "fixed-geometry"}));
  optimize
      ->add_option("--coherence", optimize_args.coherence,
                   "coherence ratios L_b/eta (comma separated)")
      ->delimiter(',')
      ->required();
  optimize->add_option("--nt", optimize_args.nt, "antennas (fixed-nt mode)");
  optimize->add_option("--c", optimize_args.c_values,
                       "geometry constants (fixed-geometry mode)")
      ->delimiter(',');
  optimize->add_option("--beta", optimize_args.beta, "pathloss exponent (> 2)");
  optimize->add_option("--out-dir", optimize_args.out_dir, "output directory");

  compbf::ValidationOptions validate_opts;
  auto* validate = app.add_subcommand("validate", "acceptance criteria suite");
  validate->add_option("--only", validate_opts.only,
                       "substring filter on criterion names");
  validate->add_option("--criterion", validate_opts.only_id,
                       "run a single criterion id");
  validate->add_option("--inject-fail", validate_opts.inject_fail,
                       "force a criterion to fail (testing hook)");
  validate->add_option("--seed", validate_opts.seed, "base RNG seed");
  validate->add_option("--threads", validate_opts.threads,
                       "worker threads (0: COMPBF_THREADS or hardware)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  ccdf_args.k_given = ccdf->count("--k") > 0;

  try {
    if (app.got_subcommand(ccdf)) return run_ccdf(ccdf_args);
    if (app.got_subcommand(tables)) return run_tables(tables_args);
    if (app.got_subcommand(optimize)) return run_optimize(optimize_args);
    if (app.got_subcommand(validate)) return run_validate(validate_opts);
  } catch (const compbf::DomainError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  std::fprintf(stderr, "no subcommand selected\n");
  return 1;
}
