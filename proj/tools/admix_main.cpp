// admix: latent dialect-component inference for categorical sound-change data
#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "admix/align.hpp"
#include "admix/analytics.hpp"
#include "admix/digest.hpp"
#include "admix/errors.hpp"
#include "admix/io.hpp"
#include "admix/oracle.hpp"
#include "admix/version.hpp"
#include "admix/vinfer.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace admix;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitTolerance = 4;

int thread_cap() {
  const char* env = std::getenv("ADMIX_THREADS");
  if (!env) return 1 << 16;
  int v = std::atoi(env);
  return v >= 1 ? v : 1;
}

struct FitOptions {
  std::string data_path;
  std::string out_dir;
  std::string config_path;
  Hyperparams hp;
  FitConfig config;
  double fixed_delta = -1.0;  // <= 0 means free
  double fixed_gamma = -1.0;
  bool use_convergence = false;
  int min_language_count = 1;
};

void overlay_config_file(const std::string& path, Hyperparams& hp, FitConfig& cfg) {
  nlohmann::json j = nlohmann::json::parse(read_text_file(path));
  if (j.contains("alpha")) hp.alpha = j["alpha"].get<double>();
  if (j.contains("T")) hp.T = j["T"].get<int>();
  if (j.contains("fixed_delta") && !j["fixed_delta"].is_null())
    hp.fixed_delta = j["fixed_delta"].get<double>();
  if (j.contains("fixed_gamma") && !j["fixed_gamma"].is_null())
    hp.fixed_gamma = j["fixed_gamma"].get<double>();
  if (j.contains("iterations")) cfg.iterations = j["iterations"].get<long>();
  if (j.contains("runs")) cfg.runs = j["runs"].get<int>();
  if (j.contains("learning_rate")) cfg.learning_rate = j["learning_rate"].get<double>();
  if (j.contains("adam_beta1")) cfg.adam_beta1 = j["adam_beta1"].get<double>();
  if (j.contains("adam_beta2")) cfg.adam_beta2 = j["adam_beta2"].get<double>();
  if (j.contains("mc_samples")) cfg.mc_samples = j["mc_samples"].get<int>();
  if (j.contains("posterior_draws"))
    cfg.posterior_draws = j["posterior_draws"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("parallel_runs")) cfg.parallel_runs = j["parallel_runs"].get<int>();
  if (j.contains("convergence")) {
    const auto& c = j["convergence"];
    if (c.contains("enabled")) cfg.convergence.enabled = c["enabled"].get<bool>();
    if (c.contains("window_steps"))
      cfg.convergence.window_steps = c["window_steps"].get<int>();
    if (c.contains("rel_tol")) cfg.convergence.rel_tol = c["rel_tol"].get<double>();
  }
}

void write_report_files(const std::string& out_dir, const ConsensusEstimate& est,
                        const Corpus& corpus) {
  auto posteriors = all_token_posteriors(est, corpus);
  auto types = type_average(posteriors, corpus);
  auto profiles = language_profiles(est, posteriors, corpus);
  const int T = est.dims.T;
  write_text_file(out_dir + "/language_profiles.tsv",
                  render_language_profiles_tsv(profiles, T));
  write_text_file(out_dir + "/type_posteriors.tsv",
                  render_type_posteriors_tsv(types, T));
  write_text_file(out_dir + "/token_posteriors.tsv",
                  render_token_posteriors_tsv(posteriors, corpus, T));
  write_text_file(out_dir + "/profiles_plotdata.json",
                  render_profiles_plotdata_json(profiles, est));
}

int cmd_fit(const FitOptions& opts, const std::string& command_line, bool dry_run) {
  Hyperparams hp = opts.hp;
  FitConfig config = opts.config;
  if (opts.fixed_delta > 0.0) hp.fixed_delta = opts.fixed_delta;
  if (opts.fixed_gamma > 0.0) hp.fixed_gamma = opts.fixed_gamma;
  if (opts.use_convergence) config.convergence.enabled = true;
  config.parallel_runs = std::min(config.parallel_runs, thread_cap());

  try {
    hp.check();
    config.check();
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::string digest = config_digest(hp, config);
  if (dry_run) {
    std::cout << fit_config_to_json(hp, config, digest);
    return kExitOk;
  }

  RunManifest manifest;
  manifest.config_digest = digest;
  manifest.seed = config.seed;
  manifest.input_file = opts.data_path;
  manifest.tool_version = kVersion;
  manifest.command = command_line;
  manifest.started_at = iso8601_utc_now();

  Corpus corpus;
  try {
    corpus = parse_dataset(opts.data_path);
    manifest.input_digest = file_digest(opts.data_path);
    if (corpus.size() == 0) {
      std::cerr << "data error: dataset has no rows\n";
      return kExitData;
    }
    auto merged = merge_homophones(corpus);
    for (const auto& col : merged.collisions)
      std::cerr << "note: homophonous etymon " << col.etymon << "/" << col.sound
                << " (" << col.glosses.size() << " glosses) shares one environment\n";
    auto report = validate(corpus, opts.min_language_count);
    for (const auto& env : report.uninformative_environments)
      std::cerr << "warning: environment " << env << " has a single outcome\n";
    for (const auto& lang : report.sparse_languages)
      std::cerr << "warning: language " << lang << " is below the minimum count\n";
  } catch (const Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }

  ModelDims dims(hp.T, corpus.table);
  std::vector<FitResult> results;
  try {
    results = fit(corpus, hp, config);
  } catch (const Error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }

  for (const auto& r : results)
    save_fit_result(opts.out_dir + "/run" + std::to_string(r.run_index), r, dims,
                    corpus.table, hp, config);

  ConsensusEstimate est;
  if (results.size() >= 2) {
    auto perms = align(results, dims);
    write_text_file(opts.out_dir + "/alignment.json", alignment_to_json(perms));
    est = merge(results, perms, language_token_shares(corpus), dims);
  } else {
    est.dims = dims;
    est.theta_map = results[0].map_point.theta;
    est.phi_map = results[0].map_point.phi;
    auto shares = language_token_shares(corpus);
    est.usage = Eigen::VectorXd::Zero(dims.T);
    for (int l = 0; l < dims.L; ++l)
      est.usage += shares[l] * est.theta_map.row(l).transpose();
  }
  write_text_file(opts.out_dir + "/consensus.json",
                  consensus_to_json(est, corpus.table));
  write_report_files(opts.out_dir, est, corpus);

  manifest.finished_at = iso8601_utc_now();
  write_text_file(opts.out_dir + "/manifest.json", manifest_to_json(manifest));
  std::cout << "fit complete: " << results.size()
            << " runs, consensus and reports in " << opts.out_dir << "\n";
  return kExitOk;
}

int run_oracle_suites(const std::string& suite, int points, std::uint64_t seed,
                      const std::string& report_path) {
  int failures = 0;
  auto ledger = [&](const std::string& name, double value, double expect,
                    double tol) {
    bool ok = std::abs(value - expect) <= tol;
    if (!ok) ++failures;
    std::printf("[%s] %-44s value=%.6f expected=%.6f tol=%g\n",
                ok ? "PASS" : "FAIL", name.c_str(), value, expect, tol);
  };

  if (suite == "all" || suite == "conjugate") {
    // T=1, outcomes {A,B}, alpha=1, data=AAA: posterior Beta(4,1), mean 0.8
    Corpus c = parse_dataset_text(
        "language\tetymon\tsound\treflex\nL\te\ts\tA\nL\te\ts\tA\nL\te\ts\tA\n"
        "L\te\ts\tB\n");
    c.tokens.resize(3);
    Hyperparams hp;
    hp.T = 1;
    hp.alpha = 1.0;
    GridSpec spec;
    spec.points_per_dim = std::max(points, 200);
    auto m = grid_posterior_moments(c, hp, spec);
    ledger("conjugate grid E[phi_A], Beta(4,1)", m.phi_mean[0], 0.8, 2e-3);

    Corpus empty = c;
    empty.tokens.clear();
    auto m0 = grid_posterior_moments(empty, hp, spec);
    ledger("conjugate grid prior mean", m0.phi_mean[0], 0.5, 1e-6);

    FitConfig cfg;
    cfg.iterations = 8000;
    cfg.runs = 1;
    cfg.posterior_draws = 2000;
    cfg.seed = seed;
    auto results = fit(c, hp, cfg);
    double mean = 0.0;
    for (const auto& d : results[0].draws) mean += d.phi[0];
    mean /= results[0].draws.size();
    ledger("conjugate VI posterior mean", mean, 0.8, 0.05);
  }

  if (suite == "all" || suite == "grid") {
    Corpus c = parse_dataset_text(
        "language\tetymon\tsound\treflex\nL\te\ts\tA\nL\te\ts\tA\nL\te\ts\tB\n");
    Hyperparams hp;
    hp.T = 2;
    hp.alpha = 1.0;
    GridSpec coarse, fine;
    coarse.points_per_dim = std::max(points / 10, 20);
    fine.points_per_dim = std::max(points / 5, 40);
    auto a = grid_posterior_moments(c, hp, coarse);
    auto b = grid_posterior_moments(c, hp, fine);
    ledger("grid exchangeability E[theta_1]", b.theta_mean(0, 0), 0.5, 5e-3);
    ledger("grid doubling drift (theta)",
           std::abs(a.theta_mean(0, 0) - b.theta_mean(0, 0)), 0.0, 1e-3);
    ledger("grid doubling drift (phi)",
           (a.phi_mean - b.phi_mean).cwiseAbs().maxCoeff(), 0.0, 2e-3);
  }

  if (suite == "all" || suite == "recovery") {
    Hyperparams sim_hp;
    sim_hp.T = 3;
    sim_hp.alpha = 1e-4;
    sim_hp.fixed_delta = 0.3;
    sim_hp.fixed_gamma = 1.0;
    auto sim = simulate(sim_hp, {12, 24, 3, 25}, seed);

    Hyperparams hp;
    hp.T = 6;
    hp.alpha = 1e-4;
    FitConfig cfg;
    cfg.iterations = 8000;
    cfg.runs = 3;
    cfg.posterior_draws = 50;
    cfg.seed = seed + 1;
    cfg.parallel_runs = std::min(3, thread_cap());
    ModelDims dims(hp.T, sim.corpus.table);
    auto results = fit(sim.corpus, hp, cfg);
    auto perms = align(results, dims);
    auto est = merge(results, perms, language_token_shares(sim.corpus), dims);
    auto posteriors = all_token_posteriors(est, sim.corpus);
    RecoveryReport report = recovery_score(sim.truth, est, posteriors);
    ledger("recovery token accuracy", report.accuracy, 1.0, 0.2);  // >= 0.8
    ledger("recovery active components (usage > 5%)", report.active_components,
           3.0, 0.0);
    if (!report_path.empty())
      write_text_file(report_path, recovery_report_to_json(report));
    if (failures > 0 && !report_path.empty()) {
      std::printf("recovery below threshold; report at %s\n", report_path.c_str());
      return kExitTolerance;
    }
  }

  if (failures > 0) {
    std::printf("%d oracle check(s) failed\n", failures);
    return kExitTolerance;
  }
  std::printf("all oracle checks passed\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latent dialect-component inference from sound-change data"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string command_line;
  for (int i = 0; i < argc; ++i) {
    if (i) command_line += ' ';
    command_line += argv[i];
  }

  // ---- fit ----
  FitOptions fo;
  bool fit_dry_run = false;
  auto* fit_cmd = app.add_subcommand("fit", "run the full inference pipeline");
  fit_cmd->add_option("--data", fo.data_path, "dataset TSV")->required();
  fit_cmd->add_option("--out", fo.out_dir, "output directory")->required();
  fit_cmd->add_option("--config", fo.config_path, "config JSON (flags override)");
  fit_cmd->add_option("--T", fo.hp.T, "truncation level", true);
  fit_cmd->add_option("--alpha", fo.hp.alpha, "sound-change sparsity concentration",
                      true);
  fit_cmd->add_option("--iters", fo.config.iterations, "iterations per run", true);
  fit_cmd->add_option("--runs", fo.config.runs, "independent initializations", true);
  fit_cmd->add_option("--lr", fo.config.learning_rate, "Adam learning rate", true);
  fit_cmd->add_option("--beta1", fo.config.adam_beta1, "Adam beta1", true);
  fit_cmd->add_option("--beta2", fo.config.adam_beta2, "Adam beta2", true);
  fit_cmd->add_option("--mc-samples", fo.config.mc_samples,
                      "Monte Carlo samples per gradient", true);
  fit_cmd->add_option("--draws", fo.config.posterior_draws,
                      "posterior draws per run", true);
  fit_cmd->add_option("--seed", fo.config.seed, "master seed", true);
  fit_cmd->add_option("--parallel-runs", fo.config.parallel_runs,
                      "concurrent runs (ADMIX_THREADS caps)", true);
  fit_cmd->add_option("--fixed-delta", fo.fixed_delta,
                      "pin delta instead of inferring it");
  fit_cmd->add_option("--fixed-gamma", fo.fixed_gamma,
                      "pin gamma instead of inferring it");
  fit_cmd->add_flag("--converge", fo.use_convergence,
                    "stop early on ELBO convergence (default: iteration cap)");
  fit_cmd->add_option("--convergence-window", fo.config.convergence.window_steps,
                      "convergence window in steps", true);
  fit_cmd->add_option("--convergence-tol", fo.config.convergence.rel_tol,
                      "relative tolerance between windows", true);
  fit_cmd->add_option("--min-language-count", fo.min_language_count,
                      "validation threshold", true);
  fit_cmd->add_flag("--dry-run", fit_dry_run, "print the resolved config and exit");

  // ---- simulate ----
  SimShape shape{20, 40, 3, 30};
  Hyperparams sim_hp;
  sim_hp.T = 3;
  std::uint64_t sim_seed = 1;
  std::string sim_out = ".";
  double sim_fixed_delta = -1.0, sim_fixed_gamma = -1.0;
  auto* sim_cmd = app.add_subcommand("simulate", "draw a synthetic corpus");
  sim_cmd->add_option("--L", shape.L, "languages", true);
  sim_cmd->add_option("--S", shape.S, "environments", true);
  sim_cmd->add_option("--K", shape.outcomes_per_env, "outcomes per environment",
                      true);
  sim_cmd->add_option("--tokens", shape.tokens_per_language, "tokens per language",
                      true);
  sim_cmd->add_option("--T", sim_hp.T, "true components", true);
  sim_cmd->add_option("--alpha", sim_hp.alpha, "sound-change concentration", true);
  sim_cmd->add_option("--fixed-delta", sim_fixed_delta, "pin delta");
  sim_cmd->add_option("--fixed-gamma", sim_fixed_gamma, "pin gamma");
  sim_cmd->add_option("--seed", sim_seed, "seed", true);
  sim_cmd->add_option("--out", sim_out, "output directory", true);

  // ---- align ----
  std::vector<std::string> align_runs;
  std::string align_data, align_out;
  auto* align_cmd = app.add_subcommand("align", "align and merge finished runs");
  align_cmd->add_option("--data", align_data, "dataset TSV (for token shares)")
      ->required();
  align_cmd->add_option("--out", align_out, "output directory")->required();
  align_cmd->add_option("runs", align_runs, "run directories (first is reference)")
      ->expected(-2);

  // ---- report ----
  std::string rep_consensus, rep_run_dir, rep_data, rep_out;
  auto* rep_cmd = app.add_subcommand("report", "emit analytics tables");
  rep_cmd->add_option("--consensus", rep_consensus, "consensus.json from align/fit");
  rep_cmd->add_option("--run-dir", rep_run_dir,
                      "use a single run's params_mean.json instead");
  rep_cmd->add_option("--data", rep_data, "dataset TSV")->required();
  rep_cmd->add_option("--out", rep_out, "output directory")->required();

  // ---- oracle ----
  std::string oracle_suite = "all", oracle_report;
  int oracle_points = 200;
  std::uint64_t oracle_seed = 7;
  auto* oracle_cmd = app.add_subcommand("oracle", "run verification suites");
  oracle_cmd->add_option("--suite", oracle_suite, "all|conjugate|grid|recovery",
                         true);
  oracle_cmd->add_option("--points", oracle_points, "grid points per dimension",
                         true);
  oracle_cmd->add_option("--seed", oracle_seed, "seed", true);
  oracle_cmd->add_option("--report", oracle_report, "recovery report JSON path");

  // ---- layout ----
  std::string lay_data;
  int lay_T = 10, lay_L = 0, lay_S = 0, lay_K = 2;
  double lay_fixed_delta = -1.0, lay_fixed_gamma = -1.0;
  auto* lay_cmd = app.add_subcommand("layout", "dump the coordinate layout manifest");
  lay_cmd->add_option("--data", lay_data, "dataset TSV");
  lay_cmd->add_option("--T", lay_T, "truncation level", true);
  lay_cmd->add_option("--L", lay_L, "languages (without --data)");
  lay_cmd->add_option("--S", lay_S, "environments (without --data)");
  lay_cmd->add_option("--K", lay_K, "outcomes per environment (without --data)",
                      true);
  lay_cmd->add_option("--fixed-delta", lay_fixed_delta, "pin delta");
  lay_cmd->add_option("--fixed-gamma", lay_fixed_gamma, "pin gamma");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fit_cmd) {
      if (!fo.config_path.empty()) {
        // precedence: defaults < config file < explicit flags
        Hyperparams hp_flags = fo.hp;
        FitConfig cfg_flags = fo.config;
        fo.hp = Hyperparams{};
        fo.config = FitConfig{};
        overlay_config_file(fo.config_path, fo.hp, fo.config);
        if (fit_cmd->count("--T")) fo.hp.T = hp_flags.T;
        if (fit_cmd->count("--alpha")) fo.hp.alpha = hp_flags.alpha;
        if (fit_cmd->count("--iters")) fo.config.iterations = cfg_flags.iterations;
        if (fit_cmd->count("--runs")) fo.config.runs = cfg_flags.runs;
        if (fit_cmd->count("--lr")) fo.config.learning_rate = cfg_flags.learning_rate;
        if (fit_cmd->count("--beta1")) fo.config.adam_beta1 = cfg_flags.adam_beta1;
        if (fit_cmd->count("--beta2")) fo.config.adam_beta2 = cfg_flags.adam_beta2;
        if (fit_cmd->count("--mc-samples"))
          fo.config.mc_samples = cfg_flags.mc_samples;
        if (fit_cmd->count("--draws"))
          fo.config.posterior_draws = cfg_flags.posterior_draws;
        if (fit_cmd->count("--seed")) fo.config.seed = cfg_flags.seed;
        if (fit_cmd->count("--parallel-runs"))
          fo.config.parallel_runs = cfg_flags.parallel_runs;
        if (fit_cmd->count("--convergence-window"))
          fo.config.convergence.window_steps = cfg_flags.convergence.window_steps;
        if (fit_cmd->count("--convergence-tol"))
          fo.config.convergence.rel_tol = cfg_flags.convergence.rel_tol;
      }
      return cmd_fit(fo, command_line, fit_dry_run);
    }

    if (*sim_cmd) {
      if (sim_fixed_delta > 0.0) sim_hp.fixed_delta = sim_fixed_delta;
      if (sim_fixed_gamma > 0.0) sim_hp.fixed_gamma = sim_fixed_gamma;
      try {
        sim_hp.check();
        shape.check();
      } catch (const DomainError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
      }
      auto sim = simulate(sim_hp, shape, sim_seed);
      write_text_file(sim_out + "/corpus.tsv", serialize_corpus(sim.corpus));
      write_text_file(sim_out + "/truth.json", ground_truth_to_json(sim.truth));
      std::cout << "simulated " << sim.corpus.size() << " tokens over " << shape.L
                << " languages into " << sim_out << "\n";
      return kExitOk;
    }

    if (*align_cmd) {
      Corpus corpus = parse_dataset(align_data);
      std::vector<FitResult> runs;
      int T = -1;
      for (const auto& dir : align_runs) {
        LoadedParams lp = params_from_json(read_text_file(dir + "/params_mean.json"));
        if (T < 0) T = lp.dims.T;
        if (lp.dims.T != T) throw DimensionMismatch("runs disagree on T: " + dir);
        FitResult r;
        r.map_point = lp.params;
        runs.push_back(std::move(r));
      }
      ModelDims dims(T, corpus.table);
      auto perms = align(runs, dims);
      auto est = merge(runs, perms, language_token_shares(corpus), dims);
      write_text_file(align_out + "/alignment.json", alignment_to_json(perms));
      write_text_file(align_out + "/consensus.json",
                      consensus_to_json(est, corpus.table));
      std::cout << "aligned " << runs.size() << " runs into " << align_out << "\n";
      return kExitOk;
    }

    if (*rep_cmd) {
      Corpus corpus = parse_dataset(rep_data);
      ConsensusEstimate est;
      if (!rep_run_dir.empty()) {
        LoadedParams lp =
            params_from_json(read_text_file(rep_run_dir + "/params_mean.json"));
        est.dims = lp.dims;
        est.theta_map = lp.params.theta;
        est.phi_map = lp.params.phi;
        auto shares = language_token_shares(corpus);
        est.usage = Eigen::VectorXd::Zero(lp.dims.T);
        for (int l = 0; l < lp.dims.L; ++l)
          est.usage += shares[l] * est.theta_map.row(l).transpose();
      } else if (!rep_consensus.empty()) {
        est = consensus_from_json(read_text_file(rep_consensus));
      } else {
        std::cerr << "usage error: need --consensus or --run-dir\n";
        return kExitUsage;
      }
      write_report_files(rep_out, est, corpus);
      auto posteriors = all_token_posteriors(est, corpus);
      auto types = type_average(posteriors, corpus);
      std::cout << render_type_posteriors_pretty(types, est);
      return kExitOk;
    }

    if (*oracle_cmd) {
      if (oracle_suite != "all" && oracle_suite != "conjugate" &&
          oracle_suite != "grid" && oracle_suite != "recovery") {
        std::cerr << "usage error: unknown suite " << oracle_suite << "\n";
        return kExitUsage;
      }
      return run_oracle_suites(oracle_suite, oracle_points, oracle_seed,
                               oracle_report);
    }

    if (*lay_cmd) {
      Hyperparams hp;
      hp.T = lay_T;
      if (lay_fixed_delta > 0.0) hp.fixed_delta = lay_fixed_delta;
      if (lay_fixed_gamma > 0.0) hp.fixed_gamma = lay_fixed_gamma;
      ModelDims dims;
      if (!lay_data.empty()) {
        Corpus corpus = parse_dataset(lay_data);
        dims = ModelDims(hp.T, corpus.table);
      } else if (lay_L > 0 && lay_S > 0) {
        dims = ModelDims(hp.T, lay_L, std::vector<int>(lay_S, lay_K));
      } else {
        std::cerr << "usage error: need --data or --L/--S/--K\n";
        return kExitUsage;
      }
      ParamLayout layout(dims, hp);
      std::cout << layout.manifest_json() << "\n";
      return kExitOk;
    }
  } catch (const MissingColumn& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const EmptyField& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NonUtf8Input& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const NonFiniteDensity& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const NonFiniteGradient& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const DomainError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}
