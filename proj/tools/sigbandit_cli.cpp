// sigbandit command-line driver.
//
//   sigbandit simulate   --config configs/bm_maxmin.json [overrides]
//   sigbandit eigencheck --config configs/eigencheck_bm.json
//   sigbandit replay     --config configs/replay_demo.json
//   sigbandit diag       --dim 2 --K 2 --T 100 --B 1 --delta 0.1 --S 1 [--rho 0.5]
//
// Exit codes: 0 success, 2 usage or configuration error, 1 runtime failure.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sigbandit/sigbandit.hpp"

namespace {

using namespace sigbandit;

constexpr const char* kOutEnv = "SIGBANDIT_OUT";

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> out;
  std::vector<std::string> policies;
  std::vector<std::size_t> depths;
  std::optional<double> gamma;
  std::optional<double> noise_std;
  std::optional<unsigned> jobs;
  std::string format = "csv";
};

struct DiagArgs {
  std::size_t dim = 0;
  std::size_t arms = 0;
  std::size_t horizon = 0;
  double bound_b = 0.0;
  double delta = 0.0;
  double bound_s = 0.0;
  std::optional<double> rho;
};

void add_common(CLI::App* cmd, Overrides& o, bool policy_flags) {
  cmd->add_option("--config", o.config, "JSON experiment config")->required();
  cmd->add_option("--seed", o.seed, "base seed, trial i uses seed + i (default: config base_seed)");
  cmd->add_option("--trials", o.trials, "number of seeded trials (default: config trials)")->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out, std::string("output directory (default: $") + kOutEnv + ", then config, then ./out)");
  cmd->add_option("--jobs", o.jobs, "worker threads (default: config jobs)")->check(CLI::PositiveNumber);
  if (policy_flags) {
    cmd->add_option("--policy", o.policies, "run only the named policies (default: all)");
    cmd->add_option("--depth", o.depths, "signature depth for signature policies (default: per policy)")->expected(1);
    cmd->add_option("--gamma", o.gamma, "exploration multiplier for every policy (default: per policy)")->check(CLI::NonNegativeNumber);
    cmd->add_option("--noise-std", o.noise_std, "reward noise standard deviation (default: config noise_std)")->check(CLI::NonNegativeNumber);
    cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  } else {
    cmd->add_option("--depth", o.depths, "signature depths to check (default: config eigencheck_depths)");
  }
}

std::string output_dir(const Overrides& o, const ExperimentConfig& cfg) {
  if (o.out) return *o.out;
  if (const char* env = std::getenv(kOutEnv); env != nullptr && *env != '\0') return env;
  if (!cfg.output.empty()) return cfg.output;
  return "out";
}

ExperimentConfig configure(const Overrides& o) {
  ExperimentConfig cfg = load_config(o.config);
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.trials) cfg.trials = *o.trials;
  if (o.jobs) cfg.jobs = *o.jobs;
  if (o.noise_std) cfg.env.noise_std = *o.noise_std;
  if (!o.policies.empty()) {
    std::vector<NamedPolicy> kept;
    for (const auto& name : o.policies) {
      auto it = std::find_if(cfg.policies.begin(), cfg.policies.end(), [&](const auto& p) { return p.name == name; });
      if (it == cfg.policies.end()) throw Error(ErrorCode::BadConfig, "no policy named '" + name + "' in " + o.config);
      kept.push_back(*it);
    }
    cfg.policies = kept;
  }
  for (auto& p : cfg.policies) {
    if (o.gamma) p.config.gamma = *o.gamma;
    if (!o.depths.empty() && p.config.feature_mode == FeatureMode::Signature) p.config.depth = o.depths.front();
  }
  if (cfg.env.process == ProcessKind::Replay) {
    for (const auto& f : {cfg.env.replay_contexts, cfg.env.replay_rewards}) {
      if (f.empty() || !std::filesystem::exists(f)) {
        throw Error(ErrorCode::BadConfig, "replay file '" + f + "' not found");
      }
    }
  }
  cfg.validate();
  return cfg;
}

void print_paths(const std::vector<std::string>& paths) {
  for (const auto& p : paths) std::cout << "wrote " << p << '\n';
}

int run_simulate(const Overrides& o, bool replay, bool verbose) {
  const ExperimentConfig cfg = configure(o);
  if (replay != (cfg.env.process == ProcessKind::Replay)) {
    throw Error(ErrorCode::BadConfig, replay ? "replay needs a config with env.process = \"replay\""
                                             : "simulate needs a synthetic process; use the replay subcommand");
  }
  if (cfg.policies.empty()) throw Error(ErrorCode::BadConfig, "config lists no policies");
  const auto start = std::chrono::steady_clock::now();
  if (verbose) {
    std::cout << "running " << cfg.trials << " trial(s) of " << cfg.policies.size() << " policies, base seed "
              << cfg.base_seed << ", " << cfg.jobs << " job(s)\n";
  }
  const ExperimentResult result = run_experiment(cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (result.failed_trials > 0) {
    std::cout << result.failed_trials << " trial(s) excluded (non-positive GBM path)\n";
  }
  for (const auto& c : result.aggregates) {
    if (c.median.empty()) continue;
    std::printf("%-12s final cumulative regret: median %.4f  [q25 %.4f, q75 %.4f]\n", c.policy.c_str(),
                c.median.back(), c.q25.back(), c.q75.back());
  }
  if (verbose) std::printf("finished in %.2f s\n", secs);
  const OutputFormat fmt = o.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  print_paths(write_results(result, fmt, output_dir(o, cfg)));
  return 0;
}

int run_eigencheck(const Overrides& o, bool verbose) {
  const ExperimentConfig cfg = configure(o);
  const std::vector<std::size_t> depths = o.depths.empty() ? cfg.eigen_depths : o.depths;
  for (std::size_t d : depths) {
    if (d < 1) throw Error(ErrorCode::BadConfig, "depths must be >= 1");
  }
  if (verbose) std::cout << "eigencheck over " << cfg.trials << " trial(s)\n";
  const EigencheckResult result = eigencheck(cfg.env, depths, cfg.trials, cfg.base_seed, cfg.jobs);
  for (const auto& s : result.depths) {
    if (s.median.empty()) continue;
    std::printf("N=%zu  dim=%zu  median lambda_min at round %d: %.6g\n", s.depth,
                signature_feature_dim(cfg.env.channels, s.depth), s.rounds.back(), s.median.back());
  }
  if (result.failed_trials > 0) std::cout << result.failed_trials << " trial(s) excluded\n";
  print_paths(write_eigencheck(result, output_dir(o, cfg)));
  return 0;
}

int run_diag(const DiagArgs& a) {
  const double gamma = gamma_theoretical(a.dim, a.arms, a.horizon, a.bound_b, a.delta, a.bound_s);
  std::printf("gamma = %.10g\n", gamma);
  if (a.rho) std::printf("T0 = %ld\n", t0_theoretical(a.bound_b, *a.rho, a.dim, a.horizon, a.delta));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Signature-feature contextual bandits on simulated and replayed paths"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "print progress details");

  Overrides sim, rep, eig;
  auto* simulate = app.add_subcommand("simulate", "run policies on a synthetic environment");
  add_common(simulate, sim, true);
  auto* replay = app.add_subcommand("replay", "run policies against CSV replay files");
  add_common(replay, rep, true);
  auto* eigen = app.add_subcommand("eigencheck", "track lambda_min of the signature Gram matrix");
  add_common(eigen, eig, false);

  DiagArgs diag_args;
  auto* diag = app.add_subcommand("diag", "evaluate the theoretical exploration and burn-in constants");
  diag->add_option("--dim", diag_args.dim, "feature dimension")->required();
  diag->add_option("--K", diag_args.arms, "number of arms")->required();
  diag->add_option("--T", diag_args.horizon, "horizon")->required();
  diag->add_option("--B", diag_args.bound_b, "feature norm bound")->required();
  diag->add_option("--delta", diag_args.delta, "failure probability")->required();
  diag->add_option("--S", diag_args.bound_s, "parameter norm bound")->required();
  diag->add_option("--rho", diag_args.rho, "Gram eigenvalue lower bound (enables T0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*simulate) return run_simulate(sim, false, verbose);
    if (*replay) return run_simulate(rep, true, verbose);
    if (*eigen) return run_eigencheck(eig, verbose);
    if (*diag) return run_diag(diag_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    const bool config_error = e.code() == ErrorCode::BadConfig || e.code() == ErrorCode::ReplayFormatError;
    return config_error ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
