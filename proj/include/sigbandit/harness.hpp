#pragma once

// Seeded multi-trial experiments, regret aggregation, Gram-eigenvalue
// diagnostics and the closed-form theory constants.
//
// Every trial derives its randomness from base_seed + trial_index, split into
// independent streams for the context path, the linear-reward coefficients and
// the observation noise. All policies in a trial see the same path, the same
// rewards and the same noise draws.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "sigbandit/bandit.hpp"
#include "sigbandit/envs.hpp"
#include "sigbandit/error.hpp"
#include "sigbandit/linalg.hpp"
#include "sigbandit/path.hpp"
#include "sigbandit/replay.hpp"
#include "sigbandit/signature.hpp"

namespace sigbandit {

struct NamedPolicy {
  std::string name;
  PolicyConfig config;
};

struct ExperimentConfig {
  EnvSpec env;
  RewardSpec reward;
  std::vector<NamedPolicy> policies;
  int trials = 1;
  std::uint64_t base_seed = 0;
  std::string output;
  std::vector<std::size_t> eigen_depths{1, 2, 3, 4};
  unsigned jobs = 1;

  void validate() const {
    env.validate();
    if (env.process != ProcessKind::Replay) reward.validate();
    if (trials < 1) throw Error(ErrorCode::BadConfig, "trials must be >= 1");
    std::set<std::string> names;
    for (const auto& p : policies) {
      if (!names.insert(p.name).second) throw Error(ErrorCode::BadConfig, "duplicate policy name '" + p.name + "'");
      p.config.validate();
    }
    for (std::size_t depth : eigen_depths) {
      if (depth < 1) throw Error(ErrorCode::BadConfig, "eigencheck depths must be >= 1");
    }
  }
};

struct PolicyTrace {
  std::string policy;
  std::vector<int> rounds;
  std::vector<std::size_t> arms;
  std::vector<double> regret;
  std::vector<double> cum_regret;
};

struct TrialResult {
  int trial = 0;
  bool failed = false;
  std::string failure;
  std::vector<PolicyTrace> traces;
};

struct AggregateCurve {
  std::string policy;
  std::vector<int> rounds;
  std::vector<double> q25;
  std::vector<double> median;
  std::vector<double> q75;
};

struct ExperimentResult {
  std::vector<TrialResult> trials;
  std::vector<AggregateCurve> aggregates;
  std::size_t failed_trials = 0;
};

// Rounds, windows, noiseless rewards and per-round standard normals of one trial.
struct TrialEnvironment {
  std::vector<Window> windows;
  std::vector<std::vector<double>> true_rewards;
  std::vector<double> noise;
};

enum class Stream : std::uint32_t { Path = 1, Beta = 2, Noise = 3 };

inline Rng make_stream(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

inline std::uint64_t trial_seed(std::uint64_t base_seed, int trial_index) {
  return base_seed + static_cast<std::uint64_t>(trial_index);
}

// Linear-interpolated quantile of an unsorted sample (p in [0, 1]).
inline double quantile(std::vector<double> xs, double p) {
  if (xs.empty()) throw Error(ErrorCode::BadConfig, "quantile of empty sample");
  std::sort(xs.begin(), xs.end());
  const double h = p * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= xs.size()) return xs.back();
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[lo + 1] - xs[lo]);
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Exceptions are
// rethrown (lowest index first) after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs == 0 ? 1u : jobs, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline TrialEnvironment build_trial_environment(const ExperimentConfig& config, int trial_index,
                                                const ReplayData* replay = nullptr) {
  const std::uint64_t seed = trial_seed(config.base_seed, trial_index);
  TrialEnvironment env;
  if (config.env.process == ProcessKind::Replay) {
    std::optional<ReplayData> loaded;
    if (replay == nullptr) {
      loaded = load_replay(config.env.replay_contexts, config.env.replay_rewards);
      replay = &*loaded;
    }
    env.windows = replay->windows;
    env.true_rewards = replay->rewards;
  } else {
    Rng path_rng = make_stream(seed, Stream::Path);
    const bool needs_next = config.reward.kind == RewardKind::Newsvendor;
    const DiscretePath path = simulate_process(config.env, path_rng, needs_next ? 1 : 0);
    RewardSpec reward = config.reward;
    if (reward.kind == RewardKind::Linear && reward.betas.empty()) {
      Rng beta_rng = make_stream(seed, Stream::Beta);
      reward.betas = sample_linear_betas(reward.arms, beta_rng);
    }
    for (int t = config.env.window; t <= config.env.horizon; ++t) {
      Window w = context_window(path, config.env, t);
      std::optional<double> demand;
      if (needs_next) demand = mean_value(context_window(path, config.env, t + 1).path)[0];
      env.true_rewards.push_back(eval_rewards(w, reward, demand));
      env.windows.push_back(std::move(w));
    }
  }
  Rng noise_rng = make_stream(seed, Stream::Noise);
  std::normal_distribution<double> normal(0.0, 1.0);
  env.noise.resize(env.windows.size());
  for (double& z : env.noise) z = normal(noise_rng);
  return env;
}

// Feature rows for every round of a trial under one feature mode.
inline std::vector<std::vector<double>> build_features(const std::vector<Window>& windows, FeatureMode mode,
                                                       std::size_t depth) {
  std::vector<std::vector<double>> rows;
  rows.reserve(windows.size());
  for (const Window& w : windows) {
    rows.push_back(mode == FeatureMode::Signature ? feature_vector(w, depth).coords : mean_value(w.path));
  }
  return rows;
}

inline PolicyTrace run_policy(const NamedPolicy& named, const TrialEnvironment& env,
                              const std::vector<std::vector<double>>& features, double noise_std) {
  PolicyConfig cfg = named.config;
  if (!env.true_rewards.empty()) cfg.arms = env.true_rewards.front().size();
  PolicyTrace trace{named.name, {}, {}, {}, {}};
  if (env.windows.empty()) return trace;
  using AnyPolicy = std::variant<LinUcbPolicy, KernelUcbPolicy>;
  AnyPolicy policy = cfg.kind == PolicyKind::LinearUcb
                         ? AnyPolicy(std::in_place_type<LinUcbPolicy>, cfg, features.front().size())
                         : AnyPolicy(std::in_place_type<KernelUcbPolicy>, cfg);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < env.windows.size(); ++i) {
    const auto& x = features[i];
    const auto& f = env.true_rewards[i];
    const std::size_t arm = std::visit([&](auto& p) { return p.select(x); }, policy);
    const double reward = observe_with(f, arm, noise_std, env.noise[i]);
    std::visit([&](auto& p) { p.update(arm, x, reward); }, policy);
    const double regret = instant_regret(f, arm);
    cumulative += regret;
    trace.rounds.push_back(env.windows[i].round);
    trace.arms.push_back(arm);
    trace.regret.push_back(regret);
    trace.cum_regret.push_back(cumulative);
  }
  return trace;
}

inline TrialResult run_trial(const ExperimentConfig& config, int trial_index, const ReplayData* replay = nullptr) {
  TrialResult result;
  result.trial = trial_index;
  TrialEnvironment env;
  try {
    env = build_trial_environment(config, trial_index, replay);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonPositiveGBM) throw;
    result.failed = true;
    result.failure = e.what();
    return result;
  }
  std::map<std::pair<FeatureMode, std::size_t>, std::vector<std::vector<double>>> feature_cache;
  for (const auto& named : config.policies) {
    const FeatureMode mode = named.config.kind == PolicyKind::KernelUcb ? FeatureMode::WindowMean
                                                                         : named.config.feature_mode;
    const std::size_t depth = mode == FeatureMode::Signature ? named.config.depth : 0;
    auto key = std::make_pair(mode, depth);
    auto it = feature_cache.find(key);
    if (it == feature_cache.end()) {
      it = feature_cache.emplace(key, build_features(env.windows, mode, depth)).first;
    }
    result.traces.push_back(run_policy(named, env, it->second, config.env.noise_std));
  }
  return result;
}

// Median and quartile curves of cumulative regret over the successful trials.
inline std::vector<AggregateCurve> aggregate(const std::vector<TrialResult>& trials,
                                             const std::vector<NamedPolicy>& policies) {
  std::vector<AggregateCurve> curves;
  for (std::size_t p = 0; p < policies.size(); ++p) {
    AggregateCurve curve{policies[p].name, {}, {}, {}, {}};
    std::vector<const PolicyTrace*> traces;
    for (const auto& t : trials) {
      if (!t.failed) traces.push_back(&t.traces.at(p));
    }
    if (!traces.empty()) {
      const std::size_t rounds = traces.front()->rounds.size();
      for (std::size_t i = 0; i < rounds; ++i) {
        std::vector<double> xs;
        xs.reserve(traces.size());
        for (const auto* tr : traces) xs.push_back(tr->cum_regret[i]);
        curve.rounds.push_back(traces.front()->rounds[i]);
        curve.q25.push_back(quantile(xs, 0.25));
        curve.median.push_back(quantile(xs, 0.5));
        curve.q75.push_back(quantile(xs, 0.75));
      }
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::optional<ReplayData> replay;
  if (config.env.process == ProcessKind::Replay) {
    replay = load_replay(config.env.replay_contexts, config.env.replay_rewards);
  }
  ExperimentResult result;
  result.trials.resize(static_cast<std::size_t>(config.trials));
  parallel_for(result.trials.size(), config.jobs, [&](std::size_t i) {
    result.trials[i] = run_trial(config, static_cast<int>(i), replay ? &*replay : nullptr);
  });
  for (const auto& t : result.trials) result.failed_trials += t.failed ? 1 : 0;
  result.aggregates = aggregate(result.trials, config.policies);
  return result;
}

// --- Gram-matrix diagnostics -------------------------------------------------

// lambda_min of Sigma_t = (1/t) sum_{s<=t} x_s x_s^T for every prefix t.
inline std::vector<double> gram_min_eigen_trajectory(const std::vector<std::vector<double>>& features) {
  std::vector<double> out;
  if (features.empty()) return out;
  SymMatrix sum(features.front().size());
  for (std::size_t t = 0; t < features.size(); ++t) {
    sum.add_outer(features[t]);
    SymMatrix avg = sum;
    avg.scale(1.0 / static_cast<double>(t + 1));
    out.push_back(min_eigen(avg));
  }
  return out;
}

inline SymMatrix average_gram(const std::vector<std::vector<double>>& features) {
  SymMatrix sum(features.front().size());
  for (const auto& x : features) sum.add_outer(x);
  sum.scale(1.0 / static_cast<double>(features.size()));
  return sum;
}

// Running maximum of |x_t|.
inline double feature_bound(const std::vector<std::vector<double>>& features) {
  double b = 0.0;
  for (const auto& x : features) b = std::max(b, norm2(x));
  return b;
}

struct GramTrial {
  int trial = 0;
  std::vector<double> lambda_min;  // per round
  double b_hat = 0.0;
  double rho_hat = 0.0;            // lambda_min at the last round
  double unpruned_lambda_min = 0.0;
  double unpruned_lambda_max = 0.0;
  double pruned_lambda_max = 0.0;
};

struct GramStats {
  std::size_t depth = 0;
  std::vector<int> rounds;
  std::vector<GramTrial> trials;
  std::vector<double> q25;
  std::vector<double> median;
  std::vector<double> q75;
};

struct EigencheckResult {
  std::vector<GramStats> depths;
  std::size_t failed_trials = 0;
};

inline GramTrial gram_trial(const std::vector<Window>& windows, std::size_t depth) {
  GramTrial g;
  std::vector<std::vector<double>> pruned;
  std::vector<std::vector<double>> full;
  pruned.reserve(windows.size());
  full.reserve(windows.size());
  for (const Window& w : windows) {
    pruned.push_back(feature_vector(w, depth).coords);
    full.push_back(unpruned_feature(w, depth));
  }
  g.lambda_min = gram_min_eigen_trajectory(pruned);
  g.b_hat = feature_bound(pruned);
  g.rho_hat = g.lambda_min.empty() ? 0.0 : g.lambda_min.back();
  const auto pruned_eigs = symmetric_eigenvalues(average_gram(pruned));
  g.pruned_lambda_max = pruned_eigs.back();
  const auto full_eigs = symmetric_eigenvalues(average_gram(full));
  g.unpruned_lambda_min = full_eigs.front();
  g.unpruned_lambda_max = full_eigs.back();
  return g;
}

// Per-depth lambda_min(Sigma_t) trajectories over seeded trials, using the
// same context paths run_trial would simulate for these seeds.
inline EigencheckResult eigencheck(const EnvSpec& env, const std::vector<std::size_t>& depths, int trials,
                                   std::uint64_t base_seed, unsigned jobs = 1) {
  env.validate();
  if (trials < 1) throw Error(ErrorCode::BadConfig, "trials must be >= 1");
  for (std::size_t depth : depths) {
    if (depth < 1) throw Error(ErrorCode::BadConfig, "eigencheck depths must be >= 1");
  }
  ExperimentConfig cfg;
  cfg.env = env;
  cfg.reward.kind = RewardKind::MaxMin;
  cfg.base_seed = base_seed;
  std::optional<ReplayData> replay;
  if (env.process == ProcessKind::Replay) replay = load_replay(env.replay_contexts, env.replay_rewards);

  std::vector<std::optional<std::vector<GramTrial>>> per_trial(static_cast<std::size_t>(trials));
  parallel_for(per_trial.size(), jobs, [&](std::size_t i) {
    std::vector<Window> windows;
    if (replay) {
      windows = replay->windows;
    } else {
      Rng path_rng = make_stream(trial_seed(base_seed, static_cast<int>(i)), Stream::Path);
      DiscretePath path;
      try {
        path = simulate_process(env, path_rng);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NonPositiveGBM) throw;
        return;
      }
      for (int t = env.window; t <= env.horizon; ++t) windows.push_back(context_window(path, env, t));
    }
    std::vector<GramTrial> out;
    for (std::size_t depth : depths) {
      GramTrial g = gram_trial(windows, depth);
      g.trial = static_cast<int>(i);
      out.push_back(std::move(g));
    }
    per_trial[i] = std::move(out);
  });

  EigencheckResult result;
  for (const auto& t : per_trial) result.failed_trials += t ? 0 : 1;
  for (std::size_t k = 0; k < depths.size(); ++k) {
    GramStats stats;
    stats.depth = depths[k];
    for (const auto& t : per_trial) {
      if (t) stats.trials.push_back((*t)[k]);
    }
    if (!stats.trials.empty()) {
      const std::size_t rounds = stats.trials.front().lambda_min.size();
      const int first_round = replay ? replay->windows.front().round : env.window;
      for (std::size_t r = 0; r < rounds; ++r) {
        std::vector<double> xs;
        for (const auto& g : stats.trials) xs.push_back(g.lambda_min[r]);
        stats.rounds.push_back(first_round + static_cast<int>(r));
        stats.q25.push_back(quantile(xs, 0.25));
        stats.median.push_back(quantile(xs, 0.5));
        stats.q75.push_back(quantile(xs, 0.75));
      }
    }
    result.depths.push_back(std::move(stats));
  }
  return result;
}

// Number of pulls after which lambda_min(M) >= lambda + rho t / 2 holds with
// probability 1 - delta:
// ceil(((B^2 sqrt(2a) + B sqrt(2 B^2 a + 8 rho a / 3)) / rho)^2), a = log(dim T / delta).
inline long t0_theoretical(double bound_b, double rho, std::size_t dim, std::size_t horizon, double delta) {
  if (!(bound_b > 0.0) || !std::isfinite(bound_b)) throw Error(ErrorCode::BadConfig, "B must be > 0");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw Error(ErrorCode::BadConfig, "rho must be > 0");
  if (dim < 1 || horizon < 1) throw Error(ErrorCode::BadConfig, "dim and T must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::BadConfig, "delta must lie in (0, 1)");
  const double a = std::log(static_cast<double>(dim) * static_cast<double>(horizon) / delta);
  if (!(a > 0.0)) throw Error(ErrorCode::BadConfig, "log(dim T / delta) must be positive");
  const double b2 = bound_b * bound_b;
  const double root = (b2 * std::sqrt(2.0 * a) + bound_b * std::sqrt(2.0 * b2 * a + 8.0 * rho * a / 3.0)) / rho;
  return std::max(1L, static_cast<long>(std::ceil(root * root)));
}

}  // namespace sigbandit
