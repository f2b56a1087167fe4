#pragma once

// JSON experiment configuration. See configs/ for complete examples.
//
// {
//   "env":      {"process": "bm" | "gbm" | "ou" | "replay", "horizon": 100, "window": 1,
//                "steps_per_unit": 1000, "noise_std": 0.1, "channels": 1,
//                "alpha": 0.1, "nu": 1.0, "theta": 1.0, "mu": 0.0, "sigma": 1.0,
//                "contexts": "ctx.csv", "rewards": "rew.csv"},
//   "reward":   {"kind": "maxmin" | "linear" | "newsvendor", "arms": 2,
//                "betas": [...], "b": 0.7, "h": 0.3, "actions": [...]},
//   "policies": [{"name": "DisSigUCB", "type": "signature" | "window-mean" | "kernel",
//                 "lambda": 1.0, "gamma": 1.0, "depth": 3, "bandwidth": 1.0}],
//   "trials": 100, "base_seed": 20240611, "output": "out/bm_maxmin",
//   "eigencheck_depths": [1, 2, 3, 4], "jobs": 1
// }
//
// Relative replay file paths resolve against the config file's directory.

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "sigbandit/error.hpp"
#include "sigbandit/harness.hpp"

namespace sigbandit {

namespace detail {

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadConfig, std::string("field '") + key + "': " + e.what());
  }
}

inline ProcessKind parse_process(const std::string& s) {
  if (s == "bm") return ProcessKind::BM;
  if (s == "gbm") return ProcessKind::GBM;
  if (s == "ou") return ProcessKind::OU;
  if (s == "replay") return ProcessKind::Replay;
  throw Error(ErrorCode::BadConfig, "unknown process '" + s + "'");
}

inline RewardKind parse_reward_kind(const std::string& s) {
  if (s == "linear") return RewardKind::Linear;
  if (s == "maxmin") return RewardKind::MaxMin;
  if (s == "newsvendor") return RewardKind::Newsvendor;
  throw Error(ErrorCode::BadConfig, "unknown reward kind '" + s + "'");
}

inline std::string resolve(const std::string& p, const std::filesystem::path& base) {
  if (p.empty() || base.empty()) return p;
  std::filesystem::path fp(p);
  return fp.is_absolute() ? p : (base / fp).lexically_normal().string();
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  using detail::get_or;
  if (!j.is_object()) throw Error(ErrorCode::BadConfig, "config root must be an object");
  ExperimentConfig cfg;

  const nlohmann::json env = j.value("env", nlohmann::json::object());
  cfg.env.process = detail::parse_process(get_or<std::string>(env, "process", "bm"));
  cfg.env.horizon = get_or(env, "horizon", cfg.env.horizon);
  cfg.env.window = get_or(env, "window", cfg.env.window);
  cfg.env.steps_per_unit = get_or(env, "steps_per_unit", cfg.env.steps_per_unit);
  cfg.env.noise_std = get_or(env, "noise_std", cfg.env.noise_std);
  cfg.env.channels = get_or(env, "channels", cfg.env.channels);
  cfg.env.alpha = get_or(env, "alpha", cfg.env.alpha);
  cfg.env.nu = get_or(env, "nu", cfg.env.nu);
  cfg.env.theta = get_or(env, "theta", cfg.env.theta);
  cfg.env.mu = get_or(env, "mu", cfg.env.mu);
  cfg.env.sigma = get_or(env, "sigma", cfg.env.sigma);
  cfg.env.replay_contexts = detail::resolve(get_or<std::string>(env, "contexts", ""), base_dir);
  cfg.env.replay_rewards = detail::resolve(get_or<std::string>(env, "rewards", ""), base_dir);

  const nlohmann::json reward = j.value("reward", nlohmann::json::object());
  cfg.reward.kind = detail::parse_reward_kind(get_or<std::string>(reward, "kind", "maxmin"));
  cfg.reward.arms = get_or(reward, "arms", cfg.reward.arms);
  cfg.reward.betas = get_or(reward, "betas", cfg.reward.betas);
  cfg.reward.underage = get_or(reward, "b", cfg.reward.underage);
  cfg.reward.overage = get_or(reward, "h", cfg.reward.overage);
  cfg.reward.actions = get_or(reward, "actions", cfg.reward.actions);

  for (const auto& p : j.value("policies", nlohmann::json::array())) {
    NamedPolicy named;
    named.name = get_or<std::string>(p, "name", "");
    if (named.name.empty()) throw Error(ErrorCode::BadConfig, "every policy needs a name");
    const std::string type = get_or<std::string>(p, "type", "signature");
    if (type == "signature") {
      named.config.feature_mode = FeatureMode::Signature;
    } else if (type == "window-mean") {
      named.config.feature_mode = FeatureMode::WindowMean;
    } else if (type == "kernel") {
      named.config.kind = PolicyKind::KernelUcb;
      named.config.feature_mode = FeatureMode::WindowMean;
    } else {
      throw Error(ErrorCode::BadConfig, "unknown policy type '" + type + "'");
    }
    named.config.lambda = get_or(p, "lambda", named.config.lambda);
    named.config.gamma = get_or(p, "gamma", named.config.gamma);
    named.config.depth = get_or(p, "depth", named.config.depth);
    named.config.bandwidth = get_or(p, "bandwidth", named.config.bandwidth);
    named.config.arms = cfg.reward.arms;
    cfg.policies.push_back(named);
  }

  cfg.trials = get_or(j, "trials", cfg.trials);
  cfg.base_seed = get_or(j, "base_seed", cfg.base_seed);
  cfg.output = get_or<std::string>(j, "output", "");
  cfg.eigen_depths = get_or(j, "eigencheck_depths", cfg.eigen_depths);
  cfg.jobs = get_or(j, "jobs", cfg.jobs);
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::BadConfig, "cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadConfig, path + ": " + e.what());
  }
  return parse_config(j, std::filesystem::path(path).parent_path());
}

}  // namespace sigbandit
