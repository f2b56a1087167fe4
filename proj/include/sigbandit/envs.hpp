#pragma once

// Synthetic context processes (Euler-Maruyama on a uniform grid), reward
// functionals and the noisy observation model.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sigbandit/error.hpp"
#include "sigbandit/path.hpp"

namespace sigbandit {

using Rng = std::mt19937_64;

enum class ProcessKind { BM, GBM, OU, Replay };

struct EnvSpec {
  ProcessKind process = ProcessKind::BM;
  double alpha = 0.1;  // GBM drift
  double nu = 1.0;     // GBM volatility
  double theta = 1.0;  // OU mean reversion
  double mu = 0.0;     // OU long-run mean
  double sigma = 1.0;  // OU volatility
  int horizon = 100;   // T
  int window = 1;      // L
  int steps_per_unit = 1000;
  double noise_std = 0.1;
  std::size_t channels = 1;
  std::string replay_contexts;
  std::string replay_rewards;

  double dt() const { return 1.0 / static_cast<double>(steps_per_unit); }

  void validate() const {
    if (steps_per_unit < 1) throw Error(ErrorCode::BadConfig, "steps_per_unit must be >= 1");
    if (window < 1) throw Error(ErrorCode::BadConfig, "window must be >= 1");
    if (process != ProcessKind::Replay && horizon < window) {
      throw Error(ErrorCode::BadConfig, "horizon must be >= window");
    }
    if (!(noise_std >= 0.0) || !std::isfinite(noise_std)) {
      throw Error(ErrorCode::BadConfig, "noise_std must be >= 0");
    }
    if (channels < 1) throw Error(ErrorCode::BadConfig, "need at least one channel");
    if (!std::isfinite(alpha) || !std::isfinite(nu) || !std::isfinite(theta) || !std::isfinite(mu) ||
        !std::isfinite(sigma)) {
      throw Error(ErrorCode::BadConfig, "process parameters must be finite");
    }
    if (process == ProcessKind::Replay && replay_contexts.empty()) {
      throw Error(ErrorCode::BadConfig, "replay environment needs a contexts file");
    }
  }
};

enum class RewardKind { Linear, MaxMin, Newsvendor };

struct RewardSpec {
  RewardKind kind = RewardKind::MaxMin;
  std::size_t arms = 2;
  std::vector<double> betas;     // linear: one coefficient per arm
  double underage = 0.7;         // newsvendor b
  double overage = 0.3;          // newsvendor h
  std::vector<double> actions;   // newsvendor staffing levels, one per arm

  void validate() const {
    if (arms < 1) throw Error(ErrorCode::BadConfig, "need at least one arm");
    switch (kind) {
      case RewardKind::Linear:
        if (!betas.empty() && betas.size() != arms) {
          throw Error(ErrorCode::BadConfig, "linear reward needs one beta per arm");
        }
        break;
      case RewardKind::MaxMin:
        if (arms != 2) throw Error(ErrorCode::BadConfig, "max/min reward is defined for exactly 2 arms");
        break;
      case RewardKind::Newsvendor:
        if (!(underage > 0.0) || !(overage > 0.0)) {
          throw Error(ErrorCode::BadConfig, "newsvendor costs b and h must be > 0");
        }
        if (actions.size() != arms) throw Error(ErrorCode::BadConfig, "newsvendor needs one action per arm");
        for (std::size_t i = 1; i < actions.size(); ++i) {
          if (!(actions[i] > actions[i - 1])) {
            throw Error(ErrorCode::BadConfig, "newsvendor action grid must be strictly increasing");
          }
        }
        break;
    }
  }
};

struct RoundOutcome {
  Window window;
  std::vector<double> true_rewards;
  double observed_reward = 0.0;
  std::size_t optimal_arm = 0;
};

// One Euler-Maruyama channel driven by the given increments eps_k ~ N(0, dt).
inline std::vector<double> euler_maruyama(const EnvSpec& spec, double initial, std::span<const double> eps) {
  const double dt = spec.dt();
  std::vector<double> x(eps.size() + 1);
  x[0] = initial;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    const double cur = x[k];
    switch (spec.process) {
      case ProcessKind::BM:
        x[k + 1] = cur + eps[k];
        break;
      case ProcessKind::GBM:
        x[k + 1] = cur + spec.alpha * cur * dt + spec.nu * cur * eps[k];
        if (!(x[k + 1] > 0.0)) {
          throw Error(ErrorCode::NonPositiveGBM, "GBM reached " + std::to_string(x[k + 1]) + " at step " +
                                                     std::to_string(k + 1));
        }
        break;
      case ProcessKind::OU:
        x[k + 1] = cur + spec.theta * (spec.mu - cur) * dt + spec.sigma * eps[k];
        break;
      case ProcessKind::Replay:
        throw Error(ErrorCode::BadConfig, "replay environments are not simulated");
    }
  }
  return x;
}

inline double initial_value(const EnvSpec& spec, Rng& rng) {
  switch (spec.process) {
    case ProcessKind::BM: return 0.0;
    case ProcessKind::GBM: return 1.0;
    case ProcessKind::OU: return std::normal_distribution<double>(0.0, 1.0)(rng);
    case ProcessKind::Replay: break;
  }
  throw Error(ErrorCode::BadConfig, "replay environments are not simulated");
}

// Full path on [0, horizon + extra_units]; channels are independent copies of
// the process. Timestamps are k / steps_per_unit so integer times are exact.
inline DiscretePath simulate_process(const EnvSpec& spec, Rng& rng, int extra_units = 0) {
  spec.validate();
  const std::size_t steps = static_cast<std::size_t>(spec.horizon + extra_units) *
                            static_cast<std::size_t>(spec.steps_per_unit);
  const std::size_t d = spec.channels;
  const double sd = std::sqrt(spec.dt());
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> values((steps + 1) * d);
  std::vector<double> eps(steps);
  for (std::size_t c = 0; c < d; ++c) {
    const double x0 = initial_value(spec, rng);
    for (double& e : eps) e = sd * normal(rng);
    const std::vector<double> x = euler_maruyama(spec, x0, eps);
    for (std::size_t k = 0; k <= steps; ++k) values[k * d + c] = x[k];
  }
  std::vector<double> times(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    times[k] = static_cast<double>(k) / static_cast<double>(spec.steps_per_unit);
  }
  return DiscretePath(std::move(times), std::move(values), d);
}

// Window on [round - L, round]; GBM windows are log-normalized to start at 0.
inline Window context_window(const DiscretePath& path, const EnvSpec& spec, int round) {
  if (round < spec.window || static_cast<double>(round) > path.end_time()) {
    throw Error(ErrorCode::BadRound, "round " + std::to_string(round) + " outside [" +
                                         std::to_string(spec.window) + ", " +
                                         std::to_string(path.end_time()) + "]");
  }
  DiscretePath slice = slice_window(path, static_cast<double>(round - spec.window), static_cast<double>(round));
  if (spec.process == ProcessKind::GBM) slice = log_normalize(slice);
  return Window{round, std::move(slice), static_cast<double>(spec.window)};
}

inline double newsvendor_reward(double action, double demand, double underage, double overage) {
  return -(underage * std::max(demand - action, 0.0) + overage * std::max(action - demand, 0.0));
}

// Noiseless reward of every arm. Linear and max/min read channel 0; the
// newsvendor reward needs the next round's demand.
inline std::vector<double> eval_rewards(const Window& window, const RewardSpec& reward,
                                        std::optional<double> demand = std::nullopt) {
  std::vector<double> out(reward.arms);
  switch (reward.kind) {
    case RewardKind::Linear: {
      if (reward.betas.size() != reward.arms) {
        throw Error(ErrorCode::BadConfig, "linear reward has " + std::to_string(reward.betas.size()) +
                                              " betas for " + std::to_string(reward.arms) + " arms");
      }
      const double mean = mean_value(window.path)[0];
      for (std::size_t a = 0; a < reward.arms; ++a) out[a] = reward.betas[a] * mean;
      break;
    }
    case RewardKind::MaxMin:
      if (reward.arms != 2) throw Error(ErrorCode::BadConfig, "max/min reward needs 2 arms");
      out[0] = std::abs(channel_extremum(window.path, 0, Extremum::Max));
      out[1] = std::abs(channel_extremum(window.path, 0, Extremum::Min));
      break;
    case RewardKind::Newsvendor:
      if (!demand) throw Error(ErrorCode::MissingDemand, "newsvendor reward needs the realized demand");
      if (reward.actions.size() != reward.arms) {
        throw Error(ErrorCode::BadConfig, "newsvendor needs one action per arm");
      }
      for (std::size_t a = 0; a < reward.arms; ++a) {
        out[a] = newsvendor_reward(reward.actions[a], *demand, reward.underage, reward.overage);
      }
      break;
  }
  return out;
}

// Lowest index attaining the maximum.
inline std::size_t optimal_arm(std::span<const double> true_rewards) {
  return static_cast<std::size_t>(std::max_element(true_rewards.begin(), true_rewards.end()) -
                                  true_rewards.begin());
}

inline void check_arm(std::span<const double> true_rewards, std::size_t chosen) {
  if (chosen >= true_rewards.size()) {
    throw Error(ErrorCode::BadArm, "arm " + std::to_string(chosen) + " of " +
                                       std::to_string(true_rewards.size()));
  }
}

// f_chosen + eta with a pre-drawn standard normal z (eta = noise_std * z).
inline double observe_with(std::span<const double> true_rewards, std::size_t chosen, double noise_std,
                           double standard_normal) {
  check_arm(true_rewards, chosen);
  return true_rewards[chosen] + noise_std * standard_normal;
}

inline double observe(std::span<const double> true_rewards, std::size_t chosen, double noise_std, Rng& stream) {
  check_arm(true_rewards, chosen);
  if (noise_std == 0.0) return true_rewards[chosen];
  return true_rewards[chosen] + std::normal_distribution<double>(0.0, noise_std)(stream);
}

// max_a f_a - f_chosen on noiseless rewards.
inline double instant_regret(std::span<const double> true_rewards, std::size_t chosen) {
  check_arm(true_rewards, chosen);
  return *std::max_element(true_rewards.begin(), true_rewards.end()) - true_rewards[chosen];
}

inline std::vector<double> sample_linear_betas(std::size_t arms, Rng& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> betas(arms);
  for (double& b : betas) b = unif(rng);
  return betas;
}

}  // namespace sigbandit
