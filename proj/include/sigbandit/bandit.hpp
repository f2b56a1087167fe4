#pragma once

// Disjoint-arm UCB policies: the signature-feature policy (DisSigUCB), the
// window-mean linear baseline (DisLinUCB) and an RBF-kernel baseline
// (KernelUCB). Ties in the argmax go to the lowest arm index.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sigbandit/error.hpp"
#include "sigbandit/linalg.hpp"

namespace sigbandit {

enum class FeatureMode { Signature, WindowMean };
enum class PolicyKind { LinearUcb, KernelUcb };

struct PolicyConfig {
  PolicyKind kind = PolicyKind::LinearUcb;
  FeatureMode feature_mode = FeatureMode::Signature;
  double lambda = 1.0;
  double gamma = 1.0;
  std::size_t depth = 3;
  std::size_t arms = 2;
  double bandwidth = 1.0;  // RBF length scale, kernel policy only

  void validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw Error(ErrorCode::BadConfig, "lambda must be > 0, got " + std::to_string(lambda));
    }
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
      throw Error(ErrorCode::BadConfig, "gamma must be >= 0, got " + std::to_string(gamma));
    }
    if (arms < 1) throw Error(ErrorCode::BadConfig, "need at least one arm");
    if (feature_mode == FeatureMode::Signature && depth < 1) {
      throw Error(ErrorCode::BadConfig, "signature depth must be >= 1");
    }
    if (kind == PolicyKind::KernelUcb && !(bandwidth > 0.0)) {
      throw Error(ErrorCode::BadConfig, "kernel bandwidth must be > 0");
    }
  }
};

// Ridge sufficient statistics of one arm: M = lambda I + sum x x^T,
// u = sum r x, beta_hat = M^{-1} u.
struct ArmState {
  SymMatrix gram;
  std::vector<double> moment;
  std::vector<double> beta_hat;
  std::size_t pulls = 0;
  CholeskyFactor factor;

  ArmState(std::size_t dim, double lambda)
      : gram(SymMatrix::identity(dim, lambda)),
        moment(dim, 0.0),
        beta_hat(dim, 0.0),
        factor(gram) {}

  std::size_t dim() const noexcept { return moment.size(); }
};

inline double ucb_score(const ArmState& arm, std::span<const double> x, double gamma) {
  if (x.size() != arm.dim()) {
    throw Error(ErrorCode::ShapeMismatch, "feature of length " + std::to_string(x.size()) +
                                              " for arm of dimension " + std::to_string(arm.dim()));
  }
  const double mean = dot(x, arm.beta_hat);
  if (gamma == 0.0) return mean;
  return mean + gamma * inv_quad_norm(arm.factor, x);
}

class LinUcbPolicy {
 public:
  LinUcbPolicy(const PolicyConfig& config, std::size_t feature_dim) : config_(config) {
    config_.validate();
    if (feature_dim < 1) throw Error(ErrorCode::BadConfig, "feature dimension must be >= 1");
    arms_.reserve(config_.arms);
    for (std::size_t a = 0; a < config_.arms; ++a) arms_.emplace_back(feature_dim, config_.lambda);
  }

  const PolicyConfig& config() const noexcept { return config_; }
  std::size_t arm_count() const noexcept { return arms_.size(); }
  std::size_t feature_dim() const noexcept { return arms_.front().dim(); }
  const ArmState& arm(std::size_t a) const { return arms_.at(a); }

  double score(std::size_t a, std::span<const double> x) const {
    return ucb_score(arm(a), x, config_.gamma);
  }

  std::size_t select(std::span<const double> x) const {
    std::size_t best = 0;
    double best_score = score(0, x);
    for (std::size_t a = 1; a < arms_.size(); ++a) {
      const double s = score(a, x);
      if (s > best_score) {
        best = a;
        best_score = s;
      }
    }
    return best;
  }

  void update(std::size_t a, std::span<const double> x, double reward) {
    if (a >= arms_.size()) {
      throw Error(ErrorCode::BadArm, "arm " + std::to_string(a) + " of " + std::to_string(arms_.size()));
    }
    ArmState& s = arms_[a];
    if (x.size() != s.dim()) throw Error(ErrorCode::ShapeMismatch, "feature length mismatch in update");
    s.gram.add_outer(x);
    for (std::size_t i = 0; i < x.size(); ++i) s.moment[i] += reward * x[i];
    s.factor = CholeskyFactor(s.gram);
    s.beta_hat = s.factor.solve(s.moment);
    ++s.pulls;
  }

 private:
  PolicyConfig config_;
  std::vector<ArmState> arms_;
};

inline LinUcbPolicy init_policy(const PolicyConfig& config, std::size_t feature_dim) {
  return LinUcbPolicy(config, feature_dim);
}

// k(z, z') = exp(-|z - z'|^2 / (2 l^2))
inline double rbf_kernel(std::span<const double> a, std::span<const double> b, double bandwidth) {
  if (a.size() != b.size()) throw Error(ErrorCode::ShapeMismatch, "kernel inputs of unequal length");
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return std::exp(-d2 / (2.0 * bandwidth * bandwidth));
}

struct KernelArmState {
  std::vector<std::vector<double>> contexts;
  std::vector<double> rewards;
  std::optional<CholeskyFactor> factor;  // of K_g + lambda I
  std::vector<double> weights;           // (K_g + lambda I)^{-1} r
  double cached_lambda = 0.0;
  double cached_bandwidth = 0.0;

  std::size_t pulls() const noexcept { return contexts.size(); }

  void refresh(double lambda, double bandwidth) {
    cached_lambda = lambda;
    cached_bandwidth = bandwidth;
    const std::size_t n = contexts.size();
    SymMatrix g(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) g.set(i, j, rbf_kernel(contexts[i], contexts[j], bandwidth));
    }
    g.add_diagonal(lambda);
    factor.emplace(g);
    weights = factor->solve(rewards);
  }
};

// GP-style score: mu = k_z^T (K + lambda I)^{-1} r,
// sigma = sqrt(k(z, z) - k_z^T (K + lambda I)^{-1} k_z), score = mu + gamma sigma.
inline double kernel_ucb_score(const KernelArmState& arm, std::span<const double> z, double gamma,
                               double lambda, double bandwidth) {
  if (!(bandwidth > 0.0)) throw Error(ErrorCode::BadConfig, "bandwidth must be > 0");
  if (arm.contexts.empty()) return gamma * std::sqrt(rbf_kernel(z, z, bandwidth));
  if (!arm.factor || arm.cached_lambda != lambda || arm.cached_bandwidth != bandwidth) {
    KernelArmState fresh{arm.contexts, arm.rewards, std::nullopt, {}, 0.0, 0.0};
    fresh.refresh(lambda, bandwidth);
    return kernel_ucb_score(fresh, z, gamma, lambda, bandwidth);
  }
  std::vector<double> kz(arm.contexts.size());
  for (std::size_t i = 0; i < kz.size(); ++i) kz[i] = rbf_kernel(z, arm.contexts[i], bandwidth);
  const double mu = dot(kz, arm.weights);
  const std::vector<double> y = arm.factor->forward(kz);
  double quad = 0.0;
  for (double v : y) quad += v * v;
  const double var = std::max(0.0, rbf_kernel(z, z, bandwidth) - quad);
  return mu + gamma * std::sqrt(var);
}

class KernelUcbPolicy {
 public:
  explicit KernelUcbPolicy(const PolicyConfig& config) : config_(config), arms_(config.arms) {
    config_.validate();
  }

  const PolicyConfig& config() const noexcept { return config_; }
  std::size_t arm_count() const noexcept { return arms_.size(); }
  const KernelArmState& arm(std::size_t a) const { return arms_.at(a); }

  double score(std::size_t a, std::span<const double> z) const {
    return kernel_ucb_score(arm(a), z, config_.gamma, config_.lambda, config_.bandwidth);
  }

  std::size_t select(std::span<const double> z) const {
    std::size_t best = 0;
    double best_score = score(0, z);
    for (std::size_t a = 1; a < arms_.size(); ++a) {
      const double s = score(a, z);
      if (s > best_score) {
        best = a;
        best_score = s;
      }
    }
    return best;
  }

  void update(std::size_t a, std::span<const double> z, double reward) {
    if (a >= arms_.size()) {
      throw Error(ErrorCode::BadArm, "arm " + std::to_string(a) + " of " + std::to_string(arms_.size()));
    }
    KernelArmState& s = arms_[a];
    if (!s.contexts.empty() && s.contexts.front().size() != z.size()) {
      throw Error(ErrorCode::ShapeMismatch, "context length mismatch in kernel update");
    }
    s.contexts.emplace_back(z.begin(), z.end());
    s.rewards.push_back(reward);
    s.refresh(config_.lambda, config_.bandwidth);
  }

 private:
  PolicyConfig config_;
  std::vector<KernelArmState> arms_;
};

// Exploration coefficient from the regret theorem (lambda = 1):
// sqrt(dim * log(K (1 + T B^2) / delta)) + S
inline double gamma_theoretical(std::size_t dim, std::size_t arms, std::size_t horizon, double bound_b,
                                double delta, double bound_s) {
  if (dim < 1 || arms < 1 || horizon < 1) throw Error(ErrorCode::BadConfig, "dim, K and T must be >= 1");
  if (!(bound_b > 0.0)) throw Error(ErrorCode::BadConfig, "B must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::BadConfig, "delta must lie in (0, 1)");
  if (!(bound_s >= 0.0)) throw Error(ErrorCode::BadConfig, "S must be >= 0");
  const double arg = static_cast<double>(arms) * (1.0 + static_cast<double>(horizon) * bound_b * bound_b) / delta;
  if (!(arg > 1.0)) throw Error(ErrorCode::BadConfig, "log argument must exceed 1");
  return std::sqrt(static_cast<double>(dim) * std::log(arg)) + bound_s;
}

}  // namespace sigbandit
