#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "sigbandit/envs.hpp"

using namespace sigbandit;

namespace {

EnvSpec spec_for(ProcessKind kind) {
  EnvSpec s;
  s.process = kind;
  s.horizon = 5;
  s.window = 1;
  s.steps_per_unit = 100;
  return s;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected sigbandit::Error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("Euler-Maruyama single steps", "[envs]") {
  EnvSpec bm = spec_for(ProcessKind::BM);
  const auto x = euler_maruyama(bm, 0.0, std::vector<double>{0.1, -0.2});
  CHECK(x[0] == 0.0);
  CHECK(x[1] == Catch::Approx(0.1));
  CHECK(x[2] == Catch::Approx(-0.1));

  EnvSpec gbm = spec_for(ProcessKind::GBM);
  gbm.steps_per_unit = 1000;
  gbm.alpha = 0.1;
  gbm.nu = 1.0;
  CHECK(euler_maruyama(gbm, 1.0, std::vector<double>{0.02})[1] == Catch::Approx(1.0201).epsilon(1e-14));

  EnvSpec ou = spec_for(ProcessKind::OU);
  ou.steps_per_unit = 1000;
  ou.theta = 1.0;
  ou.mu = 0.0;
  ou.sigma = 1.0;
  CHECK(euler_maruyama(ou, 2.0, std::vector<double>{0.0})[1] == Catch::Approx(1.998).epsilon(1e-14));

  CHECK(code_of([&] { euler_maruyama(gbm, 1.0, std::vector<double>{-2.0}); }) == ErrorCode::NonPositiveGBM);
}

TEST_CASE("simulate_process grid, initial values and reproducibility", "[envs]") {
  for (auto kind : {ProcessKind::BM, ProcessKind::GBM, ProcessKind::OU}) {
    const EnvSpec s = spec_for(kind);
    Rng a(123), b(123);
    const auto pa = simulate_process(s, a);
    const auto pb = simulate_process(s, b);
    CHECK(pa == pb);
    REQUIRE(pa.size() == 5 * 100 + 1);
    CHECK(pa.end_time() == 5.0);
    CHECK(pa.time(100) == 1.0);
    if (kind == ProcessKind::BM) CHECK(pa.value(0, 0) == 0.0);
    if (kind == ProcessKind::GBM) CHECK(pa.value(0, 0) == 1.0);
  }
  EnvSpec two = spec_for(ProcessKind::OU);
  two.channels = 2;
  Rng r(4);
  const auto p = simulate_process(two, r);
  CHECK(p.channels() == 2);
  CHECK(p.value(0, 0) != p.value(0, 1));

  EnvSpec extended = spec_for(ProcessKind::BM);
  Rng r2(4);
  CHECK(simulate_process(extended, r2, 1).end_time() == 6.0);
}

TEST_CASE("zero-noise Brownian motion stays at zero", "[envs]") {
  const EnvSpec s = spec_for(ProcessKind::BM);
  const auto x = euler_maruyama(s, 0.0, std::vector<double>(500, 0.0));
  for (double v : x) CHECK(v == 0.0);
  std::vector<double> t(101);
  for (int i = 0; i <= 100; ++i) t[i] = i / 100.0;
  const DiscretePath p(t, std::vector<double>(101, 0.0), 1);
  RewardSpec maxmin;
  const auto f = eval_rewards(Window{1, p, 1.0}, maxmin);
  CHECK(f == std::vector<double>{0.0, 0.0});
}

TEST_CASE("context windows", "[envs]") {
  const EnvSpec bm = spec_for(ProcessKind::BM);
  Rng rng(5);
  const auto path = simulate_process(bm, rng);
  const auto w2 = context_window(path, bm, 2);
  const auto w3 = context_window(path, bm, 3);
  CHECK(w2.path.size() == 101);
  CHECK(w2.path.start_time() == 1.0);
  CHECK(w2.path.end_time() == 2.0);
  CHECK(w2.path.value(100, 0) == w3.path.value(0, 0));
  CHECK(code_of([&] { context_window(path, bm, 0); }) == ErrorCode::BadRound);
  CHECK(code_of([&] { context_window(path, bm, 6); }) == ErrorCode::BadRound);

  const EnvSpec gbm = spec_for(ProcessKind::GBM);
  Rng g(6);
  const auto gpath = simulate_process(gbm, g);
  for (int t = 1; t <= 5; ++t) CHECK(context_window(gpath, gbm, t).path.value(0, 0) == 0.0);

  // log-normalized windows do not depend on the scale of the raw path
  std::vector<double> scaled(gpath.values());
  for (double& v : scaled) v *= 3.0;
  const DiscretePath gscaled(gpath.times(), scaled, 1);
  for (int t = 1; t <= 5; ++t) {
    const auto a = context_window(gpath, gbm, t).path;
    const auto b = context_window(gscaled, gbm, t).path;
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::abs(a.value(i, 0) - b.value(i, 0)) <= 1e-12 * std::max(1.0, std::abs(a.value(i, 0))));
    }
  }
}

TEST_CASE("reward functionals", "[envs]") {
  const DiscretePath flat2({0.0, 0.5, 1.0}, {2.0, 2.0, 2.0}, 1);
  RewardSpec linear;
  linear.kind = RewardKind::Linear;
  linear.betas = {0.5, -0.5};
  CHECK(eval_rewards(Window{1, flat2, 1.0}, linear) == std::vector<double>{1.0, -1.0});

  RewardSpec maxmin;
  const DiscretePath p({0.0, 0.5, 1.0}, {-2.0, 0.0, 3.0}, 1);
  CHECK(eval_rewards(Window{1, p, 1.0}, maxmin) == std::vector<double>{3.0, 2.0});

  RewardSpec nv;
  nv.kind = RewardKind::Newsvendor;
  nv.arms = 3;
  nv.actions = {490.0, 500.0, 510.0};
  const auto f = eval_rewards(Window{1, p, 1.0}, nv, 500.0);
  CHECK(f[0] == Catch::Approx(-7.0));
  CHECK(f[1] == 0.0);
  CHECK(f[2] == Catch::Approx(-3.0));
  CHECK(code_of([&] { eval_rewards(Window{1, p, 1.0}, nv); }) == ErrorCode::MissingDemand);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  for (int i = 0; i < 100; ++i) {
    const double a = u(rng), d = u(rng);
    CHECK(newsvendor_reward(a, d, 0.7, 0.3) <= 0.0);
  }
  CHECK(newsvendor_reward(321.0, 321.0, 0.7, 0.3) == 0.0);

  RewardSpec bad = nv;
  bad.actions = {500.0, 490.0, 510.0};
  CHECK(code_of([&] { bad.validate(); }) == ErrorCode::BadConfig);
  RewardSpec three_maxmin;
  three_maxmin.arms = 3;
  CHECK(code_of([&] { three_maxmin.validate(); }) == ErrorCode::BadConfig);
}

TEST_CASE("observation and regret", "[envs]") {
  const std::vector<double> f{1.0, 0.25};
  Rng rng(1);
  CHECK(observe(f, 0, 0.0, rng) == 1.0);
  CHECK(observe_with(f, 0, 0.05, 1.0) == Catch::Approx(1.05));
  Rng a(77), b(77);
  CHECK(observe(f, 1, 0.1, a) == observe(f, 1, 0.1, b));
  CHECK(code_of([&] { observe(f, 2, 0.1, rng); }) == ErrorCode::BadArm);

  CHECK(instant_regret(std::vector<double>{4.0}, 0) == 0.0);
  CHECK(instant_regret(std::vector<double>{3.0, 2.0}, 0) == 0.0);
  CHECK(instant_regret(std::vector<double>{3.0, 2.0}, 1) == 1.0);
  CHECK(instant_regret(std::vector<double>{2.0, 2.0, 2.0}, 2) == 0.0);
  CHECK(code_of([&] { instant_regret(f, 5); }) == ErrorCode::BadArm);

  CHECK(optimal_arm(std::vector<double>{1.0, 3.0, 3.0}) == 1);
  std::mt19937_64 g(2);
  std::normal_distribution<double> n;
  for (int i = 0; i < 50; ++i) {
    std::vector<double> r{n(g), n(g), n(g)};
    for (std::size_t c = 0; c < 3; ++c) CHECK(instant_regret(r, c) >= 0.0);
    CHECK(instant_regret(r, optimal_arm(r)) == 0.0);
  }
}

TEST_CASE("linear betas are drawn from Unif(-1, 1)", "[envs]") {
  Rng a(9), b(9);
  const auto x = sample_linear_betas(50, a);
  CHECK(x == sample_linear_betas(50, b));
  for (double v : x) {
    CHECK(v >= -1.0);
    CHECK(v < 1.0);
  }
}
