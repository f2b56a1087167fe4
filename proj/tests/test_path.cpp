#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "sigbandit/path.hpp"

using namespace sigbandit;
using Catch::Approx;

namespace {

DiscretePath grid_path() {
  return DiscretePath({0.0, 0.5, 1.0, 1.5, 2.0}, {0.0, 1.0, 2.0, 3.0, 4.0}, 1);
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

TEST_CASE("DiscretePath validates its invariants", "[path]") {
  CHECK(code_of([] { DiscretePath({0.0, 0.0}, {1.0, 2.0}, 1); }) == ErrorCode::InvalidPath);
  CHECK(code_of([] { DiscretePath({0.0, 1.0}, {1.0}, 1); }) == ErrorCode::InvalidPath);
  CHECK(code_of([] { DiscretePath({0.0, 1.0}, {1.0, NAN}, 1); }) == ErrorCode::InvalidPath);
  CHECK(code_of([] { DiscretePath({0.0, INFINITY}, {1.0, 2.0}, 1); }) == ErrorCode::InvalidPath);
}

TEST_CASE("slice_window includes both endpoints", "[path]") {
  const auto p = grid_path();
  const auto s = slice_window(p, 0.0, 1.0);
  REQUIRE(s.size() == 3);
  CHECK(s.times() == std::vector<double>{0.0, 0.5, 1.0});

  const auto right = slice_window(p, 1.0, 2.0);
  CHECK(right.time(0) == s.end_time());
  CHECK(right.value(0, 0) == s.value(s.size() - 1, 0));
}

TEST_CASE("slice_window rejects off-grid and empty ranges", "[path]") {
  const auto p = grid_path();
  CHECK(code_of([&] { slice_window(p, 0.25, 1.0); }) == ErrorCode::GridMismatch);
  CHECK(code_of([&] { slice_window(p, 1.0, 1.0); }) == ErrorCode::InvalidRange);
  CHECK(code_of([&] { slice_window(p, 1.5, 1.0); }) == ErrorCode::InvalidRange);
}

TEST_CASE("slicing is consistent under nesting", "[path][property]") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  std::vector<double> t, v;
  for (int i = 0; i <= 200; ++i) {
    t.push_back(i / 20.0);
    v.push_back(normal(rng));
    v.push_back(normal(rng));
  }
  const DiscretePath p(t, v, 2);
  std::uniform_int_distribution<int> pick(0, 200);
  for (int trial = 0; trial < 50; ++trial) {
    int a = pick(rng), b = pick(rng), c = pick(rng);
    std::array<int, 3> idx{a, b, c};
    std::sort(idx.begin(), idx.end());
    if (idx[0] == idx[1] || idx[1] == idx[2]) continue;
    const double ta = t[idx[0]], tc = t[idx[1]], tb = t[idx[2]];
    CHECK(slice_window(slice_window(p, ta, tb), ta, tc) == slice_window(p, ta, tc));
  }
}

TEST_CASE("time_augment prepends the timestamp channel", "[path]") {
  const DiscretePath p({0.0, 1.0}, {0.0, 1.0}, 1);
  const auto a = time_augment(p);
  REQUIRE(a.channels() == 2);
  CHECK(a.values() == std::vector<double>{0.0, 0.0, 1.0, 1.0});

  const double c = 3.25;
  const auto k = time_augment(DiscretePath({0.0, 0.5, 1.0}, {c, c, c}, 1));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(k.value(i, 0) == k.time(i));
    CHECK(k.value(i, 1) == c);
  }

  // augmenting twice yields two time channels
  const auto twice = time_augment(a);
  REQUIRE(twice.channels() == 3);
  for (std::size_t i = 0; i < twice.size(); ++i) {
    CHECK(twice.value(i, 0) == twice.time(i));
    CHECK(twice.value(i, 1) == twice.time(i));
  }
}

TEST_CASE("mean_value is the arithmetic row mean", "[path]") {
  CHECK(mean_value(DiscretePath({0.0, 1.0, 2.0}, {2.5, 2.5, 2.5}, 1))[0] == 2.5);
  CHECK(mean_value(DiscretePath({0.0, 1.0, 2.0}, {0.0, 1.0, 5.0}, 1))[0] == 2.0);

  std::vector<double> t(1001), v(1001);
  for (int i = 0; i <= 1000; ++i) t[i] = v[i] = i / 1000.0;
  CHECK(mean_value(DiscretePath(t, v, 1))[0] == Approx(0.5).epsilon(1e-14));

  // permuting rows (keeping the time grid) leaves the mean unchanged
  std::vector<double> rev(v.rbegin(), v.rend());
  CHECK(mean_value(DiscretePath(t, rev, 1))[0] == Approx(mean_value(DiscretePath(t, v, 1))[0]).epsilon(1e-14));
}

TEST_CASE("channel_extremum", "[path]") {
  const DiscretePath p({0.0, 1.0, 2.0}, {-2.0, 0.0, 3.0}, 1);
  CHECK(channel_extremum(p, 0, Extremum::Max) == 3.0);
  CHECK(channel_extremum(p, 0, Extremum::Min) == -2.0);
  const DiscretePath flat({0.0, 1.0}, {4.0, 4.0}, 1);
  CHECK(channel_extremum(flat, 0, Extremum::Max) == channel_extremum(flat, 0, Extremum::Min));
  const DiscretePath single({0.0}, {7.0}, 1);
  CHECK(channel_extremum(single, 0, Extremum::Max) == 7.0);
  CHECK(channel_extremum(single, 0, Extremum::Min) == 7.0);
  CHECK(code_of([&] { channel_extremum(p, 1, Extremum::Max); }) == ErrorCode::BadChannel);
}

TEST_CASE("log_normalize", "[path]") {
  const double e = std::exp(1.0);
  const auto n = log_normalize(DiscretePath({0.0, 1.0, 2.0}, {1.0, e, e * e}, 1));
  CHECK(n.value(0, 0) == 0.0);
  CHECK(n.value(1, 0) == Approx(1.0).epsilon(1e-15));
  CHECK(n.value(2, 0) == Approx(2.0).epsilon(1e-15));

  const auto flat = log_normalize(DiscretePath({0.0, 1.0, 2.0}, {3.0, 3.0, 3.0}, 1));
  for (double v : flat.values()) CHECK(v == 0.0);

  CHECK(code_of([] { log_normalize(DiscretePath({0.0, 1.0}, {1.0, -0.5}, 1)); }) ==
        ErrorCode::NonPositiveValue);

  const auto two = log_normalize(DiscretePath({0.0, 1.0}, {2.0, 5.0, 4.0, 1.0}, 2));
  CHECK(two.value(0, 0) == 0.0);
  CHECK(two.value(0, 1) == 0.0);
}
