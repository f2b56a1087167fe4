#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sigbandit/error.hpp"

namespace sigbandit {

// A multichannel trajectory sampled at strictly increasing timestamps.
// Values are stored row-major: sample i, channel c lives at values[i * d + c].
// Immutable once constructed.
class DiscretePath {
 public:
  DiscretePath() = default;

  DiscretePath(std::vector<double> times, std::vector<double> values, std::size_t channels)
      : times_(std::move(times)), values_(std::move(values)), channels_(channels) {
    if (channels_ == 0) throw Error(ErrorCode::InvalidPath, "path needs at least one channel");
    if (times_.empty()) throw Error(ErrorCode::InvalidPath, "path has no samples");
    if (values_.size() != times_.size() * channels_) {
      throw Error(ErrorCode::InvalidPath, "values size " + std::to_string(values_.size()) +
                                              " does not match " + std::to_string(times_.size()) +
                                              " samples x " + std::to_string(channels_) + " channels");
    }
    for (std::size_t i = 0; i < times_.size(); ++i) {
      if (!std::isfinite(times_[i])) throw Error(ErrorCode::InvalidPath, "non-finite timestamp");
      if (i > 0 && !(times_[i] > times_[i - 1])) {
        throw Error(ErrorCode::InvalidPath,
                    "timestamps not strictly increasing at sample " + std::to_string(i));
      }
    }
    for (double v : values_) {
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidPath, "non-finite sample value");
    }
  }

  std::size_t size() const noexcept { return times_.size(); }
  std::size_t channels() const noexcept { return channels_; }

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& values() const noexcept { return values_; }

  double time(std::size_t i) const { return times_[i]; }
  double value(std::size_t i, std::size_t c) const { return values_[i * channels_ + c]; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * channels_, channels_};
  }

  double start_time() const { return times_.front(); }
  double end_time() const { return times_.back(); }

  friend bool operator==(const DiscretePath&, const DiscretePath&) = default;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
  std::size_t channels_ = 0;
};

// The context observed at one round: the path restricted to [round - L, round].
struct Window {
  int round = 0;
  DiscretePath path;
  double length = 0.0;
};

namespace detail {

inline std::size_t grid_index(const DiscretePath& path, double t) {
  const auto& ts = path.times();
  auto it = std::lower_bound(ts.begin(), ts.end(), t);
  if (it == ts.end() || *it != t) {
    throw Error(ErrorCode::GridMismatch, "time " + std::to_string(t) + " is not a grid point");
  }
  return static_cast<std::size_t>(it - ts.begin());
}

}  // namespace detail

// Samples with t_start <= time <= t_end. Both endpoints must be exact grid
// timestamps, so consecutive windows share their boundary sample.
inline DiscretePath slice_window(const DiscretePath& path, double t_start, double t_end) {
  if (!(t_start < t_end)) {
    throw Error(ErrorCode::InvalidRange, "empty range [" + std::to_string(t_start) + ", " +
                                             std::to_string(t_end) + "]");
  }
  const std::size_t first = detail::grid_index(path, t_start);
  const std::size_t last = detail::grid_index(path, t_end);
  const std::size_t d = path.channels();
  std::vector<double> times(path.times().begin() + first, path.times().begin() + last + 1);
  std::vector<double> values(path.values().begin() + first * d,
                             path.values().begin() + (last + 1) * d);
  return DiscretePath(std::move(times), std::move(values), d);
}

// Prepends the timestamp as channel 0. Not idempotent: augmenting twice gives
// two time channels, so callers augment exactly once.
inline DiscretePath time_augment(const DiscretePath& path) {
  const std::size_t n = path.size();
  const std::size_t d = path.channels();
  std::vector<double> values;
  values.reserve(n * (d + 1));
  for (std::size_t i = 0; i < n; ++i) {
    values.push_back(path.time(i));
    auto r = path.row(i);
    values.insert(values.end(), r.begin(), r.end());
  }
  return DiscretePath(path.times(), std::move(values), d + 1);
}

// Arithmetic mean of the sample rows (equals the time average on a uniform grid).
inline std::vector<double> mean_value(const DiscretePath& path) {
  const std::size_t d = path.channels();
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < path.size(); ++i) {
    for (std::size_t c = 0; c < d; ++c) mean[c] += path.value(i, c);
  }
  for (double& m : mean) m /= static_cast<double>(path.size());
  return mean;
}

enum class Extremum { Max, Min };

inline double channel_extremum(const DiscretePath& path, std::size_t channel, Extremum mode) {
  if (channel >= path.channels()) {
    throw Error(ErrorCode::BadChannel, "channel " + std::to_string(channel) + " out of range (d = " +
                                           std::to_string(path.channels()) + ")");
  }
  double best = path.value(0, channel);
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double v = path.value(i, channel);
    best = mode == Extremum::Max ? std::max(best, v) : std::min(best, v);
  }
  return best;
}

// Log-returns relative to the first sample; the first row becomes exactly zero.
inline DiscretePath log_normalize(const DiscretePath& path) {
  for (double v : path.values()) {
    if (!(v > 0.0)) {
      throw Error(ErrorCode::NonPositiveValue, "log-normalization needs positive values, got " +
                                                   std::to_string(v));
    }
  }
  const std::size_t d = path.channels();
  std::vector<double> values(path.values().size());
  for (std::size_t i = 0; i < path.size(); ++i) {
    for (std::size_t c = 0; c < d; ++c) {
      values[i * d + c] = i == 0 ? 0.0 : std::log(path.value(i, c) / path.value(0, c));
    }
  }
  return DiscretePath(path.times(), std::move(values), d);
}

}  // namespace sigbandit
