#pragma once

// CSV replay environments.
//
// Context file:  round,time,x_1,...,x_d   rows sorted by (round, time); the
//                rows of one round form that round's window.
// Rewards file:  round,r_arm_1,...,r_arm_K   one row per round.
//
// Rounds must be contiguous integers and appear in both files.

#include <charconv>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sigbandit/error.hpp"
#include "sigbandit/path.hpp"

namespace sigbandit {

struct ReplayData {
  std::vector<Window> windows;
  std::vector<std::vector<double>> rewards;  // [round index][arm]
  std::size_t channels = 0;
  std::size_t arms = 0;
};

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view f = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!f.empty() && (f.back() == '\r' || f.back() == ' ')) f.remove_suffix(1);
    while (!f.empty() && f.front() == ' ') f.remove_prefix(1);
    fields.emplace_back(f);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

inline double parse_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::ReplayFormatError, where + ": cannot parse number '" + s + "'");
  }
  return v;
}

inline long parse_round(const std::string& s, const std::string& where) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::ReplayFormatError, where + ": round must be an integer, got '" + s + "'");
  }
  return v;
}

inline std::vector<std::vector<std::string>> read_csv(std::istream& in, const std::string& name) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) throw Error(ErrorCode::ReplayFormatError, name + ": empty file");
  return rows;
}

// Checks "<first...>,<prefix>1,...,<prefix>n" and returns n.
inline std::size_t check_header(const std::vector<std::string>& header,
                                const std::vector<std::string>& leading, const std::string& prefix,
                                const std::string& name) {
  if (header.size() <= leading.size()) {
    throw Error(ErrorCode::ReplayFormatError, name + ": header has no " + prefix + "* columns");
  }
  for (std::size_t i = 0; i < leading.size(); ++i) {
    if (header[i] != leading[i]) {
      throw Error(ErrorCode::ReplayFormatError, name + ": expected column '" + leading[i] + "', got '" +
                                                    header[i] + "'");
    }
  }
  for (std::size_t i = leading.size(); i < header.size(); ++i) {
    const std::string expected = prefix + std::to_string(i - leading.size() + 1);
    if (header[i] != expected) {
      throw Error(ErrorCode::ReplayFormatError, name + ": expected column '" + expected + "', got '" +
                                                    header[i] + "'");
    }
  }
  return header.size() - leading.size();
}

}  // namespace detail

// expected_arms = 0 accepts whatever the rewards header declares.
inline ReplayData parse_replay(std::istream& contexts, std::istream& rewards, std::size_t expected_arms = 0) {
  ReplayData data;
  const auto ctx_rows = detail::read_csv(contexts, "contexts");
  data.channels = detail::check_header(ctx_rows[0], {"round", "time"}, "x_", "contexts");
  const std::size_t d = data.channels;

  std::vector<long> rounds;
  std::vector<double> times;
  std::vector<double> values;
  auto flush = [&](long round) {
    if (times.size() < 2) {
      throw Error(ErrorCode::ReplayFormatError,
                  "contexts: round " + std::to_string(round) + " has fewer than 2 samples");
    }
    DiscretePath p(std::move(times), std::move(values), d);
    const double length = p.end_time() - p.start_time();
    data.windows.push_back(Window{static_cast<int>(round), std::move(p), length});
    times.clear();
    values.clear();
  };
  for (std::size_t r = 1; r < ctx_rows.size(); ++r) {
    const auto& row = ctx_rows[r];
    const std::string where = "contexts line " + std::to_string(r + 1);
    if (row.size() != d + 2) {
      throw Error(ErrorCode::ReplayFormatError, where + ": expected " + std::to_string(d + 2) + " fields");
    }
    const long round = detail::parse_round(row[0], where);
    if (rounds.empty() || round != rounds.back()) {
      if (!rounds.empty()) {
        if (round != rounds.back() + 1) {
          throw Error(ErrorCode::ReplayFormatError, where + ": rounds must be contiguous, got " +
                                                        std::to_string(round) + " after " +
                                                        std::to_string(rounds.back()));
        }
        flush(rounds.back());
      }
      rounds.push_back(round);
    }
    const double t = detail::parse_double(row[1], where);
    if (!times.empty() && !(t > times.back())) {
      throw Error(ErrorCode::ReplayFormatError, where + ": time not strictly increasing within round");
    }
    times.push_back(t);
    for (std::size_t c = 0; c < d; ++c) values.push_back(detail::parse_double(row[2 + c], where));
  }
  if (rounds.empty()) throw Error(ErrorCode::ReplayFormatError, "contexts: no data rows");
  flush(rounds.back());

  const auto rew_rows = detail::read_csv(rewards, "rewards");
  data.arms = detail::check_header(rew_rows[0], {"round"}, "r_arm_", "rewards");
  if (expected_arms != 0 && data.arms != expected_arms) {
    throw Error(ErrorCode::ReplayFormatError, "rewards: header declares " + std::to_string(data.arms) +
                                                  " arms, expected " + std::to_string(expected_arms));
  }
  if (rew_rows.size() - 1 != rounds.size()) {
    throw Error(ErrorCode::ReplayFormatError, "rewards: " + std::to_string(rew_rows.size() - 1) +
                                                  " rows for " + std::to_string(rounds.size()) + " rounds");
  }
  for (std::size_t r = 1; r < rew_rows.size(); ++r) {
    const auto& row = rew_rows[r];
    const std::string where = "rewards line " + std::to_string(r + 1);
    if (row.size() != data.arms + 1) {
      throw Error(ErrorCode::ReplayFormatError, where + ": expected " + std::to_string(data.arms + 1) + " fields");
    }
    if (detail::parse_round(row[0], where) != rounds[r - 1]) {
      throw Error(ErrorCode::ReplayFormatError, where + ": round does not match contexts file");
    }
    std::vector<double> rew(data.arms);
    for (std::size_t a = 0; a < data.arms; ++a) rew[a] = detail::parse_double(row[1 + a], where);
    data.rewards.push_back(std::move(rew));
  }
  return data;
}

inline ReplayData load_replay(const std::string& contexts_path, const std::string& rewards_path,
                              std::size_t expected_arms = 0) {
  std::ifstream ctx(contexts_path);
  if (!ctx) throw Error(ErrorCode::IoError, "cannot open replay contexts '" + contexts_path + "'");
  std::ifstream rew(rewards_path);
  if (!rew) throw Error(ErrorCode::IoError, "cannot open replay rewards '" + rewards_path + "'");
  return parse_replay(ctx, rew, expected_arms);
}

}  // namespace sigbandit
