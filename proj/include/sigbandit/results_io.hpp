#pragma once

// Result files. Numbers are written with 17 significant digits so reading
// them back reproduces the in-memory doubles exactly.
//
//   regret.csv       policy,trial,round,arm,regret,cum_regret
//   aggregate.csv    policy,round,q25,median,q75
//   results.json     {"per_round": [...], "aggregate": [...], "failed_trials": n}
//   eigencheck.csv          depth,round,q25,median,q75
//   eigencheck_trials.csv   depth,trial,b_hat,rho_hat,unpruned_lambda_min,unpruned_lambda_max

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigbandit/error.hpp"
#include "sigbandit/harness.hpp"
#include "sigbandit/replay.hpp"

namespace sigbandit {

enum class OutputFormat { Csv, Json };

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline std::filesystem::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory '" + dir + "': " + ec.message());
  return std::filesystem::path(dir);
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

}  // namespace detail

struct RegretRow {
  std::string policy;
  int trial = 0;
  int round = 0;
  std::size_t arm = 0;
  double regret = 0.0;
  double cum_regret = 0.0;
  friend bool operator==(const RegretRow&, const RegretRow&) = default;
};

struct AggregateRow {
  std::string policy;
  int round = 0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  friend bool operator==(const AggregateRow&, const AggregateRow&) = default;
};

inline std::vector<RegretRow> regret_rows(const ExperimentResult& result) {
  std::vector<RegretRow> rows;
  for (const auto& t : result.trials) {
    if (t.failed) continue;
    for (const auto& tr : t.traces) {
      for (std::size_t i = 0; i < tr.rounds.size(); ++i) {
        rows.push_back({tr.policy, t.trial, tr.rounds[i], tr.arms[i], tr.regret[i], tr.cum_regret[i]});
      }
    }
  }
  return rows;
}

inline std::vector<AggregateRow> aggregate_rows(const ExperimentResult& result) {
  std::vector<AggregateRow> rows;
  for (const auto& c : result.aggregates) {
    for (std::size_t i = 0; i < c.rounds.size(); ++i) {
      rows.push_back({c.policy, c.rounds[i], c.q25[i], c.median[i], c.q75[i]});
    }
  }
  return rows;
}

inline std::string regret_csv(const std::vector<RegretRow>& rows) {
  std::ostringstream os;
  os << "policy,trial,round,arm,regret,cum_regret\n";
  for (const auto& r : rows) {
    os << r.policy << ',' << r.trial << ',' << r.round << ',' << r.arm << ',' << format_double(r.regret) << ','
       << format_double(r.cum_regret) << '\n';
  }
  return os.str();
}

inline std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::ostringstream os;
  os << "policy,round,q25,median,q75\n";
  for (const auto& r : rows) {
    os << r.policy << ',' << r.round << ',' << format_double(r.q25) << ',' << format_double(r.median) << ','
       << format_double(r.q75) << '\n';
  }
  return os.str();
}

inline nlohmann::json results_json(const ExperimentResult& result) {
  nlohmann::json per_round = nlohmann::json::array();
  for (const auto& r : regret_rows(result)) {
    per_round.push_back({{"policy", r.policy}, {"trial", r.trial}, {"round", r.round}, {"arm", r.arm},
                         {"regret", r.regret}, {"cum_regret", r.cum_regret}});
  }
  nlohmann::json agg = nlohmann::json::array();
  for (const auto& r : aggregate_rows(result)) {
    agg.push_back({{"policy", r.policy}, {"round", r.round}, {"q25", r.q25}, {"median", r.median}, {"q75", r.q75}});
  }
  return {{"per_round", per_round}, {"aggregate", agg}, {"failed_trials", result.failed_trials}};
}

// Returns the paths written.
inline std::vector<std::string> write_results(const ExperimentResult& result, OutputFormat format,
                                              const std::string& dir) {
  const auto base = detail::prepare_dir(dir);
  std::vector<std::string> written;
  if (format == OutputFormat::Csv) {
    detail::write_file(base / "regret.csv", regret_csv(regret_rows(result)));
    detail::write_file(base / "aggregate.csv", aggregate_csv(aggregate_rows(result)));
    written = {(base / "regret.csv").string(), (base / "aggregate.csv").string()};
  } else {
    detail::write_file(base / "results.json", results_json(result).dump(2) + "\n");
    written = {(base / "results.json").string()};
  }
  return written;
}

inline std::vector<std::vector<std::string>> read_csv_file(const std::string& path, const std::string& header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw Error(ErrorCode::IoError, path + ": unexpected header '" + line + "'");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(detail::split_csv_line(line));
  }
  return rows;
}

inline std::vector<RegretRow> read_regret_csv(const std::string& path) {
  std::vector<RegretRow> out;
  for (const auto& f : read_csv_file(path, "policy,trial,round,arm,regret,cum_regret")) {
    if (f.size() != 6) throw Error(ErrorCode::IoError, path + ": malformed row");
    out.push_back({f[0], std::stoi(f[1]), std::stoi(f[2]), static_cast<std::size_t>(std::stoul(f[3])),
                   detail::parse_double(f[4], path), detail::parse_double(f[5], path)});
  }
  return out;
}

inline std::vector<AggregateRow> read_aggregate_csv(const std::string& path) {
  std::vector<AggregateRow> out;
  for (const auto& f : read_csv_file(path, "policy,round,q25,median,q75")) {
    if (f.size() != 5) throw Error(ErrorCode::IoError, path + ": malformed row");
    out.push_back({f[0], std::stoi(f[1]), detail::parse_double(f[2], path), detail::parse_double(f[3], path),
                   detail::parse_double(f[4], path)});
  }
  return out;
}

inline std::vector<std::string> write_eigencheck(const EigencheckResult& result, const std::string& dir) {
  const auto base = detail::prepare_dir(dir);
  std::ostringstream curves;
  curves << "depth,round,q25,median,q75\n";
  std::ostringstream trials;
  trials << "depth,trial,b_hat,rho_hat,unpruned_lambda_min,unpruned_lambda_max\n";
  for (const auto& s : result.depths) {
    for (std::size_t i = 0; i < s.rounds.size(); ++i) {
      curves << s.depth << ',' << s.rounds[i] << ',' << format_double(s.q25[i]) << ','
             << format_double(s.median[i]) << ',' << format_double(s.q75[i]) << '\n';
    }
    for (const auto& g : s.trials) {
      trials << s.depth << ',' << g.trial << ',' << format_double(g.b_hat) << ',' << format_double(g.rho_hat)
             << ',' << format_double(g.unpruned_lambda_min) << ',' << format_double(g.unpruned_lambda_max) << '\n';
    }
  }
  detail::write_file(base / "eigencheck.csv", curves.str());
  detail::write_file(base / "eigencheck_trials.csv", trials.str());
  return {(base / "eigencheck.csv").string(), (base / "eigencheck_trials.csv").string()};
}

}  // namespace sigbandit
