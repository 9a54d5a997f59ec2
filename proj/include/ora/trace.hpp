#pragma once

// Per-round trace CSV. Comment lines ("# key=value") carry the run header;
// one data row per round follows the column line. Every float is written in
// shortest round-trip form so a parsed trace reproduces the trajectory bit
// for bit.
//
// Columns:
//   t, action, candidate, gate_open, reward, cum_reward, lambda_l1,
//   max_general_violation_cum, cum_consumption_1..n, lambda_1..M, gtilde_1..M

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ora/core.hpp"
#include "ora/serialization.hpp"

namespace ora {

inline constexpr int kTraceSchemaVersion = 1;

struct TraceHeader {
  std::size_t T = 0;
  std::size_t K = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t void_index = 0;
  double eta = 0.0;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> beta;
  std::string instance_hash;
  json config = json::object();
  int schema_version = kTraceSchemaVersion;
};

struct TraceFile {
  TraceHeader header;
  Trajectory trajectory;
};

namespace detail {

inline std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += format_double(v[i]);
  }
  return s;
}

inline std::vector<double> split_doubles(const std::string& s) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(';', pos);
    out.push_back(parse_double(std::string_view(s).substr(pos, next - pos)));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(',', pos);
    out.push_back(line.substr(pos, next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

inline std::size_t parse_size(const std::string& s) {
  std::size_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw ValidationError("not an integer: '" + s + "'");
  return v;
}

}  // namespace detail

inline std::string write_trace(const TraceHeader& h, const Trajectory& traj) {
  const std::size_t M = h.m + h.n;
  std::ostringstream out;
  out << "# schema_version=" << h.schema_version << "\n";
  out << "# T=" << h.T << "\n# K=" << h.K << "\n# m=" << h.m << "\n# n=" << h.n << "\n";
  out << "# void_index=" << h.void_index << "\n";
  out << "# eta=" << format_double(h.eta) << "\n# delta=" << format_double(h.delta) << "\n";
  out << "# seed=" << h.seed << "\n";
  out << "# beta=" << detail::join_doubles(h.beta) << "\n";
  out << "# instance_hash=" << h.instance_hash << "\n";
  out << "# tau=" << traj.stopping_time << "\n";
  out << "# final_lambda=" << detail::join_doubles(traj.final_dual.values) << "\n";
  out << "# config=" << h.config.dump() << "\n";

  out << "t,action,candidate,gate_open,reward,cum_reward,lambda_l1,max_general_violation_cum";
  for (std::size_t j = 1; j <= h.n; ++j) out << ",cum_consumption_" << j;
  for (std::size_t i = 1; i <= M; ++i) out << ",lambda_" << i;
  for (std::size_t i = 1; i <= M; ++i) out << ",gtilde_" << i;
  out << "\n";

  double cum_reward = 0.0;
  std::vector<double> g_cum(h.m, 0.0);
  for (const auto& r : traj.records) {
    cum_reward += r.reward;
    for (std::size_t i = 0; i < h.m; ++i) g_cum[i] += r.unified_values[i];
    const double worst = h.m ? *std::max_element(g_cum.begin(), g_cum.end()) : 0.0;
    out << r.round << ',' << r.action << ',' << r.candidate_action << ','
        << (r.gate_open ? 1 : 0) << ',' << format_double(r.reward) << ','
        << format_double(cum_reward) << ',' << format_double(r.dual_before.l1()) << ','
        << format_double(worst);
    for (double c : r.cumulative_consumption) out << ',' << format_double(c);
    for (double l : r.dual_before.values) out << ',' << format_double(l);
    for (double g : r.unified_values) out << ',' << format_double(g);
    out << "\n";
  }
  return out.str();
}

/// Parses a trace. Values are taken verbatim, so tampered multipliers
/// (even negative ones) survive parsing and are left for the audits to flag.
inline TraceFile read_trace(const std::string& text) {
  TraceFile tf;
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  bool have_columns = false;
  std::size_t lineno = 0;
  std::size_t n = 0, M = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ValidationError("malformed header line " + std::to_string(lineno));
      kv[line.substr(2, eq - 2)] = line.substr(eq + 1);
      continue;
    }
    if (!have_columns) {
      for (const char* key : {"schema_version", "T", "K", "m", "n", "eta", "delta", "seed", "beta",
                              "instance_hash", "final_lambda", "tau"})
        if (!kv.count(key)) throw ValidationError(std::string("trace header missing '") + key + "'");
      auto& h = tf.header;
      h.schema_version = static_cast<int>(detail::parse_size(kv["schema_version"]));
      if (h.schema_version != kTraceSchemaVersion)
        throw ValidationError("trace schema_version " + kv["schema_version"] +
                              " does not match " + std::to_string(kTraceSchemaVersion));
      h.T = detail::parse_size(kv["T"]);
      h.K = detail::parse_size(kv["K"]);
      h.m = detail::parse_size(kv["m"]);
      h.n = detail::parse_size(kv["n"]);
      h.void_index = kv.count("void_index") ? detail::parse_size(kv["void_index"]) : 0;
      h.eta = parse_double(kv["eta"]);
      h.delta = parse_double(kv["delta"]);
      h.seed = std::stoull(kv["seed"]);
      h.beta = detail::split_doubles(kv["beta"]);
      h.instance_hash = kv["instance_hash"];
      if (kv.count("config")) h.config = json::parse(kv["config"]);
      tf.trajectory.final_dual.values = detail::split_doubles(kv["final_lambda"]);
      tf.trajectory.stopping_time = detail::parse_size(kv["tau"]);
      n = h.n;
      M = h.m + h.n;
      have_columns = true;
      const auto cols = detail::split_csv(line);
      if (cols.size() != 8 + n + 2 * M)
        throw ValidationError("trace column count mismatch on line " + std::to_string(lineno));
      continue;
    }
    const auto f = detail::split_csv(line);
    if (f.size() != 8 + n + 2 * M)
      throw ValidationError("wrong field count on line " + std::to_string(lineno));
    RoundRecord r;
    r.round = detail::parse_size(f[0]);
    r.action = detail::parse_size(f[1]);
    r.candidate_action = detail::parse_size(f[2]);
    r.gate_open = f[3] == "1";
    r.reward = parse_double(f[4]);
    std::size_t c = 8;
    for (std::size_t j = 0; j < n; ++j) r.cumulative_consumption.push_back(parse_double(f[c++]));
    for (std::size_t i = 0; i < M; ++i) r.dual_before.values.push_back(parse_double(f[c++]));
    for (std::size_t i = 0; i < M; ++i) r.unified_values.push_back(parse_double(f[c++]));
    tf.trajectory.records.push_back(std::move(r));
  }
  if (!have_columns) throw ValidationError("trace has no column line");
  if (tf.trajectory.records.size() != tf.header.T)
    throw ValidationError("trace has " + std::to_string(tf.trajectory.records.size()) +
                          " rows, header says T=" + std::to_string(tf.header.T));
  return tf;
}

}  // namespace ora
