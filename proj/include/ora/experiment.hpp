#pragma once

// Batch experiment driver behind the command-line tool: instance resolution
// from generators or files, per-(T, seed) runs with trace and summary files,
// sweeps with log-log rate fits, oracle reports, and trace audits.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "ora/allocator.hpp"
#include "ora/audit.hpp"
#include "ora/environments.hpp"
#include "ora/metrics.hpp"
#include "ora/oracles.hpp"
#include "ora/serialization.hpp"
#include "ora/trace.hpp"

namespace ora {

namespace fs = std::filesystem;

struct ExperimentConfig {
  std::string name = "run";
  std::optional<std::string> instance_path;
  std::string generator;
  std::map<std::string, double> params;
  std::size_t T = 1000;
  std::vector<std::size_t> T_list;
  double delta = 0.05;
  std::optional<double> eta;
  std::vector<std::uint64_t> seeds = {0};
  std::string oracle = "auto";  // none | auto | lp | brute
  std::size_t num_samples = 100;
  double guard = kDefaultSearchGuard;
  std::size_t jobs = 1;
  std::string out_dir = "out";

  void validate() const {
    if (eta && !(*eta > 0.0 && std::isfinite(*eta)))
      throw ValidationError("--eta must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("--delta must lie in (0,1)");
    if (seeds.empty()) throw ValidationError("at least one seed is required");
    if (!instance_path && generator.empty())
      throw ValidationError("either --instance or --generator is required");
    if (oracle != "none" && oracle != "auto" && oracle != "lp" && oracle != "brute")
      throw ValidationError("--oracle must be one of none, auto, lp, brute");
    if (jobs < 1) throw ValidationError("--jobs must be positive");
  }

  double param(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
};

inline const std::vector<std::string>& generator_names() {
  static const std::vector<std::string> names = {"example1-general", "example1-budget", "random",
                                                 "pacing"};
  return names;
}

/// A resolved source: either a fixed sequence or a model plus its sample.
struct ResolvedInstance {
  Instance instance;
  std::optional<StochasticModel> model;
  bool stochastic() const { return model.has_value(); }
};

/// Source description independent of T and seed (models are not sampled).
inline std::variant<Instance, StochasticModel> resolve_source(const ExperimentConfig& cfg,
                                                             std::size_t T, std::uint64_t seed) {
  if (cfg.instance_path) {
    auto loaded = load_instance(*cfg.instance_path);
    if (auto* inst = std::get_if<Instance>(&loaded)) return *inst;
    return std::get<LoadedModel>(loaded).model;
  }
  const auto& g = cfg.generator;
  if (g == "example1-general" || g == "example1-budget") {
    const auto ex = make_example1_instance(cfg.param("rho", 0.1), cfg.param("epsilon", 0.2));
    return g == "example1-general" ? ex.general : ex.budget_only;
  }
  if (g == "random") {
    return random_instance({seed}, T, static_cast<std::size_t>(cfg.param("K", 3)),
                           static_cast<std::size_t>(cfg.param("m", 1)),
                           static_cast<std::size_t>(cfg.param("n", 1)), cfg.param("margin", 0.2));
  }
  if (g == "pacing") return pacing_model(cfg.param("gap", kPacingDefaultGap));
  throw ValidationError("unknown generator '" + g + "'");
}

inline ResolvedInstance resolve_instance(const ExperimentConfig& cfg, std::size_t T,
                                         std::uint64_t seed) {
  auto src = resolve_source(cfg, T, seed);
  if (auto* inst = std::get_if<Instance>(&src)) return {*inst, std::nullopt};
  auto model = std::get<StochasticModel>(src);
  auto inst = sample_sequence(model, T, {seed});
  return {std::move(inst), std::move(model)};
}

inline json config_json(const ExperimentConfig& cfg, std::size_t T, std::uint64_t seed,
                        double eta) {
  json source;
  if (cfg.instance_path) {
    source = {{"instance", *cfg.instance_path}};
  } else {
    source = {{"generator", cfg.generator}, {"params", cfg.params}};
  }
  return {{"name", cfg.name},        {"source", source},
          {"T", T},                  {"delta", cfg.delta},
          {"eta", eta},              {"eta_override", cfg.eta.has_value()},
          {"seed", seed},            {"oracle", cfg.oracle},
          {"guard", cfg.guard},      {"rng", kRngName},
          {"schema_version", kTraceSchemaVersion}};
}

/// Rebuilds a config from the copy embedded in an output file.
inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  cfg.name = j.at("name").get<std::string>();
  const auto& src = j.at("source");
  if (src.contains("instance")) {
    cfg.instance_path = src.at("instance").get<std::string>();
  } else {
    cfg.generator = src.at("generator").get<std::string>();
    cfg.params = src.at("params").get<std::map<std::string, double>>();
  }
  cfg.T = j.at("T").get<std::size_t>();
  cfg.delta = j.at("delta").get<double>();
  if (j.at("eta_override").get<bool>()) cfg.eta = j.at("eta").get<double>();
  cfg.seeds = {j.at("seed").get<std::uint64_t>()};
  cfg.oracle = j.at("oracle").get<std::string>();
  cfg.guard = j.at("guard").get<double>();
  return cfg;
}

struct OptResult {
  double value = 0.0;
  OracleMethod method = OracleMethod::brute_force;
};

/// Picks brute force when the search fits the guard, the LP when it is
/// small after merging identical rounds, and nothing otherwise.
inline std::optional<OptResult> compute_opt(const Instance& inst, const std::string& mode,
                                            double guard) {
  if (mode == "none") return std::nullopt;
  if (mode == "brute") return OptResult{opt_bruteforce(inst, guard).opt_value, OracleMethod::brute_force};
  if (mode == "lp") return OptResult{opt_lp_relax(inst).opt_value, OracleMethod::lp_relaxation};
  if (search_size(inst.num_actions, inst.horizon()) <= guard)
    return OptResult{opt_bruteforce(inst, guard).opt_value, OracleMethod::brute_force};
  std::map<std::vector<double>, int> blocks;
  for (const auto& r : inst.rounds) {
    std::vector<double> key = r.rewards;
    key.insert(key.end(), r.general_costs.data().begin(), r.general_costs.data().end());
    key.insert(key.end(), r.consumptions.data().begin(), r.consumptions.data().end());
    blocks.emplace(std::move(key), 0);
    if (blocks.size() * inst.num_actions > 4000) return std::nullopt;
  }
  return OptResult{opt_lp_relax(inst).opt_value, OracleMethod::lp_relaxation};
}

struct CellOutput {
  std::string trace_csv;
  std::string summary_json;
  RunSummary summary;
  Trajectory trajectory;
};

inline json summary_to_json(const RunSummary& s) {
  json bounds = json::object();
  for (const auto& [k, v] : s.bound_report)
    bounds[k] = {{"value", v.value}, {"satisfied", v.satisfied}};
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"total_reward", s.total_reward},
          {"violation", s.violation},
          {"violation_clamped", s.violation_clamped},
          {"violation_applicable", s.violation_applicable},
          {"regret", opt(s.regret)},
          {"alpha_regret", opt(s.alpha_regret)},
          {"tau", s.tau},
          {"max_dual_l1", s.max_dual_l1},
          {"bound_report", bounds}};
}

inline double resolve_eta(const ExperimentConfig& cfg, std::size_t T, std::size_t M) {
  if (cfg.eta) return *cfg.eta;
  return learning_rate(T, std::max<std::size_t>(M, 1), cfg.delta);
}

inline CellOutput run_cell(const ExperimentConfig& cfg, std::size_t T, std::uint64_t seed) {
  const auto res = resolve_instance(cfg, T, seed);
  const auto& inst = res.instance;
  const std::size_t horizon = inst.horizon();
  const double eta = resolve_eta(cfg, horizon, inst.num_constraints());
  const OgdConfig ogd{eta, cfg.delta};
  ogd.validate();
  auto traj = run(inst, ogd);

  AuditInputs audit;
  std::optional<OptResult> opt;
  if (cfg.oracle != "none") {
    if (res.stochastic()) {
      if (search_size(res.model->num_actions, res.model->support.size()) <= cfg.guard)
        audit.rho = slater_stoc(*res.model, cfg.guard);
    } else {
      audit.rho = slater_adv(inst);
    }
    opt = compute_opt(inst, cfg.oracle, cfg.guard);
    if (opt) {
      if (res.stochastic()) {
        audit.opt_stoc = opt->value;
      } else if (audit.rho && *audit.rho >= 0.0) {
        audit.opt_adv = opt->value;
        audit.alpha = alpha(*audit.rho);
      }
    }
  }
  auto summary = summarize(traj, inst.num_general, inst.budget(), cfg.delta, audit);

  TraceHeader h;
  h.T = horizon;
  h.K = inst.num_actions;
  h.m = inst.num_general;
  h.n = inst.num_resources;
  h.void_index = inst.void_index;
  h.eta = eta;
  h.delta = cfg.delta;
  h.seed = seed;
  h.beta = inst.beta;
  h.instance_hash = instance_hash(inst);
  h.config = config_json(cfg, horizon, seed, eta);

  auto optional_json = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json doc = {{"schema_version", kTraceSchemaVersion},
              {"config", h.config},
              {"instance_hash", h.instance_hash},
              {"kind", res.stochastic() ? "stochastic" : "adversarial"},
              {"algorithm_inputs", {{"T", horizon}, {"eta", eta}, {"beta", inst.beta}}},
              {"audit_inputs",
               {{"rho", audit.rho && std::isfinite(*audit.rho) ? json(*audit.rho) : json(nullptr)},
                {"opt", opt ? json(opt->value) : json(nullptr)},
                {"opt_method", opt ? json(to_string(opt->method)) : json(nullptr)},
                {"alpha", optional_json(audit.alpha)}}},
              {"summary", summary_to_json(summary)}};

  return {write_trace(h, traj), doc.dump(1) + "\n", std::move(summary), std::move(traj)};
}

/// Runs fn(i) for i in [0, count) on up to `jobs` threads.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < std::min(jobs, count); ++w)
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

inline std::string cell_stem(const std::string& name, std::uint64_t seed) {
  return name + "_" + std::to_string(seed);
}

/// One trace CSV and one summary JSON per seed under out_dir.
inline std::vector<fs::path> cmd_run(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<fs::path> written(2 * cfg.seeds.size());
  parallel_for(cfg.seeds.size(), cfg.jobs, [&](std::size_t i) {
    const auto seed = cfg.seeds[i];
    const auto cell = run_cell(cfg, cfg.T, seed);
    const fs::path base = fs::path(cfg.out_dir) / cell_stem(cfg.name, seed);
    fs::path csv = base, js = base;
    csv += ".csv";
    js += ".json";
    write_file_atomic(csv, cell.trace_csv);
    write_file_atomic(js, cell.summary_json);
    written[2 * i] = csv;
    written[2 * i + 1] = js;
  });
  return written;
}

inline fs::path sweep_cell_path(const ExperimentConfig& cfg, std::size_t T, std::uint64_t seed,
                                const char* ext) {
  return fs::path(cfg.out_dir) / "cells" /
         (cfg.name + "_T" + std::to_string(T) + "_" + std::to_string(seed) + ext);
}

struct LogLogFit {
  double slope = std::nan("");
  double intercept = std::nan("");
  std::size_t points = 0;
};

/// Least squares of log(y) on log(x) over the points with y > 0.
inline LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  LogLogFit fit;
  fit.points = lx.size();
  if (lx.size() < 2) return fit;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(lx.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

struct SweepRow {
  std::size_t T = 0;
  std::uint64_t seed = 0;
  json summary;
};

struct SweepAggregate {
  std::vector<SweepRow> rows;
  std::vector<std::size_t> T_values;
  std::vector<double> mean_violation;  // mean positive part
  std::vector<double> mean_regret;     // NaN when unavailable
  LogLogFit violation_fit;
  LogLogFit regret_fit;
  std::string csv;
  std::string fit_json;
};

/// Reads every per-cell summary back from disk; refuses if any is missing.
inline SweepAggregate aggregate_sweep(const ExperimentConfig& cfg) {
  SweepAggregate agg;
  std::vector<std::string> missing;
  for (auto T : cfg.T_list)
    for (auto seed : cfg.seeds)
      if (!fs::exists(sweep_cell_path(cfg, T, seed, ".json")))
        missing.push_back(sweep_cell_path(cfg, T, seed, ".json").string());
  if (!missing.empty())
    throw IoError(missing.front(), "sweep incomplete (" + std::to_string(missing.size()) +
                                       " cell files missing), refusing to aggregate");

  std::ostringstream csv;
  csv << "T,seed,reward,violation,tau,max_dual_l1,regret,alpha_regret,bound_violation,"
         "bound_regret,bound_dual,pass_flags\n";
  auto cell = [](const json& v) { return v.is_null() ? std::string() : format_double(v.get<double>()); };
  for (auto T : cfg.T_list) {
    double vsum = 0.0, rsum = 0.0;
    std::size_t rcount = 0;
    for (auto seed : cfg.seeds) {
      const auto doc = parse_json_text(read_file(sweep_cell_path(cfg, T, seed, ".json")));
      const auto& s = doc.at("summary");
      const auto& b = s.at("bound_report");
      auto bound = [&](const char* k) {
        return b.contains(k) ? format_double(b.at(k).at("value").get<double>()) : std::string();
      };
      std::string flags;
      for (auto it = b.begin(); it != b.end(); ++it) {
        if (!flags.empty()) flags += ';';
        flags += it.key() + (it.value().at("satisfied").get<bool>() ? "=pass" : "=fail");
      }
      const std::string regret_bound_key = s.at("regret").is_null() ? "alpha_regret" : "regret";
      csv << T << ',' << seed << ',' << cell(s.at("total_reward")) << ','
          << cell(s.at("violation")) << ',' << s.at("tau").get<std::size_t>() << ','
          << cell(s.at("max_dual_l1")) << ',' << cell(s.at("regret")) << ','
          << cell(s.at("alpha_regret")) << ',' << bound("violation") << ','
          << bound(regret_bound_key.c_str()) << ',' << bound("dual_l1") << ',' << flags << "\n";
      vsum += s.at("violation_clamped").get<double>();
      if (!s.at("regret").is_null()) {
        rsum += s.at("regret").get<double>();
        ++rcount;
      }
      agg.rows.push_back({T, seed, s});
    }
    const double k = static_cast<double>(cfg.seeds.size());
    agg.T_values.push_back(T);
    agg.mean_violation.push_back(vsum / k);
    agg.mean_regret.push_back(rcount ? rsum / static_cast<double>(rcount) : std::nan(""));
  }
  std::vector<double> xs(agg.T_values.begin(), agg.T_values.end());
  agg.violation_fit = fit_loglog(xs, agg.mean_violation);
  agg.regret_fit = fit_loglog(xs, agg.mean_regret);
  agg.csv = csv.str();

  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json means = json::array();
  for (std::size_t i = 0; i < xs.size(); ++i)
    means.push_back({{"T", agg.T_values[i]},
                     {"mean_violation_pos", num(agg.mean_violation[i])},
                     {"mean_regret", num(agg.mean_regret[i])}});
  json fit = {{"means", means},
              {"violation_slope", num(agg.violation_fit.slope)},
              {"violation_points", agg.violation_fit.points},
              {"regret_slope", num(agg.regret_fit.slope)},
              {"regret_points", agg.regret_fit.points},
              {"seeds", cfg.seeds.size()}};
  agg.fit_json = fit.dump(1) + "\n";
  return agg;
}

inline SweepAggregate cmd_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.T_list.empty()) throw ValidationError("sweep requires a nonempty T list");
  const std::size_t cells = cfg.T_list.size() * cfg.seeds.size();
  parallel_for(cells, cfg.jobs, [&](std::size_t i) {
    const auto T = cfg.T_list[i / cfg.seeds.size()];
    const auto seed = cfg.seeds[i % cfg.seeds.size()];
    const auto cell = run_cell(cfg, T, seed);
    write_file_atomic(sweep_cell_path(cfg, T, seed, ".csv"), cell.trace_csv);
    write_file_atomic(sweep_cell_path(cfg, T, seed, ".json"), cell.summary_json);
  });
  auto agg = aggregate_sweep(cfg);
  write_file_atomic(fs::path(cfg.out_dir) / (cfg.name + "_sweep.csv"), agg.csv);
  write_file_atomic(fs::path(cfg.out_dir) / (cfg.name + "_sweep_fit.json"), agg.fit_json);
  return agg;
}

inline json report_to_json(const OracleReport& r) {
  json j = {{"opt_value", r.opt_value}, {"method", to_string(r.method)}};
  j["opt_actions"] = r.opt_actions ? json(*r.opt_actions) : json(nullptr);
  j["stderr"] = r.stderr_value ? json(*r.stderr_value) : json(nullptr);
  j["rho"] = r.rho && std::isfinite(*r.rho) ? json(*r.rho) : json(nullptr);
  j["alpha"] = r.alpha ? json(*r.alpha) : json(nullptr);
  j["iterations"] = r.iterations;
  return j;
}

/// OracleReport for the configured source at the first seed.
inline json cmd_oracle(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto seed = cfg.seeds.front();
  auto src = resolve_source(cfg, cfg.T, seed);
  OracleReport rep;
  json out;
  if (auto* inst = std::get_if<Instance>(&src)) {
    if (cfg.oracle == "lp") {
      rep = opt_lp_relax(*inst);
    } else if (cfg.oracle == "brute" ||
               search_size(inst->num_actions, inst->horizon()) <= cfg.guard) {
      rep = opt_bruteforce(*inst, cfg.guard);
    } else {
      rep = opt_lp_relax(*inst);
    }
    rep.rho = slater_adv(*inst);
    if (*rep.rho >= 0.0) rep.alpha = alpha(*rep.rho);
    out = {{"kind", "adversarial"}, {"T", inst->horizon()}, {"instance_hash", instance_hash(*inst)}};
  } else {
    const auto& model = std::get<StochasticModel>(src);
    StocEstimateOptions opts{cfg.guard, cfg.oracle != "brute"};
    rep = opt_stoc_estimate(model, cfg.T, cfg.num_samples, {seed}, opts);
    rep.rho = slater_stoc(model, cfg.guard);
    out = {{"kind", "stochastic"}, {"T", cfg.T}, {"num_samples", cfg.num_samples}};
  }
  out["report"] = report_to_json(rep);
  out["config"] = config_json(cfg, cfg.T, seed, 0.0);
  out["config"].erase("eta");
  out["config"].erase("eta_override");
  return out;
}

struct AuditRunResult {
  json report;
  std::size_t failures = 0;
};

/// Audits trace files. The instance is rebuilt from each trace's embedded
/// config and must match the recorded content hash.
inline AuditRunResult cmd_audit(const std::vector<std::string>& paths,
                                const AuditOptions& options = {}) {
  AuditRunResult res;
  json files = json::array();
  std::size_t pass = 0, fail = 0, na = 0;
  for (const auto& p : paths) {
    const auto tf = read_trace(read_file(p));
    const auto& h = tf.header;

    std::optional<Instance> inst;
    if (h.config.contains("source")) {
      const auto cfg = config_from_json(h.config);
      auto resolved = resolve_instance(cfg, h.T, h.seed).instance;
      if (instance_hash(resolved) != h.instance_hash)
        throw ValidationError("instance hash mismatch for trace " + p);
      inst = std::move(resolved);
    }
    AuditOptions opt = options;
    if (opt.interval_seed == 0) opt.interval_seed = h.seed;
    const auto outcomes =
        audit_all(tf.trajectory, h.m, h.beta, h.void_index, h.eta, inst ? &*inst : nullptr, opt);

    json audits = json::object();
    for (const auto& o : outcomes) {
      json a = {{"status", to_string(o.status)}, {"checked", o.checked}, {"failures", o.failures},
                {"worst", o.worst}};
      a["first_failure_round"] = o.first_failure_round ? json(*o.first_failure_round) : json(nullptr);
      audits[o.name] = a;
      switch (o.status) {
        case AuditStatus::pass: ++pass; break;
        case AuditStatus::fail: ++fail; break;
        case AuditStatus::not_applicable: ++na; break;
      }
    }
    files.push_back({{"file", p}, {"instance_hash", h.instance_hash}, {"audits", audits}});
  }
  res.failures = fail;
  res.report = {{"files", files},
                {"summary", {{"pass", pass}, {"fail", fail}, {"not_applicable", na}}}};
  return res;
}

/// Writes the configured source as an instance or model file.
inline fs::path cmd_gen(const ExperimentConfig& cfg, const fs::path& path) {
  cfg.validate();
  auto src = resolve_source(cfg, cfg.T, cfg.seeds.front());
  if (auto* inst = std::get_if<Instance>(&src)) {
    save_instance(path, *inst);
  } else {
    save_instance(path, LoadedModel{std::get<StochasticModel>(src), cfg.T});
  }
  return path;
}

}  // namespace ora
