// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.
//
//   acceptance_test            run everything
//   acceptance_test 6 7        run selected criteria

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ora/allocator.hpp"
#include "ora/audit.hpp"
#include "ora/environments.hpp"
#include "ora/experiment.hpp"
#include "ora/lagrangian.hpp"
#include "ora/metrics.hpp"
#include "ora/oracles.hpp"

namespace {

using namespace ora;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::size_t jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path scratch(const std::string& tag) {
  auto dir = fs::temp_directory_path() / ("ora_acceptance_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Shared corpus for criteria 1-3: K in [2,6], m,n in [0,3], m+n >= 1.
struct RandomSpec {
  std::size_t K, m, n;
  double margin;
};

RandomSpec random_spec(std::uint64_t seed, double min_margin, bool need_resource) {
  CounterRng pick(seed, 0xACCE);
  RandomSpec s{};
  s.K = 2 + pick.below(5);
  do {
    s.m = pick.below(4);
    s.n = pick.below(4);
  } while (s.m + s.n == 0 || (need_resource && s.n == 0));
  s.margin = pick.uniform(min_margin, 0.3);
  return s;
}

struct CorpusRun {
  Instance inst;
  Trajectory traj;
  double eta;
};

CorpusRun corpus_run(std::uint64_t seed, std::size_t T, double delta, double min_margin) {
  const auto s = random_spec(seed, min_margin, false);
  CorpusRun r;
  r.inst = random_instance({seed}, T, s.K, s.m, s.n, s.margin);
  r.eta = learning_rate(T, s.m + s.n, delta);
  r.traj = run(r.inst, {r.eta, delta});
  return r;
}

// Criteria 1-3 share one batch of 1000 runs.
struct BudgetBatch {
  std::size_t runs = 0, budget_fail = 0, drift_fail = 0, tele_fail = 0, tele_checked = 0;
  std::size_t gate_closed = 0;
  double worst_drift_ratio = 0.0, worst_tele_gap = -1e300;
  double seconds = 0.0;
};

const BudgetBatch& budget_batch() {
  static const BudgetBatch batch = [] {
    BudgetBatch b;
    const std::size_t N = 1000, T = 2000;
    std::vector<BudgetBatch> per(N);
    const auto t0 = std::chrono::steady_clock::now();
    parallel_for(N, jobs(), [&](std::size_t i) {
      auto& p = per[i];
      const auto r = corpus_run(10000 + i, T, 0.05, 0.05);
      const auto& traj = r.traj;
      // Hard budget: recompute the consumption from the instance, no tolerance.
      for (std::size_t j = 0; j < r.inst.num_resources; ++j) {
        double used = 0.0;
        for (std::size_t t = 0; t < T; ++t)
          used += r.inst.rounds[t].consumptions(j, traj.records[t].action);
        if (!(used <= r.inst.beta[j] * static_cast<double>(T))) p.budget_fail = 1;
      }
      if (traj.stopping_time < T) p.gate_closed = 1;
      const double M = static_cast<double>(r.inst.num_constraints());
      const double drift = dual_drift_audit(traj, r.eta);
      if (!(drift <= r.eta * M + 1e-12)) p.drift_fail = 1;
      p.worst_drift_ratio = drift / (r.eta * M);
      const auto tele = audit_telescoping(traj, r.inst.num_general, r.eta);
      if (tele.status == AuditStatus::fail) p.tele_fail = 1;
      p.tele_checked = tele.checked;
      if (tele.checked) p.worst_tele_gap = tele.worst;
    });
    b.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    b.runs = N;
    for (const auto& p : per) {
      b.budget_fail += p.budget_fail;
      b.drift_fail += p.drift_fail;
      b.tele_fail += p.tele_fail;
      b.tele_checked += p.tele_checked;
      b.gate_closed += p.gate_closed;
      b.worst_drift_ratio = std::max(b.worst_drift_ratio, p.worst_drift_ratio);
      if (p.tele_checked) b.worst_tele_gap = std::max(b.worst_tele_gap, p.worst_tele_gap);
    }
    return b;
  }();
  return batch;
}

Outcome criterion1() {
  const auto& b = budget_batch();
  return {b.budget_fail == 0 && b.seconds <= 120.0,
          std::to_string(b.runs) + " runs, T=2000, " + std::to_string(b.budget_fail) +
              " overspends, gate closed in " + std::to_string(b.gate_closed) + " runs, " +
              fmt("%.1f s (limit 120 s)", b.seconds)};
}

Outcome criterion2() {
  const auto& b = budget_batch();
  return {b.drift_fail == 0, std::to_string(b.drift_fail) + " runs over eta*M + 1e-12; max drift/(eta*M) = " +
                                 fmt("%.6f", b.worst_drift_ratio)};
}

Outcome criterion3() {
  const auto& b = budget_batch();
  return {b.tele_fail == 0, std::to_string(b.tele_checked) + " general rows checked, " +
                                std::to_string(b.tele_fail) +
                                " runs over lambda/eta + 1e-9; worst sum - lambda/eta = " +
                                fmt("%.3e", b.worst_tele_gap)};
}

Outcome criterion4() {
  const std::size_t N = 1000, T = 2000;
  std::vector<int> ok(N, 0);
  std::vector<double> ratio(N, 0.0), rho_seen(N, 0.0);
  parallel_for(N, jobs(), [&](std::size_t i) {
    const auto r = corpus_run(20000 + i, T, 0.01, 0.1);
    const double rho = slater_adv(r.inst);
    rho_seen[i] = rho;
    const double bound = dual_bound(r.inst.num_constraints(), rho);
    const double peak = max_dual_l1(r.traj);
    ratio[i] = peak / bound;
    ok[i] = rho >= 0.1 && peak <= bound;
  });
  const std::size_t passed = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 1));
  const double min_rho = *std::min_element(rho_seen.begin(), rho_seen.end());
  const double rate = static_cast<double>(passed) / N;
  return {rate >= 0.99 && min_rho >= 0.1,
          std::to_string(passed) + "/" + std::to_string(N) + " within 14M/rho (need >= 99%), " +
              "min oracle rho = " + fmt("%.4f", min_rho) + ", max |lambda|_1 / bound = " +
              fmt("%.3e", *std::max_element(ratio.begin(), ratio.end()))};
}

Outcome criterion5() {
  const std::size_t N = 20, pairs = 100, T = 2000;
  std::vector<std::size_t> fails(N, 0);
  std::vector<double> worst(N, 1e300);
  parallel_for(N, jobs(), [&](std::size_t i) {
    const auto r = corpus_run(30000 + i, T, 0.05, 0.05);
    for (const auto& p : sample_interval_regret(r.traj, r.eta, pairs, 30000 + i)) {
      if (!p.holds) ++fails[i];
      worst[i] = std::min(worst[i], p.lhs - p.rhs);
    }
  });
  std::size_t total = 0;
  for (auto f : fails) total += f;
  return {total == 0, std::to_string(N * pairs) + " pairs over " + std::to_string(N) +
                          " trajectories, " + std::to_string(total) +
                          " violations; min lhs - rhs = " +
                          fmt("%.3e", *std::min_element(worst.begin(), worst.end()))};
}

std::vector<std::uint64_t> seed_range(std::uint64_t lo, std::size_t count) {
  std::vector<std::uint64_t> s(count);
  for (std::size_t i = 0; i < count; ++i) s[i] = lo + i;
  return s;
}

Outcome criterion6() {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig cfg;
  cfg.name = "violation_scaling";
  cfg.generator = "pacing";
  cfg.T_list = {500, 2000, 8000, 32000};
  cfg.seeds = seed_range(0, 30);
  cfg.jobs = jobs();
  cfg.out_dir = scratch("c6").string();
  const double rho = slater_stoc(pacing_model());
  const auto agg = cmd_sweep(cfg);
  std::size_t bound_fail = 0;
  for (const auto& row : agg.rows) {
    const auto& br = row.summary.at("bound_report");
    if (!br.contains("violation") || !br.at("violation").at("satisfied").get<bool>()) ++bound_fail;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream d;
  d << "rho_stoc = " << fmt("%.3f", rho) << ", mean V_T+ =";
  for (double v : agg.mean_violation) d << ' ' << fmt("%.4g", v);
  d << ", slope = " << fmt("%.4f", agg.violation_fit.slope) << " (limit 0.6), "
    << bound_fail << " runs over the closed form, " << fmt("%.1f s (limit 600 s)", secs);
  const bool pass = rho >= 0.2 && agg.violation_fit.points == 4 &&
                    agg.violation_fit.slope <= 0.6 && bound_fail == 0 && secs <= 600.0;
  return {pass, d.str()};
}

Outcome criterion7() {
  // Tiny regime: exact OPT of each sampled sequence by enumeration.
  const auto model = pacing_model();
  const std::size_t T = 6, seeds = 200;
  double sum = 0.0;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    const auto inst = sample_sequence(model, T, {s});
    const auto traj = run(inst, {learning_rate(T, 2, 0.05), 0.05});
    sum += opt_bruteforce(inst).opt_value - total_reward(traj);
  }
  const double mean_tiny = sum / seeds;
  const double exact = opt_stoc_exact(model, T).opt_value;
  const double bound_tiny = regret_bound(T, 2, 0.05, *std::min_element(model.beta.begin(), model.beta.end()));
  const bool tiny_ok = mean_tiny <= bound_tiny;

  // Moderate regime: LP benchmark, per-round gap must shrink with T.
  ExperimentConfig cfg;
  cfg.name = "regret_moderate";
  cfg.generator = "pacing";
  cfg.params = {{"gap", 0.01}};
  cfg.T_list = {500, 2000, 8000};
  cfg.seeds = seed_range(0, 30);
  cfg.oracle = "lp";
  cfg.jobs = jobs();
  cfg.out_dir = scratch("c7").string();
  const auto agg = cmd_sweep(cfg);
  std::vector<double> per_round;
  for (std::size_t k = 0; k < agg.T_values.size(); ++k)
    per_round.push_back(agg.mean_regret[k] / static_cast<double>(agg.T_values[k]));
  std::size_t inversions = 0;
  for (std::size_t k = 1; k < per_round.size(); ++k)
    if (!(per_round[k] < per_round[k - 1])) ++inversions;
  bool methods_ok = true;
  for (auto T2 : cfg.T_list)
    for (auto s : cfg.seeds) {
      const auto doc = parse_json_text(read_file(sweep_cell_path(cfg, T2, s, ".json")));
      if (doc.at("audit_inputs").at("opt_method") != "lp_relaxation") methods_ok = false;
    }
  const bool moderate_ok = inversions <= 1 && methods_ok;

  std::ostringstream d;
  d << "tiny: mean regret " << fmt("%.4f", mean_tiny) << " (E[OPT] exact " << fmt("%.4f", exact)
    << ") <= bound " << fmt("%.1f", bound_tiny) << "; moderate: mean (LP-Rew)/T =";
  for (double v : per_round) d << ' ' << fmt("%.4g", v);
  d << ", " << inversions << " inversions (max 1)";
  return {tiny_ok && moderate_ok, d.str()};
}

Outcome criterion8() {
  const std::size_t N = 50, T = 300;
  std::vector<int> ok(N, 0);
  std::vector<double> worst(N, 0.0), rhos(N, 0.0);
  parallel_for(N, jobs(), [&](std::size_t i) {
    const auto s = random_spec(40000 + i, 0.2, true);
    const auto inst = random_instance({40000 + i}, T, s.K, s.m, s.n, std::max(0.2, s.margin));
    const std::size_t M = inst.num_constraints();
    const auto traj = run(inst, {learning_rate(T, M, 0.05), 0.05});
    const double rho = slater_adv(inst);
    rhos[i] = rho;
    const double opt = opt_lp_relax(inst).opt_value;
    const double ar = alpha_regret(alpha(rho), opt, traj);
    const double bound = regret_bound(T, M, 0.05, inst.budget().min_beta());
    worst[i] = ar / bound;
    ok[i] = rho >= 0.2 && ar <= bound;
  });
  const auto passed = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 1));
  return {passed == N, std::to_string(passed) + "/" + std::to_string(N) +
                           " within the closed form, T=" + std::to_string(T) + ", min rho_adv = " +
                           fmt("%.4f", *std::min_element(rhos.begin(), rhos.end())) +
                           ", max alpha-regret / bound = " +
                           fmt("%.3e", *std::max_element(worst.begin(), worst.end()))};
}

Outcome criterion9() {
  std::size_t slater_mismatch = 0, lp_below = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CounterRng pick(seed, 0x5EA);
    const std::size_t K = 2 + pick.below(3);
    const std::size_t T = 2 + pick.below(4);
    const double margin = std::min(0.5, 1.0 / static_cast<double>(T) + 0.01);
    const auto inst =
        random_instance({50000 + seed}, T, K, pick.below(3), 1 + pick.below(2), margin);
    if (search_size(K, T) > 1e5) return {false, "instance exceeds K^T <= 1e5"};
    if (slater_adv(inst) != slater_adv_bruteforce(inst)) ++slater_mismatch;
  }
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CounterRng pick(seed, 0x1B);
    const std::size_t K = 2 + pick.below(2);
    const std::size_t T = 2 + pick.below(5);
    const double margin = std::min(0.5, 1.0 / static_cast<double>(T) + 0.01 + 0.2 * pick.uniform());
    const auto inst =
        random_instance({60000 + seed}, T, K, pick.below(3), 1 + pick.below(2), margin);
    const double brute = opt_bruteforce(inst).opt_value;
    const double lp = opt_lp_relax(inst).opt_value;
    if (!(lp >= brute - 1e-7 * std::max(1.0, std::abs(brute)))) ++lp_below;
  }
  return {slater_mismatch == 0 && lp_below == 0,
          "slater decomposition mismatches " + std::to_string(slater_mismatch) +
              "/50, LP below brute force " + std::to_string(lp_below) + "/50"};
}

Outcome criterion10() {
  const double rho = 0.1, eps = 0.2;
  const auto ex = make_example1_instance(rho, eps);
  const DualVector lam({20.0, 20.0});
  const auto& b = ex.budget_only.support.front();
  const auto ub = unify_constraints(b, {100, ex.budget_only.beta});
  const auto& g = ex.general.support.front();
  const auto ug = unify_constraints(g, {100, {}});
  const double v[4] = {lagrangian_value(b, ub, 0, lam), lagrangian_value(b, ub, 1, lam),
                       lagrangian_value(g, ug, kExample1SafeAction, lam),
                       lagrangian_value(g, ug, kExample1ViolatingAction, lam)};
  const double want[4] = {4.0, 3.0 - 2.0 * eps / rho, 5.0, 5.0 + 1.0 / rho};
  double err = 0.0;
  for (int k = 0; k < 4; ++k) err = std::max(err, std::abs(v[k] - want[k]));
  const auto br = best_response(g, ug, lam);
  std::ostringstream d;
  d << "values";
  for (double x : v) d << ' ' << fmt("%.15g", x);
  d << ", max error " << fmt("%.2e", err) << " (tol 1e-12), best response = action " << br.action;
  return {err <= 1e-12 && br.action == kExample1ViolatingAction, d.str()};
}

Outcome criterion11() {
  std::vector<ExperimentConfig> cfgs(4);
  cfgs[0].generator = "example1-general";
  cfgs[0].T = 1000;
  cfgs[0].seeds = {7};
  cfgs[1].generator = "pacing";
  cfgs[1].T = 2000;
  cfgs[1].seeds = {0, 1, 2};
  cfgs[2].generator = "random";
  cfgs[2].params = {{"K", 5}, {"m", 2}, {"n", 2}};
  cfgs[2].T = 1500;
  cfgs[2].seeds = {3, 4};
  cfgs[3].generator = "example1-budget";
  cfgs[3].T = 500;
  cfgs[3].seeds = {11};
  std::size_t files = 0, diffs = 0;
  for (std::size_t c = 0; c < cfgs.size(); ++c) {
    auto cfg = cfgs[c];
    cfg.out_dir = scratch("c11_a" + std::to_string(c)).string();
    const auto a = cmd_run(cfg);
    cfg.out_dir = scratch("c11_b" + std::to_string(c)).string();
    cfg.jobs = 4;  // parallel rerun must not change bytes
    const auto b = cmd_run(cfg);
    for (std::size_t i = 0; i < a.size(); ++i) {
      ++files;
      if (read_file(a[i]) != read_file(b[i])) ++diffs;
    }
  }
  return {diffs == 0, std::to_string(files) + " files compared, " + std::to_string(diffs) +
                          " differ"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"hard budget feasibility", criterion1},
      {"per-step dual drift", criterion2},
      {"telescoped violation", criterion3},
      {"dual-norm bound", criterion4},
      {"interval regret", criterion5},
      {"violation scaling", criterion6},
      {"stochastic regret", criterion7},
      {"adversarial alpha-regret", criterion8},
      {"oracle cross-validation", criterion9},
      {"Example 1 fixture", criterion10},
      {"determinism", criterion11},
  };
  std::set<std::size_t> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoul(argv[i]));

  std::size_t failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (!only.empty() && !only.count(k + 1)) continue;
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << k + 1 << ". " << criteria[k].first << ": "
              << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
