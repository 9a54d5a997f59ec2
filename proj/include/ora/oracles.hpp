#pragma once

// Offline ground truth at desk scale: the dynamic optimum by exhaustive
// search and by LP relaxation, Monte Carlo estimates of its expectation under
// a finite-support model, and Slater margins for both input regimes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ora/core.hpp"
#include "ora/environments.hpp"
#include "ora/rng.hpp"
#include "ora/simplex.hpp"

namespace ora {

enum class OracleMethod { brute_force, lp_relaxation, monte_carlo, monte_carlo_lp, enumeration };

inline std::string to_string(OracleMethod m) {
  switch (m) {
    case OracleMethod::brute_force: return "brute_force";
    case OracleMethod::lp_relaxation: return "lp_relaxation";
    case OracleMethod::monte_carlo: return "monte_carlo";
    case OracleMethod::monte_carlo_lp: return "monte_carlo_lp";
    case OracleMethod::enumeration: return "enumeration";
  }
  return "unknown";
}

struct OracleReport {
  double opt_value = 0.0;
  std::optional<std::vector<std::size_t>> opt_actions;
  OracleMethod method = OracleMethod::brute_force;
  std::optional<double> stderr_value;
  std::optional<double> rho;
  std::optional<double> alpha;
  std::size_t iterations = 0;
};

inline constexpr double kDefaultSearchGuard = 1e7;

/// Thrown when an exhaustive search would exceed its node guard.
class SizeGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double search_size(std::size_t base, std::size_t exponent) {
  return std::pow(static_cast<double>(base), static_cast<double>(exponent));
}

namespace detail {

struct BruteForceSearch {
  const Instance& inst;
  std::vector<double> budget_cap;
  std::vector<double> suffix_best;  // suffix_best[t] = sum_{s>=t} max_x f_s(x)
  std::vector<std::size_t> path;
  std::vector<std::size_t> best_path;
  double best = -1.0;
  std::vector<double> g_sum;
  std::vector<double> h_sum;

  explicit BruteForceSearch(const Instance& in) : inst(in) {
    const std::size_t T = inst.horizon();
    for (std::size_t j = 0; j < inst.num_resources; ++j)
      budget_cap.push_back(inst.beta[j] * static_cast<double>(T));
    suffix_best.assign(T + 1, 0.0);
    for (std::size_t t = T; t-- > 0;) {
      const auto& f = inst.rounds[t].rewards;
      suffix_best[t] = suffix_best[t + 1] + *std::max_element(f.begin(), f.end());
    }
    path.assign(T, 0);
    g_sum.assign(inst.num_general, 0.0);
    h_sum.assign(inst.num_resources, 0.0);
  }

  void search(std::size_t t, double value) {
    const std::size_t T = inst.horizon();
    if (t == T) {
      for (double g : g_sum)
        if (!(g <= 0.0)) return;
      if (value > best) {
        best = value;
        best_path = path;
      }
      return;
    }
    // Completions can at most add suffix_best[t]; the margin keeps rounding in
    // the incremental sums from pruning a strictly better sequence.
    if (value + suffix_best[t] < best - 1e-9) return;

    const auto& in = inst.rounds[t];
    for (std::size_t x = 0; x < inst.num_actions; ++x) {
      bool over = false;
      for (std::size_t j = 0; j < inst.num_resources; ++j)
        if (!(h_sum[j] + in.consumptions(j, x) <= budget_cap[j])) over = true;
      if (over) continue;  // consumption never decreases

      const auto g_saved = g_sum;
      const auto h_saved = h_sum;
      for (std::size_t i = 0; i < inst.num_general; ++i) g_sum[i] += in.general_costs(i, x);
      for (std::size_t j = 0; j < inst.num_resources; ++j) h_sum[j] += in.consumptions(j, x);
      path[t] = x;
      search(t + 1, value + in.rewards[x]);
      g_sum = g_saved;
      h_sum = h_saved;
    }
  }
};

}  // namespace detail

/// Exact OPT by depth-first enumeration of all K^T action sequences in
/// lexicographic order; returns the lexicographically smallest maximizer.
inline OracleReport opt_bruteforce(const Instance& inst, double guard = kDefaultSearchGuard) {
  if (search_size(inst.num_actions, inst.horizon()) > guard)
    throw SizeGuardError("instance too large for brute force: K^T = " +
                         std::to_string(inst.num_actions) + "^" +
                         std::to_string(inst.horizon()) + " exceeds guard");
  detail::BruteForceSearch s(inst);
  s.search(0, 0.0);
  OracleReport rep;
  rep.method = OracleMethod::brute_force;
  rep.opt_value = s.best;
  rep.opt_actions = s.best_path;
  return rep;
}

/// Upper bound on OPT from per-round action distributions. Rounds with
/// bitwise-identical tuples are merged into one block whose action masses sum
/// to the block size, which leaves the optimal value unchanged.
inline OracleReport opt_lp_relax(const Instance& inst, const SimplexOptions& opt = {}) {
  const std::size_t K = inst.num_actions;
  const std::size_t m = inst.num_general;
  const std::size_t n = inst.num_resources;
  const std::size_t T = inst.horizon();

  std::map<std::vector<double>, std::size_t> index;
  std::vector<std::size_t> block_of_first;  // representative round per block
  std::vector<double> block_count;
  for (std::size_t t = 0; t < T; ++t) {
    const auto& in = inst.rounds[t];
    std::vector<double> key = in.rewards;
    key.insert(key.end(), in.general_costs.data().begin(), in.general_costs.data().end());
    key.insert(key.end(), in.consumptions.data().begin(), in.consumptions.data().end());
    auto [it, inserted] = index.emplace(std::move(key), block_count.size());
    if (inserted) {
      block_of_first.push_back(t);
      block_count.push_back(0.0);
    }
    block_count[it->second] += 1.0;
  }

  struct Var {
    std::size_t block;
    std::size_t action;
  };
  std::vector<Var> vars;
  for (std::size_t b = 0; b < block_count.size(); ++b)
    for (std::size_t x = 0; x < K; ++x)
      if (x != inst.void_index) vars.push_back({b, x});

  const std::size_t blocks = block_count.size();
  Matrix A(blocks + m + n, vars.size());
  std::vector<double> rhs(blocks + m + n, 0.0);
  std::vector<double> c(vars.size());
  for (std::size_t b = 0; b < blocks; ++b) rhs[b] = block_count[b];
  for (std::size_t j = 0; j < n; ++j) rhs[blocks + m + j] = inst.beta[j] * static_cast<double>(T);
  for (std::size_t v = 0; v < vars.size(); ++v) {
    const auto& in = inst.rounds[block_of_first[vars[v].block]];
    const std::size_t x = vars[v].action;
    c[v] = in.rewards[x];
    A(vars[v].block, v) = 1.0;
    for (std::size_t i = 0; i < m; ++i) A(blocks + i, v) = in.general_costs(i, x);
    for (std::size_t j = 0; j < n; ++j) A(blocks + m + j, v) = in.consumptions(j, x);
  }

  const auto lp = solve_lp_max(A, rhs, c, opt);
  if (lp.status != LpResult::Status::optimal)
    throw std::runtime_error("LP relaxation did not converge after " +
                             std::to_string(lp.iterations) + " iterations");
  OracleReport rep;
  rep.method = OracleMethod::lp_relaxation;
  rep.opt_value = lp.value;
  rep.iterations = lp.iterations;
  return rep;
}

struct StocEstimateOptions {
  double guard = kDefaultSearchGuard;
  bool allow_lp_fallback = false;
};

/// Seed for the i-th Monte Carlo draw; independent of how many draws follow.
inline Seed sample_seed(Seed base, std::size_t i) {
  return {counter_hash(base.value, 0xA5A5A5A5ULL, i)};
}

inline OracleReport opt_stoc_estimate(const StochasticModel& model, std::size_t T,
                                      std::size_t num_samples, Seed seed,
                                      const StocEstimateOptions& options = {}) {
  if (num_samples < 1) throw ValidationError("num_samples must be positive");
  const bool exact = search_size(model.num_actions, T) <= options.guard;
  if (!exact && !options.allow_lp_fallback)
    throw SizeGuardError("sampled instances too large for brute force and LP fallback disabled");

  std::vector<double> values;
  values.reserve(num_samples);
  for (std::size_t i = 0; i < num_samples; ++i) {
    const auto inst = sample_sequence(model, T, sample_seed(seed, i));
    values.push_back(exact ? opt_bruteforce(inst, options.guard).opt_value
                           : opt_lp_relax(inst).opt_value);
  }
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(num_samples);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = num_samples > 1 ? std::sqrt(ss / static_cast<double>(num_samples - 1)) : 0.0;

  OracleReport rep;
  rep.method = exact ? OracleMethod::monte_carlo : OracleMethod::monte_carlo_lp;
  rep.opt_value = mean;
  rep.stderr_value = sd / std::sqrt(static_cast<double>(num_samples));
  return rep;
}

/// Exact E[OPT] by enumerating all S^T support sequences with their weights.
inline OracleReport opt_stoc_exact(const StochasticModel& model, std::size_t T,
                                   double guard = kDefaultSearchGuard) {
  model.validate();
  const std::size_t S = model.support.size();
  if (search_size(S, T) * search_size(model.num_actions, T) > guard)
    throw SizeGuardError("exact expectation too large to enumerate");
  Instance inst{model.num_actions, model.num_general, model.num_resources, model.void_index,
                model.beta, std::vector<InputTuple>(T, model.support.front())};
  std::vector<std::size_t> digits(T, 0);
  double expectation = 0.0;
  while (true) {
    double w = 1.0;
    for (std::size_t t = 0; t < T; ++t) {
      inst.rounds[t] = model.support[digits[t]];
      w *= model.probs[digits[t]];
    }
    if (w > 0.0) expectation += w * opt_bruteforce(inst, guard).opt_value;
    std::size_t t = 0;
    while (t < T && ++digits[t] == S) digits[t++] = 0;
    if (t == T) break;
  }
  OracleReport rep;
  rep.method = OracleMethod::enumeration;
  rep.opt_value = expectation;
  rep.stderr_value = 0.0;
  return rep;
}

/// Worst unified entry of one column.
inline double column_max(const UnifiedConstraints& u, std::size_t x) {
  double w = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.num_constraints(); ++i) w = std::max(w, u.matrix(i, x));
  return w;
}

/// Per-round most feasible action: argmin_x max_i g~_{t,i}(x), lowest index on ties.
inline std::vector<std::size_t> slater_adv_witness(const Instance& inst) {
  std::vector<std::size_t> out;
  const auto budget = inst.budget();
  for (const auto& in : inst.rounds) {
    const auto u = unify_constraints(in, budget);
    std::size_t arg = 0;
    double best = column_max(u, 0);
    for (std::size_t x = 1; x < inst.num_actions; ++x) {
      const double v = column_max(u, x);
      if (v < best) {
        best = v;
        arg = x;
      }
    }
    out.push_back(arg);
  }
  return out;
}

/// rho_adv = -max_t min_x max_i g~_{t,i}(x). The min over sequences of a max
/// over rounds separates per round. +inf when there are no constraints.
inline double slater_adv(const Instance& inst) {
  if (inst.num_constraints() == 0) return std::numeric_limits<double>::infinity();
  const auto budget = inst.budget();
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& in : inst.rounds) {
    const auto u = unify_constraints(in, budget);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t x = 0; x < inst.num_actions; ++x) best = std::min(best, column_max(u, x));
    worst = std::max(worst, best);
  }
  return -worst;
}

/// The same quantity by enumerating every action sequence.
inline double slater_adv_bruteforce(const Instance& inst, double guard = kDefaultSearchGuard) {
  if (inst.num_constraints() == 0) return std::numeric_limits<double>::infinity();
  const std::size_t T = inst.horizon();
  if (search_size(inst.num_actions, T) > guard)
    throw SizeGuardError("instance too large for sequence enumeration");
  const auto budget = inst.budget();
  std::vector<UnifiedConstraints> cols;
  for (const auto& in : inst.rounds) cols.push_back(unify_constraints(in, budget));

  std::vector<std::size_t> seq(T, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t i = 0; i < inst.num_constraints(); ++i)
        worst = std::max(worst, cols[t].matrix(i, seq[t]));
    best = std::min(best, worst);
    std::size_t t = 0;
    while (t < T && ++seq[t] == inst.num_actions) seq[t++] = 0;
    if (t == T) break;
  }
  return -best;
}

/// rho_stoc = -min over deterministic policies pi: support -> actions of
/// max_i E[g~_i(pi(gamma))], by enumerating all K^S policies.
inline double slater_stoc(const StochasticModel& model, double guard = kDefaultSearchGuard) {
  model.validate();
  const std::size_t M = model.num_constraints();
  if (M == 0) return std::numeric_limits<double>::infinity();
  const std::size_t S = model.support.size();
  const std::size_t K = model.num_actions;
  if (search_size(K, S) > guard) throw SizeGuardError("policy space too large to enumerate");

  const BudgetSpec budget{S, model.beta};
  std::vector<UnifiedConstraints> cols;
  for (const auto& in : model.support) cols.push_back(unify_constraints(in, budget));

  std::vector<std::size_t> policy(S, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < M; ++i) {
      double e = 0.0;
      for (std::size_t s = 0; s < S; ++s) e += model.probs[s] * cols[s].matrix(i, policy[s]);
      worst = std::max(worst, e);
    }
    best = std::min(best, worst);
    std::size_t s = 0;
    while (s < S && ++policy[s] == K) policy[s++] = 0;
    if (s == S) break;
  }
  return -best;
}

inline double alpha(double rho_adv) {
  if (!(rho_adv >= 0.0)) throw std::domain_error("alpha requires rho_adv >= 0");
  if (std::isinf(rho_adv)) return 1.0;
  return rho_adv / (1.0 + rho_adv);
}

}  // namespace ora
