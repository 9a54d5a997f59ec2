#pragma once

// Deterministic checks over a finished trajectory. Each audit recomputes its
// quantities from the raw per-round records.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ora/allocator.hpp"
#include "ora/core.hpp"
#include "ora/dual_ogd.hpp"
#include "ora/lagrangian.hpp"
#include "ora/rng.hpp"

namespace ora {

enum class AuditStatus { pass, fail, not_applicable };

inline std::string to_string(AuditStatus s) {
  switch (s) {
    case AuditStatus::pass: return "pass";
    case AuditStatus::fail: return "fail";
    case AuditStatus::not_applicable: return "not_applicable";
  }
  return "unknown";
}

struct AuditOutcome {
  AuditOutcome() = default;
  explicit AuditOutcome(std::string n) : name(std::move(n)) {}

  std::string name;
  AuditStatus status = AuditStatus::pass;
  std::size_t checked = 0;
  std::size_t failures = 0;
  std::optional<std::size_t> first_failure_round;
  double worst = 0.0;  // audit-specific extreme value (drift, gap, ...)

  void fail_at(std::size_t round) {
    ++failures;
    if (!first_failure_round) first_failure_round = round;
  }
  AuditOutcome& finish() {
    if (status != AuditStatus::not_applicable)
      status = failures ? AuditStatus::fail : AuditStatus::pass;
    return *this;
  }
};

/// lambda_{t+1} recomputed from (lambda_t, g~_t, eta) must match bit for bit.
inline AuditOutcome audit_update_exactness(const Trajectory& traj, double eta) {
  AuditOutcome out{"update_exactness"};
  const std::size_t T = traj.records.size();
  for (std::size_t t = 1; t <= T; ++t) {
    const auto& rec = traj.records[t - 1];
    DualVector next(rec.dual_before.size());
    for (std::size_t i = 0; i < next.size(); ++i)
      next.values[i] = std::max(0.0, rec.dual_before[i] + eta * rec.unified_values[i]);
    ++out.checked;
    if (next.values != dual_at(traj, t + 1).values) out.fail_at(t + 1);
  }
  return out.finish();
}

inline AuditOutcome audit_nonnegativity(const Trajectory& traj) {
  AuditOutcome out{"nonnegativity"};
  for (std::size_t t = 1; t <= traj.records.size() + 1; ++t) {
    ++out.checked;
    for (double v : dual_at(traj, t).values)
      if (!(v >= 0.0)) {
        out.fail_at(t);
        break;
      }
  }
  return out.finish();
}

/// Per-step l1 drift must not exceed eta * M (+1e-12).
inline AuditOutcome audit_drift(const Trajectory& traj, double eta) {
  AuditOutcome out{"dual_drift"};
  const double M = static_cast<double>(traj.final_dual.size());
  const double limit = eta * M + 1e-12;
  for (std::size_t t = 1; t <= traj.records.size(); ++t) {
    const double d = std::abs(dual_at(traj, t + 1).l1() - dual_at(traj, t).l1());
    out.worst = std::max(out.worst, d);
    ++out.checked;
    if (!(d <= limit)) out.fail_at(t);
  }
  return out.finish();
}

/// Random (comparator, interval) pairs drawn from stream `seed`.
inline std::vector<IntervalRegretResult> sample_interval_regret(const Trajectory& traj, double eta,
                                                                std::size_t pairs,
                                                                std::uint64_t seed) {
  std::vector<IntervalRegretResult> out;
  const std::size_t T = traj.records.size();
  const std::size_t M = traj.final_dual.size();
  if (T == 0) return out;
  double scale = 1.0;
  for (const auto& r : traj.records) scale = std::max(scale, 2.0 * r.dual_before.l1());
  CounterRng rng(seed, 0x1A7E5ULL);
  for (std::size_t k = 0; k < pairs; ++k) {
    const std::size_t t1 = 1 + static_cast<std::size_t>(rng.below(T));
    const std::size_t t2 = t1 + static_cast<std::size_t>(rng.below(T - t1 + 1));
    DualVector mu(M);
    const bool near_start = rng.below(2) == 0;
    for (std::size_t i = 0; i < M; ++i) {
      const double base = near_start ? traj.records[t1 - 1].dual_before[i] : 0.0;
      mu.values[i] = std::max(0.0, base + rng.uniform(near_start ? -0.1 : 0.0, scale));
    }
    out.push_back(interval_regret_audit(traj, mu, t1, t2, eta));
  }
  return out;
}

inline AuditOutcome audit_interval_regret(const Trajectory& traj, double eta, std::size_t pairs,
                                          std::uint64_t seed) {
  AuditOutcome out{"interval_regret"};
  if (traj.final_dual.size() == 0) {
    out.status = AuditStatus::not_applicable;
    return out.finish();
  }
  for (const auto& r : sample_interval_regret(traj, eta, pairs, seed)) {
    ++out.checked;
    out.worst = std::min(out.worst, r.lhs - r.rhs);
    if (!r.holds) out.fail_at(r.t1);
  }
  return out.finish();
}

/// sum_{t<=tau} g_{t,i}(x_t) <= lambda_{tau+1,i} / eta for every general row.
inline AuditOutcome audit_telescoping(const Trajectory& traj, std::size_t num_general,
                                      double eta) {
  AuditOutcome out{"telescoped_violation"};
  if (num_general == 0) {
    out.status = AuditStatus::not_applicable;
    return out.finish();
  }
  const std::size_t tau = stopping_time(traj);
  const auto& lam = dual_at(traj, tau + 1);
  for (std::size_t i = 0; i < num_general; ++i) {
    double sum = 0.0;
    for (std::size_t t = 0; t < tau; ++t) sum += traj.records[t].unified_values[i];
    const double gap = sum - lam[i] / eta;
    out.worst = std::max(out.worst, gap);
    ++out.checked;
    if (!(gap <= kAuditSlack)) out.fail_at(tau);
  }
  return out.finish();
}

/// Cumulative consumption is nondecreasing and never exceeds beta_j T.
/// With an instance, consumption is recomputed from the played actions.
inline AuditOutcome audit_budget(const Trajectory& traj, const std::vector<double>& beta,
                                 const Instance* inst = nullptr) {
  AuditOutcome out{"budget_feasibility"};
  const std::size_t n = beta.size();
  if (n == 0) {
    out.status = AuditStatus::not_applicable;
    return out.finish();
  }
  const double T = static_cast<double>(traj.records.size());
  std::vector<double> prev(n, 0.0);
  std::vector<double> recomputed(n, 0.0);
  for (std::size_t t = 0; t < traj.records.size(); ++t) {
    const auto& r = traj.records[t];
    ++out.checked;
    bool bad = r.cumulative_consumption.size() != n;
    for (std::size_t j = 0; !bad && j < n; ++j) {
      if (r.cumulative_consumption[j] < prev[j]) bad = true;
      if (!(r.cumulative_consumption[j] <= beta[j] * T)) bad = true;
      if (inst) {
        recomputed[j] += inst->rounds[t].consumptions(j, r.action);
        if (recomputed[j] != r.cumulative_consumption[j]) bad = true;
        if (!(recomputed[j] <= beta[j] * T)) bad = true;
      }
    }
    if (bad) out.fail_at(t + 1);
    else prev = r.cumulative_consumption;
  }
  return out.finish();
}

/// Gate closed => void; after tau only void and nonincreasing multipliers.
inline AuditOutcome audit_gate(const Trajectory& traj, std::size_t void_index) {
  AuditOutcome out{"gate_and_post_tau"};
  const std::size_t tau = stopping_time(traj);
  if (traj.stopping_time != tau) out.fail_at(tau);
  bool closed = false;
  for (std::size_t t = 1; t <= traj.records.size(); ++t) {
    const auto& r = traj.records[t - 1];
    ++out.checked;
    bool bad = false;
    if (!r.gate_open && r.action != void_index) bad = true;
    if (closed && r.gate_open) bad = true;  // gate never reopens
    closed = closed || !r.gate_open;
    if (t > tau) {
      if (r.action != void_index) bad = true;
      const auto& next = dual_at(traj, t + 1);
      for (std::size_t i = 0; i < next.size(); ++i)
        if (next[i] > r.dual_before[i]) bad = true;
    }
    if (bad) out.fail_at(t);
  }
  return out.finish();
}

/// Candidate maximizes the Lagrangian exactly, and the recorded unified
/// column matches the played action in the instance.
inline AuditOutcome audit_dominance(const Trajectory& traj, const Instance& inst) {
  AuditOutcome out{"best_response_dominance"};
  const auto budget = inst.budget();
  for (std::size_t t = 0; t < traj.records.size(); ++t) {
    const auto& r = traj.records[t];
    const auto& in = inst.rounds[t];
    const auto u = unify_constraints(in, budget);
    ++out.checked;
    bool bad = r.candidate_action >= inst.num_actions || r.action >= inst.num_actions;
    if (!bad) {
      const double best = lagrangian_value(in, u, r.candidate_action, r.dual_before);
      for (std::size_t x = 0; x < inst.num_actions; ++x)
        if (lagrangian_value(in, u, x, r.dual_before) > best) bad = true;
      for (std::size_t i = 0; i < u.num_constraints(); ++i)
        if (u.matrix(i, r.action) != r.unified_values[i]) bad = true;
      if (in.rewards[r.action] != r.reward) bad = true;
    }
    if (bad) out.fail_at(t + 1);
  }
  return out.finish();
}

struct AuditOptions {
  std::size_t interval_pairs = 100;
  std::uint64_t interval_seed = 0;
};

inline std::vector<AuditOutcome> audit_all(const Trajectory& traj, std::size_t num_general,
                                           const std::vector<double>& beta, std::size_t void_index,
                                           double eta, const Instance* inst,
                                           const AuditOptions& opt = {}) {
  std::vector<AuditOutcome> out;
  out.push_back(audit_update_exactness(traj, eta));
  out.push_back(audit_nonnegativity(traj));
  out.push_back(audit_drift(traj, eta));
  out.push_back(audit_interval_regret(traj, eta, opt.interval_pairs, opt.interval_seed));
  out.push_back(audit_telescoping(traj, num_general, eta));
  out.push_back(audit_budget(traj, beta, inst));
  out.push_back(audit_gate(traj, void_index));
  if (inst) {
    out.push_back(audit_dominance(traj, *inst));
  } else {
    AuditOutcome d{"best_response_dominance"};
    d.status = AuditStatus::not_applicable;
    out.push_back(d);
  }
  return out;
}

}  // namespace ora
