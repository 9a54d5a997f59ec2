#pragma once

// Performance functionals over finished trajectories and the closed-form
// guarantees they are checked against.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>

#include "ora/core.hpp"

namespace ora {

inline double total_reward(const Trajectory& traj) {
  double s = 0.0;
  for (const auto& r : traj.records) s += r.reward;
  return s;
}

struct ViolationResult {
  double value = 0.0;  // signed max_i sum_t g_{t,i}(x_t)
  bool applicable = true;
  double clamped() const { return std::max(0.0, value); }
};

/// V_T over the general rows. Unified rows 0..m-1 are the raw costs.
inline ViolationResult violation(const Trajectory& traj, std::size_t num_general) {
  if (num_general == 0) return {0.0, false};
  std::vector<double> sums(num_general, 0.0);
  for (const auto& r : traj.records)
    for (std::size_t i = 0; i < num_general; ++i) sums[i] += r.unified_values[i];
  return {*std::max_element(sums.begin(), sums.end()), true};
}

inline double regret(double opt_stoc_value, const Trajectory& traj) {
  return opt_stoc_value - total_reward(traj);
}

inline double alpha_regret(double alpha_value, double opt_adv_value, const Trajectory& traj) {
  if (!(alpha_value >= 0.0 && alpha_value <= 1.0))
    throw std::domain_error("alpha must lie in [0,1]");
  return alpha_value * opt_adv_value - total_reward(traj);
}

inline double max_dual_l1(const Trajectory& traj) {
  double w = traj.final_dual.l1();
  for (const auto& r : traj.records) w = std::max(w, r.dual_before.l1());
  return w;
}

struct TheoremBounds {
  double violation = 0.0;  // 840 M^2/rho sqrt(2T ln(T^2/delta))
  double regret = 0.0;     // shared right-hand side of the regret and alpha-regret bounds
  double dual_l1 = 0.0;    // 14 M / rho
};

inline double violation_bound(std::size_t T, std::size_t M, double rho, double delta) {
  if (!(rho > 0.0)) throw std::domain_error("violation bound requires rho > 0");
  if (T < 2) throw std::domain_error("bounds require T >= 2");
  const double Td = static_cast<double>(T);
  const double Md = static_cast<double>(M);
  return 840.0 * Md * Md / rho * std::sqrt(2.0 * Td * std::log(Td * Td / delta));
}

inline double regret_bound(std::size_t T, std::size_t M, double delta, double beta_min) {
  if (!(beta_min > 0.0)) throw std::domain_error("regret bound requires beta_min > 0");
  if (T < 2) throw std::domain_error("bounds require T >= 2");
  const double Td = static_cast<double>(T);
  const double log_term = std::log(Td * Td / delta);
  return 1.0 / beta_min +
         60.0 * static_cast<double>(M) * std::sqrt(2.0 * Td * log_term) /
             (2.0 * beta_min * beta_min) +
         std::sqrt(Td) / (120.0 * std::sqrt(2.0 * log_term));
}

inline double dual_bound(std::size_t M, double rho) {
  if (!(rho > 0.0)) throw std::domain_error("dual bound requires rho > 0");
  return 14.0 * static_cast<double>(M) / rho;
}

inline TheoremBounds theorem_bounds(std::size_t T, std::size_t M, double rho, double delta,
                                    double beta_min) {
  return {violation_bound(T, M, rho, delta), regret_bound(T, M, delta, beta_min),
          dual_bound(M, rho)};
}

struct BoundCheck {
  double value = 0.0;
  bool satisfied = false;
};

struct RunSummary {
  double total_reward = 0.0;
  double violation = 0.0;  // signed
  double violation_clamped = 0.0;
  bool violation_applicable = true;
  std::optional<double> regret;
  std::optional<double> alpha_regret;
  std::size_t tau = 0;
  double max_dual_l1 = 0.0;
  std::map<std::string, BoundCheck> bound_report;
};

/// Audit-side inputs; the allocator never sees these.
struct AuditInputs {
  std::optional<double> rho;
  std::optional<double> opt_stoc;
  std::optional<double> opt_adv;
  std::optional<double> alpha;
};

inline RunSummary summarize(const Trajectory& traj, std::size_t num_general,
                            const BudgetSpec& budget, double delta, const AuditInputs& audit) {
  RunSummary s;
  s.total_reward = total_reward(traj);
  const auto v = violation(traj, num_general);
  s.violation = v.value;
  s.violation_clamped = v.clamped();
  s.violation_applicable = v.applicable;
  s.tau = traj.stopping_time;
  s.max_dual_l1 = max_dual_l1(traj);
  if (audit.opt_stoc) s.regret = regret(*audit.opt_stoc, traj);
  if (audit.opt_adv && audit.alpha) s.alpha_regret = alpha_regret(*audit.alpha, *audit.opt_adv, traj);

  const std::size_t T = traj.records.size();
  const std::size_t M = traj.final_dual.size();
  if (T >= 2 && M >= 1 && audit.rho && *audit.rho > 0.0 && std::isfinite(*audit.rho)) {
    const double vb = violation_bound(T, M, *audit.rho, delta);
    s.bound_report["violation"] = {vb, s.violation <= vb};
    const double db = dual_bound(M, *audit.rho);
    s.bound_report["dual_l1"] = {db, s.max_dual_l1 <= db};
  }
  if (T >= 2 && M >= 1 && budget.num_resources() > 0) {
    const double rb = regret_bound(T, M, delta, budget.min_beta());
    if (s.regret) s.bound_report["regret"] = {rb, *s.regret <= rb};
    if (s.alpha_regret) s.bound_report["alpha_regret"] = {rb, *s.alpha_regret <= rb};
  }
  return s;
}

}  // namespace ora
