#pragma once

// Projected online gradient ascent on the multipliers, the closed-form
// learning-rate schedule, and read-only audits over recorded trajectories.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "ora/core.hpp"

namespace ora {

/// Absolute slack used by every audit inequality.
inline constexpr double kAuditSlack = 1e-9;

struct OgdConfig {
  double eta = 0.0;
  double delta = 0.05;

  void validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw ValidationError("eta must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0,1)");
  }
};

/// eta = 1 / (60 M sqrt(2 T ln(T^2 / delta))).
inline double learning_rate(std::size_t T, std::size_t M, double delta) {
  if (T < 2) throw std::domain_error("learning_rate requires T >= 2");
  if (M < 1) throw std::domain_error("learning_rate requires M >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("delta must lie in (0,1)");
  const double Td = static_cast<double>(T);
  const double log_term = std::log(Td * Td / delta);
  if (!(log_term > 0.0)) throw std::domain_error("ln(T^2/delta) must be positive");
  return 1.0 / (60.0 * static_cast<double>(M) * std::sqrt(2.0 * Td * log_term));
}

inline DualVector ogd_step(const DualVector& dual, std::span<const double> gradient, double eta) {
  if (gradient.size() != dual.size())
    throw ValidationError("gradient has " + std::to_string(gradient.size()) +
                          " components, dual has " + std::to_string(dual.size()));
  DualVector next(dual.size());
  for (std::size_t i = 0; i < dual.size(); ++i)
    next.values[i] = std::max(0.0, dual[i] + eta * gradient[i]);
  return next;
}

/// lambda_t for t in [1, T+1] (1-based).
inline const DualVector& dual_at(const Trajectory& traj, std::size_t t) {
  return t <= traj.records.size() ? traj.records[t - 1].dual_before : traj.final_dual;
}

struct IntervalRegretResult {
  std::size_t t1 = 0;
  std::size_t t2 = 0;
  std::vector<double> mu;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

/// Checks, on [t1, t2]:
///   sum <lambda_t, g~_t> >= sum <mu, g~_t> - |lambda_t1 - mu|^2 / (2 eta) - (eta/2) T M
/// where g~_t is the unified column of the action actually played.
inline IntervalRegretResult interval_regret_audit(const Trajectory& traj,
                                                  const DualVector& comparator, std::size_t t1,
                                                  std::size_t t2, double eta) {
  const std::size_t T = traj.records.size();
  if (t1 < 1 || t1 > t2 || t2 > T)
    throw ValidationError("invalid interval [" + std::to_string(t1) + ", " +
                          std::to_string(t2) + "] for T=" + std::to_string(T));
  const std::size_t M = traj.final_dual.size();
  if (comparator.size() != M) throw ValidationError("comparator has wrong dimension");
  for (double v : comparator.values)
    if (!(v >= 0.0)) throw ValidationError("comparator must be nonnegative");

  double lhs = 0.0;
  double lin = 0.0;
  for (std::size_t t = t1; t <= t2; ++t) {
    const auto& rec = traj.records[t - 1];
    for (std::size_t i = 0; i < M; ++i) {
      lhs += rec.dual_before[i] * rec.unified_values[i];
      lin += comparator[i] * rec.unified_values[i];
    }
  }
  double dist2 = 0.0;
  const auto& start = traj.records[t1 - 1].dual_before;
  for (std::size_t i = 0; i < M; ++i) {
    const double d = start[i] - comparator[i];
    dist2 += d * d;
  }
  const double rhs = lin - dist2 / (2.0 * eta) -
                     0.5 * eta * static_cast<double>(T) * static_cast<double>(M);
  return {t1, t2, comparator.values, lhs, rhs, lhs >= rhs - kAuditSlack};
}

/// max_t | |lambda_{t+1}|_1 - |lambda_t|_1 | over the whole run.
inline double dual_drift_audit(const Trajectory& traj, double /*eta*/) {
  double worst = 0.0;
  const std::size_t T = traj.records.size();
  for (std::size_t t = 1; t <= T; ++t) {
    const double d = std::abs(dual_at(traj, t + 1).l1() - dual_at(traj, t).l1());
    worst = std::max(worst, d);
  }
  return worst;
}

}  // namespace ora
