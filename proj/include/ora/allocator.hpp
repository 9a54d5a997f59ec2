#pragma once

// Dual gradient descent allocator: per-round best response on the
// Lagrangian, a hard budget gate that falls back to the void action, and a
// projected dual update driven by the action actually played.

#include <cstddef>
#include <utility>
#include <vector>

#include "ora/core.hpp"
#include "ora/dual_ogd.hpp"
#include "ora/lagrangian.hpp"

namespace ora {

struct AllocatorState {
  std::size_t round = 1;  // next round to play, 1-based
  DualVector dual;
  std::vector<double> cumulative_consumption;
  bool gate_forced_closed = false;

  static AllocatorState initial(std::size_t M, std::size_t n) {
    return {1, DualVector(M), std::vector<double>(n, 0.0), false};
  }
};

/// Open iff sum_{s<t} h_{s,j}(x_s) <= beta_j T - 1 for every resource j.
inline bool gate_open(const AllocatorState& state, const BudgetSpec& budget) {
  for (std::size_t j = 0; j < budget.num_resources(); ++j)
    if (!(state.cumulative_consumption[j] <= budget.total(j) - 1.0)) return false;
  return true;
}

struct StepResult {
  RoundRecord record;
  AllocatorState next;
};

inline StepResult step(const AllocatorState& state, const InputTuple& input,
                       const BudgetSpec& budget, const OgdConfig& config,
                       std::size_t void_index) {
  if (state.round < 1 || state.round > budget.horizon)
    throw ValidationError("round " + std::to_string(state.round) + " outside [1, T]");
  const auto unified = unify_constraints(input, budget);
  if (state.dual.size() != unified.num_constraints())
    throw ValidationError("state dual has wrong dimension");
  if (void_index >= input.num_actions()) throw ValidationError("void_index out of range");

  const auto candidate = best_response(input, unified, state.dual);
  // The closed flag is monotone: consumption never decreases, so once the
  // inequality fails it fails forever; the flag just records that.
  const bool open = !state.gate_forced_closed && gate_open(state, budget);
  const std::size_t action = open ? candidate.action : void_index;

  const std::size_t M = unified.num_constraints();
  std::vector<double> column(M);
  for (std::size_t i = 0; i < M; ++i) column[i] = unified.matrix(i, action);

  AllocatorState next;
  next.round = state.round + 1;
  next.dual = ogd_step(state.dual, column, config.eta);
  next.cumulative_consumption = state.cumulative_consumption;
  for (std::size_t j = 0; j < input.num_resources(); ++j)
    next.cumulative_consumption[j] += input.consumptions(j, action);
  next.gate_forced_closed = !open;

  RoundRecord rec;
  rec.round = state.round;
  rec.action = action;
  rec.candidate_action = candidate.action;
  rec.reward = input.rewards[action];
  rec.unified_values = std::move(column);
  rec.dual_before = state.dual;
  rec.gate_open = open;
  rec.cumulative_consumption = next.cumulative_consumption;
  return {std::move(rec), std::move(next)};
}

/// Last round with the gate open; 0 if it never opened.
inline std::size_t stopping_time(const Trajectory& traj) {
  for (std::size_t t = traj.records.size(); t > 0; --t)
    if (traj.records[t - 1].gate_open) return t;
  return 0;
}

inline Trajectory run(const std::vector<InputTuple>& sequence, const BudgetSpec& budget,
                      const OgdConfig& config, std::size_t void_index = 0) {
  config.validate();
  const ActionSet actions{sequence.empty() ? 1 : sequence.front().num_actions(), void_index};
  const auto report = validate_instance(sequence, budget, actions);
  if (!report.valid()) throw ValidationError("invalid instance: " + report.summary());

  const std::size_t m = sequence.front().num_general();
  const std::size_t n = budget.num_resources();
  auto state = AllocatorState::initial(m + n, n);

  Trajectory traj;
  traj.records.reserve(sequence.size());
  for (const auto& input : sequence) {
    auto res = step(state, input, budget, config, void_index);
    traj.records.push_back(std::move(res.record));
    state = std::move(res.next);
  }
  traj.final_dual = std::move(state.dual);
  traj.stopping_time = stopping_time(traj);
  return traj;
}

inline Trajectory run(const Instance& inst, const OgdConfig& config) {
  const auto report = validate_instance(inst);
  if (!report.valid()) throw ValidationError("invalid instance: " + report.summary());
  return run(inst.rounds, inst.budget(), config, inst.void_index);
}

}  // namespace ora
