#pragma once

// Instantaneous Lagrangian f(x) - <lambda, g~(x)> and its exact maximizer
// over a finite action set.

#include <cstddef>
#include <utility>

#include "ora/core.hpp"

namespace ora {

/// Reward minus the dual-weighted unified column. The dot product is
/// accumulated in index order so repeated evaluation is bit-identical.
inline double lagrangian_value(const InputTuple& input, const UnifiedConstraints& unified,
                               std::size_t action, const DualVector& dual) {
  if (action >= input.num_actions()) throw ValidationError("action index out of range");
  if (dual.size() != unified.num_constraints())
    throw ValidationError("dual has " + std::to_string(dual.size()) +
                          " components, expected M=" +
                          std::to_string(unified.num_constraints()));
  double penalty = 0.0;
  for (std::size_t i = 0; i < dual.size(); ++i) penalty += dual[i] * unified.matrix(i, action);
  return input.rewards[action] - penalty;
}

struct BestResponse {
  std::size_t action = 0;
  double value = 0.0;
};

/// Enumerates all K actions; ties go to the lowest index. O(K*M).
inline BestResponse best_response(const InputTuple& input, const UnifiedConstraints& unified,
                                  const DualVector& dual) {
  BestResponse best{0, lagrangian_value(input, unified, 0, dual)};
  for (std::size_t x = 1; x < input.num_actions(); ++x) {
    const double v = lagrangian_value(input, unified, x, dual);
    if (v > best.value) best = {x, v};
  }
  return best;
}

}  // namespace ora
