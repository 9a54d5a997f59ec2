#pragma once

// Instance construction: finite-support i.i.d. models, the two-variant
// fixture contrasting budget and general constraints, and a seeded random
// generator with a guaranteed strictly-safe action in every round.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "ora/core.hpp"
#include "ora/rng.hpp"

namespace ora {

/// Finite-support distribution over input tuples sharing (K, m, n, void).
struct StochasticModel {
  std::size_t num_actions = 1;
  std::size_t num_general = 0;
  std::size_t num_resources = 0;
  std::size_t void_index = 0;
  std::vector<double> beta;
  std::vector<InputTuple> support;
  std::vector<double> probs;

  std::size_t num_constraints() const { return num_general + num_resources; }

  void validate() const {
    if (support.empty()) throw ValidationError("model support is empty");
    if (probs.size() != support.size())
      throw ValidationError("probs has " + std::to_string(probs.size()) +
                            " entries, support has " + std::to_string(support.size()));
    double total = 0.0;
    for (double p : probs) {
      if (!(p >= 0.0)) throw ValidationError("probabilities must be nonnegative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ValidationError("probabilities must sum to 1");
    for (std::size_t j = 0; j < beta.size(); ++j)
      if (!(beta[j] > 0.0)) throw ValidationError("beta must be positive");
    auto rep = validate_instance(support, {support.size(), std::vector<double>(beta.size(), 1.0)},
                                 {num_actions, void_index});
    for (std::size_t s = 0; s < support.size(); ++s)
      if (support[s].num_general() != num_general)
        rep.issues.push_back({s + 1, "shape", 0, 0, "support tuple m differs from header"});
    if (!rep.valid()) throw ValidationError("invalid support: " + rep.summary());
  }

  bool operator==(const StochasticModel&) const = default;
};

/// Draws T rounds i.i.d. Round t uses its own RNG stream t, and the support
/// index is the first s whose index-ordered cumulative probability exceeds a
/// 53-bit dyadic uniform.
inline Instance sample_sequence(const StochasticModel& model, std::size_t T, Seed seed) {
  model.validate();
  std::vector<double> cdf(model.probs.size());
  double acc = 0.0;
  for (std::size_t s = 0; s < cdf.size(); ++s) cdf[s] = acc += model.probs[s];
  std::size_t last_positive = 0;
  for (std::size_t s = 0; s < cdf.size(); ++s)
    if (model.probs[s] > 0.0) last_positive = s;

  Instance inst{model.num_actions, model.num_general, model.num_resources, model.void_index,
                model.beta, {}};
  inst.rounds.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    CounterRng rng(seed.value, t);
    const double u = rng.uniform();
    std::size_t pick = last_positive;
    for (std::size_t s = 0; s < cdf.size(); ++s)
      if (u < cdf[s] && model.probs[s] > 0.0) {
        pick = s;
        break;
      }
    inst.rounds.push_back(model.support[pick]);
  }
  return inst;
}

/// Repeats a single-point model's tuple T times.
inline Instance repeat_tuple(const StochasticModel& model, std::size_t T) {
  Instance inst{model.num_actions, model.num_general, model.num_resources, model.void_index,
                model.beta, std::vector<InputTuple>(T, model.support.front())};
  return inst;
}

struct Example1 {
  /// Actions {void, x_A}; f(x_A)=1, h(x_A)=[rho+eps, 0], beta=[rho, rho].
  StochasticModel budget_only;
  /// Actions {void, x_safe, x_B}; g(x_safe)=[-rho,-rho], g(x_B)=[rho+eps, -1].
  StochasticModel general;
};

inline constexpr std::size_t kExample1SafeAction = 1;
inline constexpr std::size_t kExample1ViolatingAction = 2;

inline Example1 make_example1_instance(double rho, double epsilon) {
  if (!(rho > 0.0 && rho < 1.0 / 6.0)) throw ValidationError("rho must lie in (0, 1/6)");
  if (!(epsilon > 0.0)) throw ValidationError("epsilon must be positive");
  if (!(3.0 * rho + epsilon < 1.0)) throw ValidationError("requires 3*rho + epsilon < 1");

  Example1 ex;
  {
    auto tup = zero_tuple(2, 0, 2);
    tup.rewards[1] = 1.0;
    tup.consumptions(0, 1) = rho + epsilon;
    ex.budget_only = {2, 0, 2, 0, {rho, rho}, {tup}, {1.0}};
  }
  {
    auto tup = zero_tuple(3, 2, 0);
    tup.rewards[kExample1SafeAction] = 1.0;
    tup.general_costs(0, kExample1SafeAction) = -rho;
    tup.general_costs(1, kExample1SafeAction) = -rho;
    tup.rewards[kExample1ViolatingAction] = 1.0;
    tup.general_costs(0, kExample1ViolatingAction) = rho + epsilon;
    tup.general_costs(1, kExample1ViolatingAction) = -1.0;
    ex.general = {3, 2, 0, 0, {}, {tup}, {1.0}};
  }
  return ex;
}

/// Random adversarial sequence. Action 0 is void. Every round one non-void
/// action (chosen at random) has all unified entries <= -margin; all other
/// entries are uniform in their ranges. beta_j is drawn in [margin, (1+margin)/2].
inline Instance random_instance(Seed seed, std::size_t T, std::size_t K, std::size_t m,
                                std::size_t n, double margin) {
  if (K < 2) throw ValidationError("random_instance requires K >= 2");
  if (!(margin > 0.0 && margin <= 0.5)) throw ValidationError("margin must lie in (0, 0.5]");
  if (T < 1) throw ValidationError("T must be positive");

  // Stream 0 holds instance-level draws; round t uses stream t+1.
  CounterRng head(seed.value, 0);
  Instance inst{K, m, n, 0, std::vector<double>(n), {}};
  for (auto& b : inst.beta) b = head.uniform(margin, 0.5 * (1.0 + margin));
  for (std::size_t j = 0; j < n; ++j)
    if (inst.beta[j] * static_cast<double>(T) < 1.0)
      throw ValidationError("horizon too short: beta*T < 1");

  inst.rounds.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    CounterRng rng(seed.value, t + 1);
    auto tup = zero_tuple(K, m, n);
    const std::size_t safe = 1 + static_cast<std::size_t>(rng.below(K - 1));
    for (std::size_t x = 1; x < K; ++x) {
      tup.rewards[x] = rng.uniform();
      for (std::size_t i = 0; i < m; ++i)
        tup.general_costs(i, x) =
            x == safe ? std::min(rng.uniform(-1.0, -margin), -margin) : rng.uniform(-1.0, 1.0);
      for (std::size_t j = 0; j < n; ++j) {
        if (x != safe) {
          tup.consumptions(j, x) = rng.uniform();
          continue;
        }
        double h = rng.uniform(0.0, inst.beta[j] - margin);
        // rounding in beta - margin must not erode the guaranteed slack
        while (h > 0.0 && h - inst.beta[j] > -margin) h = std::nextafter(h, 0.0);
        tup.consumptions(j, x) = h;
      }
    }
    inst.rounds.push_back(std::move(tup));
  }
  return inst;
}

/// Default reward gap between the greedy and the safe action in pacing_model.
inline constexpr double kPacingDefaultGap = 1e-3;

/// Two-point i.i.d. model with one budget and one general constraint.
/// Action 1 is reward-greedy and overspends both constraints; action 2 gives
/// up `gap` reward for slack 0.3 on every row. Using action 2 throughout
/// certifies rho_stoc >= 0.3.
inline StochasticModel pacing_model(double gap = kPacingDefaultGap) {
  if (!(gap > 0.0 && gap < 0.5)) throw ValidationError("gap must lie in (0, 0.5)");
  auto a = zero_tuple(3, 1, 1);
  a.rewards = {0.0, 1.0, 1.0 - gap};
  a.general_costs(0, 1) = 0.3;
  a.general_costs(0, 2) = -0.3;
  a.consumptions(0, 1) = 0.8;
  a.consumptions(0, 2) = 0.2;
  auto b = zero_tuple(3, 1, 1);
  b.rewards = {0.0, 0.9, 0.9 - gap};
  b.general_costs(0, 1) = 0.4;
  b.general_costs(0, 2) = -0.3;
  b.consumptions(0, 1) = 0.7;
  b.consumptions(0, 2) = 0.1;
  return {3, 1, 1, 0, {0.5}, {a, b}, {0.5, 0.5}};
}

}  // namespace ora
