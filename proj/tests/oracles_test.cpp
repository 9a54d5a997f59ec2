#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ora/environments.hpp"
#include "ora/oracles.hpp"
#include "ora/simplex.hpp"
#include "test_util.hpp"

namespace ora {
namespace {

using testing::tuple;

Instance one_round(InputTuple in, std::vector<double> beta = {}) {
  Instance inst{in.num_actions(), in.num_general(), in.num_resources(), 0, std::move(beta), {}};
  inst.rounds.push_back(std::move(in));
  return inst;
}

// Smallest margins that keep beta*T >= 1 on short horizons.
double short_margin(std::size_t T, double u) {
  return std::min(0.5, 1.0 / static_cast<double>(T) + 0.01 + 0.3 * u);
}

Instance small_random(std::uint64_t seed) {
  CounterRng pick(seed, 7);
  const std::size_t T = 2 + pick.below(5);
  const std::size_t K = 2 + pick.below(2);
  const std::size_t m = pick.below(3);
  const std::size_t n = 1 + pick.below(2);
  return random_instance({seed}, T, K, m, n, short_margin(T, pick.uniform()));
}

TEST(Simplex, TwoVariableTextbookProblem) {
  // max 3x + 5y  s.t.  x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
  Matrix A(3, 2);
  A(0, 0) = 1;
  A(1, 1) = 2;
  A(2, 0) = 3;
  A(2, 1) = 2;
  const auto r = solve_lp_max(A, {4, 12, 18}, {3, 5});
  ASSERT_EQ(r.status, LpResult::Status::optimal);
  EXPECT_NEAR(r.value, 36.0, 1e-12);
  EXPECT_NEAR(r.solution[0], 2.0, 1e-12);
  EXPECT_NEAR(r.solution[1], 6.0, 1e-12);
}

TEST(Simplex, DetectsUnboundedness) {
  Matrix A(1, 2);
  A(0, 0) = 1;
  A(0, 1) = -1;
  const auto r = solve_lp_max(A, {1}, {0, 1});
  EXPECT_EQ(r.status, LpResult::Status::unbounded);
}

TEST(OptBruteforce, ZeroRewardsGiveZero) {
  auto inst = random_instance({3}, 5, 3, 1, 1, 0.2);
  for (auto& r : inst.rounds) std::fill(r.rewards.begin(), r.rewards.end(), 0.0);
  EXPECT_EQ(opt_bruteforce(inst).opt_value, 0.0);
}

TEST(OptBruteforce, SingleViolatingRoundGivesZero) {
  const auto inst = one_round(tuple({0.0, 1.0}, {{0.0, 0.5}}, {}));
  const auto rep = opt_bruteforce(inst);
  EXPECT_EQ(rep.opt_value, 0.0);
  EXPECT_EQ(rep.opt_actions, (std::vector<std::size_t>{0}));
}

TEST(OptBruteforce, Example1GeneralThreeRounds) {
  const auto inst = repeat_tuple(make_example1_instance(0.1, 0.2).general, 3);
  const auto rep = opt_bruteforce(inst);
  EXPECT_EQ(rep.opt_value, 3.0);
  // Every reward-3 sequence avoids void; the lexicographically smallest is all-safe.
  EXPECT_EQ(rep.opt_actions, (std::vector<std::size_t>{1, 1, 1}));
}

TEST(OptBruteforce, SizeGuardRefuses) {
  const auto inst = random_instance({1}, 12, 6, 1, 1, 0.2);
  EXPECT_THROW(opt_bruteforce(inst, 1e6), SizeGuardError);
}

TEST(OptBruteforce, ReturnedSequenceIsFeasibleAndAttainsValue) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = small_random(seed);
    const auto rep = opt_bruteforce(inst);
    ASSERT_TRUE(rep.opt_actions.has_value());
    double value = 0.0;
    std::vector<double> g(inst.num_general, 0.0), h(inst.num_resources, 0.0);
    for (std::size_t t = 0; t < inst.horizon(); ++t) {
      const auto x = (*rep.opt_actions)[t];
      value += inst.rounds[t].rewards[x];
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += inst.rounds[t].general_costs(i, x);
      for (std::size_t j = 0; j < h.size(); ++j) h[j] += inst.rounds[t].consumptions(j, x);
    }
    EXPECT_EQ(value, rep.opt_value);
    for (double v : g) EXPECT_LE(v, 0.0);
    for (std::size_t j = 0; j < h.size(); ++j) EXPECT_LE(h[j], inst.beta[j] * inst.horizon());
  }
}

TEST(OptLpRelax, UpperBoundsBruteForce) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = small_random(1000 + seed);
    const double brute = opt_bruteforce(inst).opt_value;
    const double lp = opt_lp_relax(inst).opt_value;
    EXPECT_GE(lp, brute - 1e-7 * std::max(1.0, std::abs(brute))) << "seed " << seed;
  }
}

TEST(OptLpRelax, SlackConstraintsGivePerRoundMaxima) {
  CounterRng rng(42, 0);
  Instance inst{4, 1, 1, 0, {0.9}, {}};
  double expected = 0.0;
  for (std::size_t t = 0; t < 30; ++t) {
    auto in = zero_tuple(4, 1, 1);
    for (std::size_t x = 1; x < 4; ++x) {
      in.rewards[x] = rng.uniform();
      in.general_costs(0, x) = rng.uniform(-1.0, -0.01);
      in.consumptions(0, x) = rng.uniform(0.0, 0.5);
    }
    expected += *std::max_element(in.rewards.begin(), in.rewards.end());
    inst.rounds.push_back(in);
  }
  EXPECT_NEAR(opt_lp_relax(inst).opt_value, expected, 1e-9);
}

TEST(OptLpRelax, VoidOnlyInstanceIsZero) {
  Instance inst{1, 1, 1, 0, {0.5}, std::vector<InputTuple>(8, zero_tuple(1, 1, 1))};
  EXPECT_EQ(opt_lp_relax(inst).opt_value, 0.0);
}

TEST(OptLpRelax, RepeatedRoundsAggregateToSameValue) {
  // Budget-only Example 1: x_A consumes 0.3 against 0.1 T, so the fractional
  // optimum plays x_A T/3 times.
  const auto inst = repeat_tuple(make_example1_instance(0.1, 0.2).budget_only, 90);
  EXPECT_NEAR(opt_lp_relax(inst).opt_value, 0.1 * 90 / 0.3, 1e-9);
}

TEST(OptStocEstimate, DeterministicModelHasZeroStderr) {
  const auto model = make_example1_instance(0.1, 0.2).general;
  const auto rep = opt_stoc_estimate(model, 4, 10, {1});
  EXPECT_EQ(rep.opt_value, opt_bruteforce(repeat_tuple(model, 4)).opt_value);
  EXPECT_EQ(rep.stderr_value, 0.0);
  EXPECT_EQ(rep.method, OracleMethod::monte_carlo);
}

TEST(OptStocEstimate, StderrShrinksLikeInverseSqrt) {
  const auto model = pacing_model(0.1);
  const double s25 = *opt_stoc_estimate(model, 4, 25, {7}).stderr_value;
  const double s100 = *opt_stoc_estimate(model, 4, 100, {7}).stderr_value;
  const double s400 = *opt_stoc_estimate(model, 4, 400, {7}).stderr_value;
  ASSERT_GT(s400, 0.0);
  EXPECT_NEAR(s25 / s100, 2.0, 0.6);
  EXPECT_NEAR(s100 / s400, 2.0, 0.6);
}

TEST(OptStocEstimate, DrawsArePrefixStable) {
  const auto model = pacing_model(0.1);
  const Seed base{11};
  double manual = 0.0;
  for (std::size_t i = 0; i < 20; ++i)
    manual += opt_bruteforce(sample_sequence(model, 4, sample_seed(base, i))).opt_value;
  EXPECT_DOUBLE_EQ(opt_stoc_estimate(model, 4, 20, base).opt_value, manual / 20.0);
  for (std::size_t i = 0; i < 20; ++i)
    EXPECT_EQ(sample_seed(base, i).value, sample_seed(base, i).value);
}

TEST(OptStocEstimate, GuardWithoutFallbackRefuses) {
  EXPECT_THROW(opt_stoc_estimate(pacing_model(), 30, 2, {0}), SizeGuardError);
  StocEstimateOptions opt;
  opt.allow_lp_fallback = true;
  EXPECT_EQ(opt_stoc_estimate(pacing_model(), 30, 2, {0}, opt).method,
            OracleMethod::monte_carlo_lp);
}

TEST(OptStocExact, AgreesWithMonteCarloWithinNoise) {
  const auto model = pacing_model(0.1);
  const double exact = opt_stoc_exact(model, 4).opt_value;
  const auto mc = opt_stoc_estimate(model, 4, 400, {3});
  EXPECT_NEAR(mc.opt_value, exact, 4.0 * *mc.stderr_value + 1e-12);
}

TEST(SlaterAdv, TwoActionExample) {
  // Columns [-0.3,-0.2] and [0.5,-0.9] as two general rows; void column absent
  // from the minimum because its max is 0 > -0.2.
  const auto inst = one_round(tuple({0.0, 0.0, 0.0}, {{0.0, -0.3, 0.5}, {0.0, -0.2, -0.9}}, {}));
  EXPECT_DOUBLE_EQ(slater_adv(inst), 0.2);
  EXPECT_EQ(slater_adv_witness(inst), (std::vector<std::size_t>{1}));
}

TEST(SlaterAdv, VoidOnlyIsZero) {
  Instance inst{1, 2, 0, 0, {}, std::vector<InputTuple>(5, zero_tuple(1, 2, 0))};
  EXPECT_EQ(slater_adv(inst), 0.0);
}

TEST(SlaterAdv, NoConstraintsIsInfinite) {
  Instance inst{2, 0, 0, 0, {}, std::vector<InputTuple>(3, zero_tuple(2, 0, 0))};
  EXPECT_TRUE(std::isinf(slater_adv(inst)));
  EXPECT_EQ(alpha(slater_adv(inst)), 1.0);
}

TEST(SlaterAdv, DecompositionMatchesSequenceEnumeration) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CounterRng pick(seed, 3);
    const std::size_t K = 2 + pick.below(3);
    const std::size_t T = 2 + pick.below(4);
    const auto inst =
        random_instance({seed}, T, K, pick.below(3), 1 + pick.below(2), short_margin(T, 0.0));
    ASSERT_LE(search_size(K, T), 1e5);
    EXPECT_EQ(slater_adv(inst), slater_adv_bruteforce(inst)) << "seed " << seed;
  }
}

TEST(SlaterStoc, SinglePointReducesToOneRoundAdversarial) {
  const auto ex = make_example1_instance(0.1, 0.2);
  EXPECT_EQ(slater_stoc(ex.general), slater_adv(repeat_tuple(ex.general, 1)));
  EXPECT_DOUBLE_EQ(slater_stoc(ex.general), 0.1);
}

TEST(SlaterStoc, StrictlySafeSupportAtMarginPointThree) {
  auto a = tuple({0.0, 0.9, 0.2}, {{0.0, 0.5, -0.3}}, {{0.0, 0.9, 0.1}});
  auto b = tuple({0.0, 0.1, 0.6}, {{0.0, -0.4, 0.7}}, {{0.0, 0.1, 0.9}});
  const StochasticModel model{3, 1, 1, 0, {0.4}, {a, b}, {0.3, 0.7}};
  EXPECT_GE(slater_stoc(model), 0.3);
}

TEST(SlaterStoc, BudgetOnlyAtLeastMinBeta) {
  const auto ex = make_example1_instance(0.1, 0.2);
  EXPECT_GE(slater_stoc(ex.budget_only), 0.1);
  auto a = tuple({0.0, 0.25}, {}, {{0.0, 0.5}});
  auto b = tuple({0.0, 0.75}, {}, {{0.0, 0.25}});
  const StochasticModel model{2, 0, 1, 0, {0.5}, {a, b}, {0.5, 0.5}};
  EXPECT_GE(slater_stoc(model), 0.5);
}

TEST(Alpha, SubstitutionAndDomain) {
  EXPECT_DOUBLE_EQ(alpha(0.25), 0.2);
  EXPECT_EQ(alpha(0.0), 0.0);
  EXPECT_EQ(alpha(1.0), 0.5);
  EXPECT_THROW(alpha(-0.1), std::domain_error);
}

// The alpha-mixture of the optimal sequence with the Slater witness is
// feasible round by round on every unified row.
TEST(OracleProperties, MixingIsFeasible) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto inst = small_random(500 + seed);
    const double rho = slater_adv(inst);
    const double a = alpha(rho);
    const auto star = *opt_bruteforce(inst).opt_actions;
    const auto safe = slater_adv_witness(inst);
    const auto budget = inst.budget();
    for (std::size_t t = 0; t < inst.horizon(); ++t) {
      const auto u = unify_constraints(inst.rounds[t], budget);
      for (std::size_t i = 0; i < u.num_constraints(); ++i) {
        const double mix = a * u.matrix(i, star[t]) + (1.0 - a) * u.matrix(i, safe[t]);
        EXPECT_LE(mix, 1e-12) << "seed " << seed << " t " << t << " row " << i;
      }
    }
  }
}

TEST(OracleProperties, LargerBudgetsNeverHurt) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = small_random(900 + seed);
    auto wider = inst;
    for (auto& b : wider.beta) b = std::min(1.0, b * 1.5);
    EXPECT_GE(opt_bruteforce(wider).opt_value, opt_bruteforce(inst).opt_value);
    EXPECT_GE(slater_adv(wider), slater_adv(inst));
  }
}

TEST(OracleProperties, LargerBudgetsRaiseStochasticSlater) {
  auto model = pacing_model(0.05);
  const double before = slater_stoc(model);
  model.beta[0] = 0.7;
  EXPECT_GE(slater_stoc(model), before);
}

}  // namespace
}  // namespace ora
