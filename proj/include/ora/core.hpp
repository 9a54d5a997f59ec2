#pragma once

// Domain types for online resource allocation instances: input tuples over a
// finite action set, budgets, the unified constraint matrix, and per-round
// trajectory records.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ora {

/// Thrown on malformed instances, configurations, or dimension mismatches.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct ActionSet {
  std::size_t count = 1;
  std::size_t void_index = 0;

  void validate() const {
    if (count < 1) throw ValidationError("action set must contain at least one action");
    if (void_index >= count) throw ValidationError("void_index out of range");
  }
};

/// One round's fully revealed input: rewards f(x), general costs g_i(x) and
/// resource consumptions h_j(x) for every action x.
struct InputTuple {
  std::vector<double> rewards;  // K
  Matrix general_costs;         // m x K
  Matrix consumptions;          // n x K

  std::size_t num_actions() const { return rewards.size(); }
  std::size_t num_general() const { return general_costs.rows(); }
  std::size_t num_resources() const { return consumptions.rows(); }

  bool operator==(const InputTuple&) const = default;
};

struct BudgetSpec {
  std::size_t horizon = 0;               // T
  std::vector<double> per_round_budget;  // beta, one per resource

  std::size_t num_resources() const { return per_round_budget.size(); }
  double total(std::size_t j) const {
    return per_round_budget[j] * static_cast<double>(horizon);
  }
  double min_beta() const {
    double b = per_round_budget.empty() ? 0.0 : per_round_budget.front();
    for (double v : per_round_budget) b = v < b ? v : b;
    return b;
  }
};

/// M x K matrix stacking the general costs on top of the shifted
/// consumptions h_j - beta_j. M = m + n.
struct UnifiedConstraints {
  Matrix matrix;
  std::size_t num_general = 0;

  std::size_t num_constraints() const { return matrix.rows(); }
};

/// Lagrange multipliers, one per unified constraint. Always nonnegative.
struct DualVector {
  std::vector<double> values;

  DualVector() = default;
  explicit DualVector(std::size_t size) : values(size, 0.0) {}
  explicit DualVector(std::vector<double> v) : values(std::move(v)) {
    for (double x : values)
      if (!(x >= 0.0)) throw ValidationError("dual multipliers must be nonnegative");
  }

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }

  double l1() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }

  bool operator==(const DualVector&) const = default;
};

struct RoundRecord {
  std::size_t round = 0;  // 1-based
  std::size_t action = 0;
  std::size_t candidate_action = 0;
  double reward = 0.0;
  std::vector<double> unified_values;  // g~_t(x_t), M entries
  DualVector dual_before;              // lambda_t
  bool gate_open = true;
  std::vector<double> cumulative_consumption;  // after this round, n entries

  bool operator==(const RoundRecord&) const = default;
};

struct Trajectory {
  std::vector<RoundRecord> records;
  DualVector final_dual;  // lambda_{T+1}
  std::size_t stopping_time = 0;

  bool operator==(const Trajectory&) const = default;
};

/// A fixed (adversarial) sequence of input tuples with its budget.
struct Instance {
  std::size_t num_actions = 1;
  std::size_t num_general = 0;
  std::size_t num_resources = 0;
  std::size_t void_index = 0;
  std::vector<double> beta;
  std::vector<InputTuple> rounds;

  std::size_t horizon() const { return rounds.size(); }
  std::size_t num_constraints() const { return num_general + num_resources; }
  ActionSet actions() const { return {num_actions, void_index}; }
  BudgetSpec budget() const { return {rounds.size(), beta}; }

  bool operator==(const Instance&) const = default;
};

/// Builds an input tuple of the given shape with every entry zero.
inline InputTuple zero_tuple(std::size_t K, std::size_t m, std::size_t n) {
  return {std::vector<double>(K, 0.0), Matrix(m, K), Matrix(n, K)};
}

inline UnifiedConstraints unify_constraints(const InputTuple& input, const BudgetSpec& budget) {
  const std::size_t K = input.num_actions();
  const std::size_t m = input.num_general();
  const std::size_t n = input.num_resources();
  if (input.general_costs.cols() != K && m > 0)
    throw ValidationError("dimension mismatch: general_costs has " +
                          std::to_string(input.general_costs.cols()) + " columns, expected K=" +
                          std::to_string(K));
  if (input.consumptions.cols() != K && n > 0)
    throw ValidationError("dimension mismatch: consumptions has " +
                          std::to_string(input.consumptions.cols()) + " columns, expected K=" +
                          std::to_string(K));
  if (budget.num_resources() != n)
    throw ValidationError("dimension mismatch: beta has " +
                          std::to_string(budget.num_resources()) + " entries, expected n=" +
                          std::to_string(n));

  UnifiedConstraints out{Matrix(m + n, K), m};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t x = 0; x < K; ++x) out.matrix(i, x) = input.general_costs(i, x);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t x = 0; x < K; ++x)
      out.matrix(m + j, x) = input.consumptions(j, x) - budget.per_round_budget[j];
  return out;
}

struct ValidationIssue {
  std::size_t round = 0;  // 1-based; 0 for instance-level issues
  std::string field;      // "reward", "g", "h", "beta", "shape", ...
  std::size_t row = 0;
  std::size_t action = 0;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  std::vector<std::string> warnings;

  bool valid() const { return issues.empty(); }
  std::string summary() const {
    std::string s;
    for (const auto& i : issues) {
      if (!s.empty()) s += "; ";
      s += i.message;
    }
    return s;
  }
};

/// Scans every round and coordinate; never stops at the first problem.
inline ValidationReport validate_instance(const std::vector<InputTuple>& sequence,
                                          const BudgetSpec& budget,
                                          const ActionSet& actions) {
  ValidationReport rep;
  auto add = [&](std::size_t t, std::string field, std::size_t row, std::size_t x,
                 std::string msg) {
    rep.issues.push_back({t, std::move(field), row, x, std::move(msg)});
  };

  if (actions.count < 1) add(0, "shape", 0, 0, "action set is empty");
  if (actions.void_index >= actions.count) add(0, "shape", 0, 0, "void_index out of range");
  if (budget.horizon < 1) add(0, "shape", 0, 0, "horizon must be positive");
  if (sequence.size() != budget.horizon)
    add(0, "shape", 0, 0,
        "sequence has " + std::to_string(sequence.size()) + " rounds, horizon is " +
            std::to_string(budget.horizon));

  for (std::size_t j = 0; j < budget.num_resources(); ++j) {
    const double b = budget.per_round_budget[j];
    if (!(b > 0.0)) {
      add(0, "beta", j, 0, "beta[" + std::to_string(j) + "] must be positive");
    } else if (b * static_cast<double>(budget.horizon) < 1.0) {
      add(0, "beta", j, 0,
          "beta[" + std::to_string(j) + "]*T < 1: budget gate closed at round 1");
    } else if (b > 1.0) {
      rep.warnings.push_back("beta[" + std::to_string(j) + "] > 1: budget never binding");
    }
  }

  const std::size_t K = actions.count;
  const std::size_t n = budget.num_resources();
  std::size_t m = sequence.empty() ? 0 : sequence.front().num_general();

  for (std::size_t t = 0; t < sequence.size(); ++t) {
    const auto& in = sequence[t];
    const std::size_t r = t + 1;
    bool shape_ok = true;
    if (in.rewards.size() != K) {
      add(r, "shape", 0, 0, "round " + std::to_string(r) + ": rewards has wrong length");
      shape_ok = false;
    }
    if (in.num_general() != m || (m > 0 && in.general_costs.cols() != K)) {
      add(r, "shape", 0, 0, "round " + std::to_string(r) + ": g has wrong shape");
      shape_ok = false;
    }
    if (in.num_resources() != n || (n > 0 && in.consumptions.cols() != K)) {
      add(r, "shape", 0, 0, "round " + std::to_string(r) + ": h has wrong shape");
      shape_ok = false;
    }
    if (!shape_ok) continue;

    for (std::size_t x = 0; x < K; ++x) {
      const double f = in.rewards[x];
      if (!(f >= 0.0 && f <= 1.0))
        add(r, "reward", 0, x,
            "round " + std::to_string(r) + ": reward of action " + std::to_string(x) +
                " outside [0,1]");
    }
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t x = 0; x < K; ++x) {
        const double g = in.general_costs(i, x);
        if (!(g >= -1.0 && g <= 1.0))
          add(r, "g", i, x,
              "round " + std::to_string(r) + ": g[" + std::to_string(i) + "][" +
                  std::to_string(x) + "] outside [-1,1]");
      }
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t x = 0; x < K; ++x) {
        const double h = in.consumptions(j, x);
        if (!(h >= 0.0 && h <= 1.0))
          add(r, "h", j, x,
              "round " + std::to_string(r) + ": h[" + std::to_string(j) + "][" +
                  std::to_string(x) + "] outside [0,1]");
      }

    if (actions.void_index < K) {
      const std::size_t v = actions.void_index;
      if (in.rewards[v] != 0.0)
        add(r, "void", 0, v, "round " + std::to_string(r) + ": void action has nonzero reward");
      for (std::size_t i = 0; i < m; ++i)
        if (in.general_costs(i, v) != 0.0)
          add(r, "void", i, v, "round " + std::to_string(r) + ": void action has nonzero g");
      for (std::size_t j = 0; j < n; ++j)
        if (in.consumptions(j, v) != 0.0)
          add(r, "void", j, v, "round " + std::to_string(r) + ": void action has nonzero h");
    }
  }
  return rep;
}

inline ValidationReport validate_instance(const Instance& inst) {
  auto rep = validate_instance(inst.rounds, inst.budget(), inst.actions());
  for (std::size_t t = 0; t < inst.rounds.size(); ++t)
    if (inst.rounds[t].num_general() != inst.num_general)
      rep.issues.push_back({t + 1, "shape", 0, 0,
                            "round " + std::to_string(t + 1) + ": m differs from header"});
  return rep;
}

}  // namespace ora
