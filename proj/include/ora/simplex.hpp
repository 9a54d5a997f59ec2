#pragma once

// Dense tableau primal simplex for
//   maximize c^T z  s.t.  A z <= b,  z >= 0,  with b >= 0,
// so the slack basis is feasible and no phase one is needed. Bland's rule
// (lowest-index entering column, lowest-index leaving basic variable among
// ratio ties) prevents cycling.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "ora/core.hpp"

namespace ora {

struct LpResult {
  enum class Status { optimal, unbounded, iteration_limit };
  Status status = Status::optimal;
  double value = 0.0;
  std::vector<double> solution;
  std::size_t iterations = 0;
};

struct SimplexOptions {
  double reduced_cost_tol = 1e-9;
  double pivot_tol = 1e-12;
  std::size_t max_iterations = 1'000'000;
};

inline LpResult solve_lp_max(const Matrix& A, const std::vector<double>& b,
                             const std::vector<double>& c, const SimplexOptions& opt = {}) {
  const std::size_t rows = A.rows();
  const std::size_t vars = c.size();
  if (rows > 0 && A.cols() != vars) throw ValidationError("LP: A has wrong column count");
  if (b.size() != rows) throw ValidationError("LP: b has wrong length");
  for (double v : b)
    if (!(v >= 0.0)) throw ValidationError("LP: right-hand side must be nonnegative");

  const std::size_t cols = vars + rows;  // structural + slack, rhs kept separately
  Matrix tab(rows, cols);
  std::vector<double> rhs = b;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < vars; ++j) tab(r, j) = A(r, j);
    tab(r, vars + r) = 1.0;
  }
  // reduced[j] = c_j - c_B^T B^{-1} A_j; optimal when all <= tol.
  std::vector<double> reduced(cols, 0.0);
  for (std::size_t j = 0; j < vars; ++j) reduced[j] = c[j];
  std::vector<std::size_t> basis(rows);
  for (std::size_t r = 0; r < rows; ++r) basis[r] = vars + r;

  LpResult res;
  while (true) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j < cols; ++j)
      if (reduced[j] > opt.reduced_cost_tol) {
        enter = j;
        break;
      }
    if (enter == cols) break;
    if (res.iterations >= opt.max_iterations) {
      res.status = LpResult::Status::iteration_limit;
      break;
    }

    std::size_t leave = rows;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows; ++r) {
      const double a = tab(r, enter);
      if (a <= opt.pivot_tol) continue;
      const double ratio = rhs[r] / a;
      if (ratio < best_ratio || (ratio == best_ratio && basis[r] < basis[leave])) {
        best_ratio = ratio;
        leave = r;
      }
    }
    if (leave == rows) {
      res.status = LpResult::Status::unbounded;
      break;
    }

    const double piv = tab(leave, enter);
    for (std::size_t j = 0; j < cols; ++j) tab(leave, j) /= piv;
    rhs[leave] /= piv;
    tab(leave, enter) = 1.0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == leave) continue;
      const double f = tab(r, enter);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < cols; ++j) tab(r, j) -= f * tab(leave, j);
      tab(r, enter) = 0.0;
      rhs[r] -= f * rhs[leave];
      if (rhs[r] < 0.0 && rhs[r] > -opt.pivot_tol) rhs[r] = 0.0;
    }
    const double f = reduced[enter];
    for (std::size_t j = 0; j < cols; ++j) reduced[j] -= f * tab(leave, j);
    reduced[enter] = 0.0;
    basis[leave] = enter;
    ++res.iterations;
  }

  res.solution.assign(vars, 0.0);
  for (std::size_t r = 0; r < rows; ++r)
    if (basis[r] < vars) res.solution[basis[r]] = rhs[r];
  double value = 0.0;
  for (std::size_t j = 0; j < vars; ++j) value += c[j] * res.solution[j];
  res.value = value;
  return res;
}

}  // namespace ora
