#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace mcm {

enum class RowSense { LessEq, Equal, GreaterEq };
enum class LpStatus { Optimal, Infeasible, Unbounded };

// maximize objective . x  s.t.  rows[r] . x (sense) rhs[r],  x >= 0.
// Dense row-major storage: matrix[r * num_vars + j].
struct LpProblem {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  std::vector<double> matrix;
  std::vector<double> rhs;
  std::vector<RowSense> sense;  // empty => all LessEq

  std::size_t num_rows() const { return rhs.size(); }
  void add_row(const std::vector<double>& coeffs, RowSense s, double b);
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  std::vector<double> x;
  std::vector<double> duals;     // one per row, sign convention of the max problem
  std::vector<std::size_t> basis;  // structural variables basic at optimum (dense solver only)
  double dual_value = 0.0;       // rhs . duals
  std::size_t iterations = 0;
};

// Dense two-phase tableau simplex. Dantzig pricing; switches to Bland's rule
// after a run of degenerate pivots and stays there until progress resumes.
// Feasibility tolerance 1e-9. Throws NumericalError when the pivot budget is
// exhausted.
LpSolution lp_solve(const LpProblem& problem);

// maximize objective . x  s.t.  A x <= rhs,  x >= 0, with rhs >= 0 so the
// slack basis is feasible. A is stored by column.
struct SparseLp {
  std::size_t num_rows = 0;
  std::vector<double> rhs;
  std::vector<double> objective;
  std::vector<std::size_t> col_start;  // size num_cols + 1
  std::vector<std::size_t> row_index;
  std::vector<double> value;
  // Optional greedy starting basis: columns are raised in this order until a
  // row saturates. Columns with a non-positive entry are skipped.
  std::vector<std::size_t> crash_order;

  std::size_t num_cols() const { return objective.size(); }
  void add_column(double obj, const std::vector<std::pair<std::size_t, double>>& entries);
};

// Revised simplex with an explicit basis inverse updated in product form.
// Intended for packing LPs whose columns have a handful of nonzeros.
LpSolution sparse_lp_solve(const SparseLp& problem);

}  // namespace mcm
