#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mcm/core.hpp"
#include "mcm/lp.hpp"

namespace mcm {

void LpProblem::add_row(const std::vector<double>& coeffs, RowSense s, double b) {
  if (coeffs.size() != num_vars) throw DomainError("LpProblem::add_row: width mismatch");
  if (sense.size() < rhs.size()) sense.resize(rhs.size(), RowSense::LessEq);
  matrix.insert(matrix.end(), coeffs.begin(), coeffs.end());
  rhs.push_back(b);
  sense.push_back(s);
}

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kPivotTol = 1e-11;
constexpr std::size_t kDegenerateSwitch = 50;

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), w_(cols + 1), t_((rows + 1) * (cols + 1), 0.0) {}

  double& at(std::size_t r, std::size_t j) { return t_[r * w_ + j]; }
  double at(std::size_t r, std::size_t j) const { return t_[r * w_ + j]; }
  double& rhs(std::size_t r) { return t_[r * w_ + n_]; }
  double& obj(std::size_t j) { return t_[m_ * w_ + j]; }

  void pivot(std::size_t pr, std::size_t pc) {
    double* prow = &t_[pr * w_];
    const double inv = 1.0 / prow[pc];
    for (std::size_t j = 0; j < w_; ++j) prow[j] *= inv;
    prow[pc] = 1.0;
    for (std::size_t r = 0; r <= m_; ++r) {
      if (r == pr) continue;
      double* row = &t_[r * w_];
      const double f = row[pc];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < w_; ++j) row[j] -= f * prow[j];
      row[pc] = 0.0;
    }
  }

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }

 private:
  std::size_t m_, n_, w_;
  std::vector<double> t_;
};

enum class PhaseResult { Optimal, Unbounded };

// Maximizes the objective encoded in the tableau's last row (stored as
// reduced costs z_j - c_j). Columns with allowed[j] == false never enter.
PhaseResult run_phase(Tableau& tab, std::vector<std::size_t>& basis,
                      const std::vector<char>& allowed, std::size_t& iterations,
                      std::size_t budget) {
  const std::size_t m = tab.rows();
  const std::size_t n = tab.cols();
  std::size_t degenerate_run = 0;
  for (;;) {
    if (iterations >= budget) {
      throw NumericalError("lp_solve: pivot budget of " + std::to_string(budget) +
                           " exhausted (possible cycling)");
    }
    const bool bland = degenerate_run >= kDegenerateSwitch;
    std::size_t q = n;
    double best = -kFeasTol;
    for (std::size_t j = 0; j < n; ++j) {
      if (!allowed[j]) continue;
      const double d = tab.obj(j);
      if (d < best) {
        q = j;
        if (bland) break;
        best = d;
      }
    }
    if (q == n) return PhaseResult::Optimal;

    std::size_t p = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m; ++r) {
      const double a = tab.at(r, q);
      if (a <= kPivotTol) continue;
      const double ratio = std::max(0.0, tab.rhs(r)) / a;
      if (ratio < best_ratio - 1e-12 ||
          (ratio <= best_ratio + 1e-12 && p < m && basis[r] < basis[p])) {
        best_ratio = std::min(best_ratio, ratio);
        p = r;
      }
    }
    if (p == m) return PhaseResult::Unbounded;
    degenerate_run = best_ratio <= kFeasTol ? degenerate_run + 1 : 0;
    tab.pivot(p, q);
    basis[p] = q;
    ++iterations;
  }
}

void load_objective(Tableau& tab, const std::vector<std::size_t>& basis,
                    const std::vector<double>& cost) {
  const std::size_t m = tab.rows();
  const std::size_t n = tab.cols();
  for (std::size_t j = 0; j <= n; ++j) tab.obj(j) = j < n ? -cost[j] : 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const double cb = cost[basis[r]];
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j <= n; ++j) tab.obj(j) += cb * tab.at(r, j);
  }
}

}  // namespace

LpSolution lp_solve(const LpProblem& problem) {
  const std::size_t m = problem.num_rows();
  const std::size_t nv = problem.num_vars;
  if (problem.objective.size() != nv || problem.matrix.size() != m * nv) {
    throw DomainError("lp_solve: inconsistent problem dimensions");
  }
  for (double v : problem.matrix) {
    if (!std::isfinite(v)) throw DomainError("lp_solve: non-finite coefficient");
  }

  std::vector<RowSense> sense = problem.sense;
  sense.resize(m, RowSense::LessEq);
  std::vector<char> flipped(m, 0);
  for (std::size_t r = 0; r < m; ++r) {
    if (problem.rhs[r] < 0.0) {
      flipped[r] = 1;
      if (sense[r] == RowSense::LessEq) sense[r] = RowSense::GreaterEq;
      else if (sense[r] == RowSense::GreaterEq) sense[r] = RowSense::LessEq;
    }
  }

  // Column layout: structurals, one slack/surplus per inequality, one
  // artificial per >= or = row.
  std::vector<std::size_t> slack_col(m, SIZE_MAX), art_col(m, SIZE_MAX);
  std::size_t ncol = nv;
  for (std::size_t r = 0; r < m; ++r) {
    if (sense[r] != RowSense::Equal) slack_col[r] = ncol++;
  }
  for (std::size_t r = 0; r < m; ++r) {
    if (sense[r] != RowSense::LessEq) art_col[r] = ncol++;
  }

  Tableau tab(m, ncol);
  std::vector<std::size_t> basis(m);
  std::vector<char> is_art(ncol, 0);
  for (std::size_t r = 0; r < m; ++r) {
    const double s = flipped[r] ? -1.0 : 1.0;
    for (std::size_t j = 0; j < nv; ++j) tab.at(r, j) = s * problem.matrix[r * nv + j];
    tab.rhs(r) = s * problem.rhs[r];
    if (sense[r] == RowSense::LessEq) {
      tab.at(r, slack_col[r]) = 1.0;
      basis[r] = slack_col[r];
    } else {
      if (sense[r] == RowSense::GreaterEq) tab.at(r, slack_col[r]) = -1.0;
      tab.at(r, art_col[r]) = 1.0;
      basis[r] = art_col[r];
      is_art[art_col[r]] = 1;
    }
  }

  LpSolution sol;
  const std::size_t budget = 50 * (m + ncol) + 1000;
  std::vector<char> allowed(ncol, 1);

  const bool need_phase1 = std::any_of(is_art.begin(), is_art.end(), [](char c) { return c; });
  if (need_phase1) {
    std::vector<double> cost(ncol, 0.0);
    for (std::size_t j = 0; j < ncol; ++j) cost[j] = is_art[j] ? -1.0 : 0.0;
    load_objective(tab, basis, cost);
    run_phase(tab, basis, allowed, sol.iterations, budget);
    double bmax = 1.0;
    for (std::size_t r = 0; r < m; ++r) bmax = std::max(bmax, std::abs(problem.rhs[r]));
    if (-tab.obj(ncol) > kFeasTol * bmax) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // Drive zero-level artificials out of the basis where possible; rows
    // where that fails are redundant and keep their artificial at zero.
    for (std::size_t r = 0; r < m; ++r) {
      if (!is_art[basis[r]]) continue;
      for (std::size_t j = 0; j < ncol; ++j) {
        if (is_art[j] || std::abs(tab.at(r, j)) <= 1e-9) continue;
        tab.pivot(r, j);
        basis[r] = j;
        break;
      }
    }
    for (std::size_t j = 0; j < ncol; ++j) allowed[j] = !is_art[j];
  }

  std::vector<double> cost(ncol, 0.0);
  std::copy(problem.objective.begin(), problem.objective.end(), cost.begin());
  load_objective(tab, basis, cost);
  if (run_phase(tab, basis, allowed, sol.iterations, budget) == PhaseResult::Unbounded) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }

  sol.status = LpStatus::Optimal;
  sol.x.assign(nv, 0.0);
  sol.basis = basis;
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < nv) sol.x[basis[r]] = std::max(0.0, tab.rhs(r));
  }
  sol.value = 0.0;
  for (std::size_t j = 0; j < nv; ++j) sol.value += problem.objective[j] * sol.x[j];

  // Row r's dual is the reduced cost of its identity column: the slack for
  // <= rows, the artificial (cost 0 in phase 2) otherwise.
  sol.duals.assign(m, 0.0);
  sol.dual_value = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t col = sense[r] == RowSense::LessEq ? slack_col[r] : art_col[r];
    const double y = tab.obj(col);
    sol.duals[r] = flipped[r] ? -y : y;
    sol.dual_value += sol.duals[r] * problem.rhs[r];
  }
  return sol;
}

}  // namespace mcm
