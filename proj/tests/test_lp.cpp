#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <optional>

#include "mcm/core.hpp"
#include "mcm/lp.hpp"
#include "mcm/rng.hpp"

namespace mcm {
namespace {

TEST(LpSolve, SingleBound) {
  LpProblem p;
  p.num_vars = 1;
  p.objective = {1.0};
  p.add_row({1.0}, RowSense::LessEq, 3.0);
  const LpSolution s = lp_solve(p);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.value, 3.0, 1e-12);
}

TEST(LpSolve, TwoVariables) {
  LpProblem p;
  p.num_vars = 2;
  p.objective = {1.0, 1.0};
  p.add_row({1.0, 1.0}, RowSense::LessEq, 1.0);
  p.add_row({1.0, 0.0}, RowSense::LessEq, 0.4);
  const LpSolution s = lp_solve(p);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.value, 1.0, 1e-12);
  EXPECT_NEAR(s.dual_value, 1.0, 1e-12);
}

TEST(LpSolve, InfeasibleAndUnbounded) {
  LpProblem inf;
  inf.num_vars = 1;
  inf.objective = {1.0};
  inf.add_row({1.0}, RowSense::GreaterEq, 2.0);
  inf.add_row({1.0}, RowSense::LessEq, 1.0);
  EXPECT_EQ(lp_solve(inf).status, LpStatus::Infeasible);

  LpProblem unb;
  unb.num_vars = 2;
  unb.objective = {1.0, 0.0};
  unb.add_row({-1.0, 1.0}, RowSense::LessEq, 1.0);
  EXPECT_EQ(lp_solve(unb).status, LpStatus::Unbounded);
}

TEST(LpSolve, EqualityAndNegativeRhs) {
  // max -x - y  s.t.  x + y = 2,  x - y <= -1  (i.e. y >= x + 1)
  LpProblem p;
  p.num_vars = 2;
  p.objective = {-1.0, -1.0};
  p.add_row({1.0, 1.0}, RowSense::Equal, 2.0);
  p.add_row({1.0, -1.0}, RowSense::LessEq, -1.0);
  const LpSolution s = lp_solve(p);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.value, -2.0, 1e-12);
  EXPECT_NEAR(s.x[0] + s.x[1], 2.0, 1e-12);
  EXPECT_LE(s.x[0] - s.x[1], -1.0 + 1e-12);
  EXPECT_NEAR(s.dual_value, s.value, 1e-10);
}

// Independent oracle: enumerate every choice of num_vars tight constraints
// among the rows and x >= 0, solve the square system, keep the best feasible vertex.
std::optional<double> vertex_enumeration(const LpProblem& p) {
  const std::size_t n = p.num_vars, m = p.num_rows();
  const std::size_t total = m + n;
  auto row = [&](std::size_t k, std::size_t j) {
    if (k < m) return p.matrix[k * n + j];
    return k - m == j ? -1.0 : 0.0;
  };
  auto rhs = [&](std::size_t k) { return k < m ? p.rhs[k] : 0.0; };
  std::optional<double> best;
  std::vector<std::size_t> pick(n);
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;
  for (;;) {
    std::vector<double> a(n * (n + 1));
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < n; ++j) a[r * (n + 1) + j] = row(pick[r], j);
      a[r * (n + 1) + n] = rhs(pick[r]);
    }
    bool singular = false;
    for (std::size_t c = 0; c < n && !singular; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < n; ++r) {
        if (std::abs(a[r * (n + 1) + c]) > std::abs(a[piv * (n + 1) + c])) piv = r;
      }
      if (std::abs(a[piv * (n + 1) + c]) < 1e-11) {
        singular = true;
        break;
      }
      for (std::size_t j = 0; j <= n; ++j) std::swap(a[piv * (n + 1) + j], a[c * (n + 1) + j]);
      for (std::size_t r = 0; r < n; ++r) {
        if (r == c) continue;
        const double f = a[r * (n + 1) + c] / a[c * (n + 1) + c];
        for (std::size_t j = c; j <= n; ++j) a[r * (n + 1) + j] -= f * a[c * (n + 1) + j];
      }
    }
    if (!singular) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j) x[j] = a[j * (n + 1) + n] / a[j * (n + 1) + j];
      bool feasible = true;
      for (std::size_t k = 0; k < total && feasible; ++k) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < n; ++j) lhs += row(k, j) * x[j];
        feasible = lhs <= rhs(k) + 1e-9;
      }
      if (feasible) {
        double v = 0.0;
        for (std::size_t j = 0; j < n; ++j) v += p.objective[j] * x[j];
        if (!best || v > *best) best = v;
      }
    }
    std::size_t i = n;
    while (i > 0 && pick[i - 1] == total - n + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t k = i; k < n; ++k) pick[k] = pick[k - 1] + 1;
  }
  return best;
}

LpProblem random_lp(Rng& rng, std::size_t m, std::size_t n, bool mixed_signs) {
  LpProblem p;
  p.num_vars = n;
  for (std::size_t j = 0; j < n; ++j) p.objective.push_back(uniform01(rng) * 2.0 - (mixed_signs ? 0.5 : 0.0));
  for (std::size_t r = 0; r < m; ++r) {
    std::vector<double> a(n);
    for (auto& v : a) {
      v = bernoulli(rng, 0.3) ? 0.0 : uniform01(rng) * 3.0;
      if (mixed_signs && bernoulli(rng, 0.25)) v = -v;
    }
    p.add_row(a, RowSense::LessEq, 0.5 + uniform01(rng) * 4.0);
  }
  // Keeps every instance bounded even with negative coefficients.
  p.add_row(std::vector<double>(n, 1.0), RowSense::LessEq, 10.0);
  return p;
}

void check_against_oracle(const LpProblem& p) {
  const LpSolution s = lp_solve(p);
  const auto oracle = vertex_enumeration(p);
  ASSERT_TRUE(oracle.has_value());
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.value, *oracle, 1e-6);
  EXPECT_NEAR(s.dual_value, s.value, 1e-8 * std::max(1.0, std::abs(s.value)));
  for (std::size_t r = 0; r < p.num_rows(); ++r) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < p.num_vars; ++j) lhs += p.matrix[r * p.num_vars + j] * s.x[j];
    EXPECT_LE(lhs, p.rhs[r] + 1e-8);
    EXPECT_GE(s.duals[r], -1e-9);
  }
  for (double x : s.x) EXPECT_GE(x, -1e-9);
}

TEST(LpSolve, RandomTenByTenAgainstVertexEnumeration) {
  Rng rng = make_rng(2024);
  for (int trial = 0; trial < 4; ++trial) check_against_oracle(random_lp(rng, 9, 10, trial % 2 == 1));
}

TEST(LpSolve, RandomSmallAgainstVertexEnumeration) {
  Rng rng = make_rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 1 + uniform_index(rng, 5), n = 1 + uniform_index(rng, 5);
    check_against_oracle(random_lp(rng, m, n, trial % 2 == 1));
  }
}

TEST(LpSolve, DegenerateProblemTerminates) {
  // Many redundant tight rows through the optimal vertex.
  LpProblem p;
  p.num_vars = 3;
  p.objective = {1.0, 1.0, 1.0};
  for (int k = 0; k < 30; ++k) {
    const double a = 1.0 + (k % 5) * 0.0;
    p.add_row({a, 1.0, 0.0}, RowSense::LessEq, 1.0);
    p.add_row({0.0, a, 1.0}, RowSense::LessEq, 1.0);
    p.add_row({1.0, 0.0, a}, RowSense::LessEq, 1.0);
  }
  const LpSolution s = lp_solve(p);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.value, 1.5, 1e-9);
}

SparseLp to_sparse(const LpProblem& p) {
  SparseLp s;
  s.num_rows = p.num_rows();
  s.rhs = p.rhs;
  for (std::size_t j = 0; j < p.num_vars; ++j) {
    std::vector<std::pair<std::size_t, double>> col;
    for (std::size_t r = 0; r < p.num_rows(); ++r) col.emplace_back(r, p.matrix[r * p.num_vars + j]);
    s.add_column(p.objective[j], col);
  }
  return s;
}

TEST(SparseLp, AgreesWithDenseSolver) {
  Rng rng = make_rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 1 + uniform_index(rng, 12), n = 1 + uniform_index(rng, 12);
    const LpProblem p = random_lp(rng, m, n, trial % 3 == 0);
    SparseLp s = to_sparse(p);
    if (trial % 2 == 0) {
      for (std::size_t j = 0; j < n; ++j) s.crash_order.push_back(n - 1 - j);
    }
    const LpSolution a = lp_solve(p);
    const LpSolution b = sparse_lp_solve(s);
    ASSERT_EQ(b.status, LpStatus::Optimal);
    EXPECT_NEAR(a.value, b.value, 1e-8);
    EXPECT_NEAR(b.dual_value, b.value, 1e-8 * std::max(1.0, b.value));
  }
}

TEST(SparseLp, RejectsNegativeRhs) {
  SparseLp s;
  s.num_rows = 1;
  s.rhs = {-1.0};
  s.add_column(1.0, {{0, 1.0}});
  EXPECT_THROW(sparse_lp_solve(s), DomainError);
}

}  // namespace
}  // namespace mcm
