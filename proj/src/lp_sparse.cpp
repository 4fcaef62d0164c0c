#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mcm/core.hpp"
#include "mcm/lp.hpp"

namespace mcm {

void SparseLp::add_column(double obj, const std::vector<std::pair<std::size_t, double>>& entries) {
  if (col_start.empty()) col_start.push_back(0);
  for (const auto& [r, v] : entries) {
    if (r >= num_rows) throw DomainError("SparseLp::add_column: row out of range");
    if (v == 0.0) continue;
    row_index.push_back(r);
    value.push_back(v);
  }
  objective.push_back(obj);
  col_start.push_back(row_index.size());
}

namespace {

constexpr double kOptTol = 1e-9;
constexpr double kPivotTol = 1e-10;
constexpr double kFeasTol = 1e-9;
constexpr std::size_t kRefreshEvery = 100;
constexpr std::size_t kDegenerateSwitch = 50;

class RevisedSimplex {
 public:
  explicit RevisedSimplex(const SparseLp& lp)
      : lp_(lp), m_(lp.num_rows), n_(lp.num_cols()), binv_(m_ * m_, 0.0), basis_(m_),
        pos_(n_ + m_, kNone), xb_(lp.rhs), y_(m_, 0.0) {
    for (std::size_t r = 0; r < m_; ++r) {
      binv_[r * m_ + r] = 1.0;
      basis_[r] = n_ + r;
      pos_[n_ + r] = r;
    }
    if (!lp.crash_order.empty()) crash();
  }

  LpSolution solve() {
    LpSolution sol;
    const std::size_t budget = 20 * (m_ + n_) + 1000;
    bool reinverted = false;
    for (;;) {
      const LpStatus st = iterate(budget, sol.iterations);
      if (st == LpStatus::Unbounded) {
        sol.status = st;
        return sol;
      }
      refresh();
      if (certify()) break;
      if (reinverted) {
        throw NumericalError("sparse_lp_solve: optimality certificate failed after reinversion");
      }
      reinvert();
      reinverted = true;
    }
    sol.status = LpStatus::Optimal;
    sol.x.assign(n_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < n_) sol.x[basis_[r]] = std::max(0.0, xb_[r]);
    }
    sol.value = 0.0;
    for (std::size_t j = 0; j < n_; ++j) sol.value += lp_.objective[j] * sol.x[j];
    sol.duals = y_;
    sol.dual_value = 0.0;
    for (std::size_t r = 0; r < m_; ++r) sol.dual_value += y_[r] * lp_.rhs[r];
    return sol;
  }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  double cost(std::size_t j) const { return j < n_ ? lp_.objective[j] : 0.0; }

  double reduced_cost(std::size_t j) const {
    if (j >= n_) return -y_[j - n_];
    double d = lp_.objective[j];
    for (std::size_t k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k) {
      d -= y_[lp_.row_index[k]] * lp_.value[k];
    }
    return d;
  }

  void ftran(std::size_t j, std::vector<double>& alpha) const {
    std::fill(alpha.begin(), alpha.end(), 0.0);
    if (j >= n_) {
      const std::size_t c = j - n_;
      for (std::size_t r = 0; r < m_; ++r) alpha[r] = binv_[r * m_ + c];
      return;
    }
    for (std::size_t k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k) {
      const std::size_t c = lp_.row_index[k];
      const double v = lp_.value[k];
      for (std::size_t r = 0; r < m_; ++r) alpha[r] += binv_[r * m_ + c] * v;
    }
  }

  LpStatus iterate(std::size_t budget, std::size_t& iterations) {
    std::vector<double> alpha(m_);
    std::size_t degenerate_run = 0;
    std::size_t since_refresh = 0;
    for (;;) {
      if (iterations >= budget) {
        std::ostringstream os;
        os << "sparse_lp_solve: pivot budget " << budget << " exhausted (rows=" << m_
           << ", cols=" << n_ << ", degenerate run=" << degenerate_run << ")";
        throw NumericalError(os.str());
      }
      if (since_refresh >= kRefreshEvery) {
        refresh();
        since_refresh = 0;
      }
      const bool bland = degenerate_run >= kDegenerateSwitch;
      std::size_t q = kNone;
      double best = kOptTol;
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (pos_[j] != kNone) continue;
        const double d = reduced_cost(j);
        if (d > best) {
          q = j;
          if (bland) break;
          best = d;
        }
      }
      if (q == kNone) return LpStatus::Optimal;
      const double dq = reduced_cost(q);

      ftran(q, alpha);
      std::size_t p = kNone;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m_; ++r) {
        if (alpha[r] <= kPivotTol) continue;
        const double ratio = std::max(0.0, xb_[r]) / alpha[r];
        bool take = ratio < best_ratio - 1e-12;
        if (!take && p != kNone && ratio <= best_ratio + 1e-12) {
          take = bland ? basis_[r] < basis_[p] : alpha[r] > alpha[p];
        }
        if (take) {
          best_ratio = std::min(best_ratio, ratio);
          p = r;
        }
      }
      if (p == kNone) return LpStatus::Unbounded;
      degenerate_run = best_ratio <= kFeasTol ? degenerate_run + 1 : 0;

      const double theta = std::max(0.0, xb_[p]) / alpha[p];
      for (std::size_t r = 0; r < m_; ++r) xb_[r] -= theta * alpha[r];
      xb_[p] = theta;

      double* prow = &binv_[p * m_];
      const double inv = 1.0 / alpha[p];
      for (std::size_t c = 0; c < m_; ++c) prow[c] *= inv;
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == p || alpha[r] == 0.0) continue;
        double* row = &binv_[r * m_];
        const double f = alpha[r];
        for (std::size_t c = 0; c < m_; ++c) row[c] -= f * prow[c];
      }
      for (std::size_t c = 0; c < m_; ++c) y_[c] += dq * prow[c];

      pos_[basis_[p]] = kNone;
      basis_[p] = q;
      pos_[q] = p;
      ++iterations;
      ++since_refresh;
    }
  }

  // Each accepted column saturates a distinct row and only touches rows that
  // were still open, so the basis is triangular after permutation.
  void crash() {
    std::vector<double> residual = lp_.rhs;
    std::vector<char> saturated(m_, 0);
    bool any = false;
    for (std::size_t j : lp_.crash_order) {
      if (j >= n_ || pos_[j] != kNone) continue;
      double x = std::numeric_limits<double>::infinity();
      std::size_t tight = kNone;
      bool ok = lp_.col_start[j] < lp_.col_start[j + 1];
      for (std::size_t k = lp_.col_start[j]; ok && k < lp_.col_start[j + 1]; ++k) {
        const std::size_t r = lp_.row_index[k];
        if (lp_.value[k] <= 0.0 || saturated[r]) {
          ok = false;
          break;
        }
        const double lim = residual[r] / lp_.value[k];
        if (lim < x) {
          x = lim;
          tight = r;
        }
      }
      if (!ok || !(x > 0.0)) continue;
      for (std::size_t k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k) {
        residual[lp_.row_index[k]] -= lp_.value[k] * x;
      }
      residual[tight] = 0.0;
      saturated[tight] = 1;
      pos_[basis_[tight]] = kNone;
      basis_[tight] = j;
      pos_[j] = tight;
      any = true;
    }
    if (any) reinvert();
  }

  // Recompute x_B = B^-1 b and y = c_B B^-1 from the stored inverse.
  void refresh() {
    for (std::size_t r = 0; r < m_; ++r) {
      double s = 0.0;
      const double* row = &binv_[r * m_];
      for (std::size_t c = 0; c < m_; ++c) s += row[c] * lp_.rhs[c];
      xb_[r] = s;
    }
    std::fill(y_.begin(), y_.end(), 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = cost(basis_[r]);
      if (cb == 0.0) continue;
      const double* row = &binv_[r * m_];
      for (std::size_t c = 0; c < m_; ++c) y_[c] += cb * row[c];
    }
  }

  // Primal feasibility of A x <= b, x >= 0 and dual feasibility from scratch.
  bool certify() const {
    std::vector<double> lhs(m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      const std::size_t j = basis_[r];
      if (xb_[r] < -1e-8) return false;
      if (j >= n_) continue;
      for (std::size_t k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k) {
        lhs[lp_.row_index[k]] += lp_.value[k] * xb_[r];
      }
    }
    for (std::size_t r = 0; r < m_; ++r) {
      if (lhs[r] > lp_.rhs[r] + 1e-8 * std::max(1.0, lp_.rhs[r])) return false;
    }
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (pos_[j] == kNone && reduced_cost(j) > 1e-8) return false;
    }
    return true;
  }

  // Rebuild B^-1 from the basic columns by Gauss-Jordan with partial pivoting.
  void reinvert() {
    std::vector<double> b(m_ * m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      const std::size_t j = basis_[r];
      if (j >= n_) {
        b[(j - n_) * m_ + r] = 1.0;
      } else {
        for (std::size_t k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k) {
          b[lp_.row_index[k] * m_ + r] = lp_.value[k];
        }
      }
    }
    std::vector<double> inv(m_ * m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) inv[r * m_ + r] = 1.0;
    for (std::size_t col = 0; col < m_; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < m_; ++r) {
        if (std::abs(b[r * m_ + col]) > std::abs(b[piv * m_ + col])) piv = r;
      }
      if (std::abs(b[piv * m_ + col]) < 1e-14) throw NumericalError("sparse_lp_solve: singular basis");
      if (piv != col) {
        for (std::size_t c = 0; c < m_; ++c) {
          std::swap(b[piv * m_ + c], b[col * m_ + c]);
          std::swap(inv[piv * m_ + c], inv[col * m_ + c]);
        }
      }
      const double d = 1.0 / b[col * m_ + col];
      for (std::size_t c = 0; c < m_; ++c) {
        b[col * m_ + c] *= d;
        inv[col * m_ + c] *= d;
      }
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == col) continue;
        const double f = b[r * m_ + col];
        if (f == 0.0) continue;
        for (std::size_t c = 0; c < m_; ++c) {
          b[r * m_ + c] -= f * b[col * m_ + c];
          inv[r * m_ + c] -= f * inv[col * m_ + c];
        }
      }
    }
    // Row k of B^-1 belongs to basis position k.
    binv_ = std::move(inv);
    refresh();
  }

  const SparseLp& lp_;
  std::size_t m_, n_;
  std::vector<double> binv_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> pos_;
  std::vector<double> xb_;
  std::vector<double> y_;
};

}  // namespace

LpSolution sparse_lp_solve(const SparseLp& problem) {
  if (problem.rhs.size() != problem.num_rows) throw DomainError("sparse_lp_solve: rhs size");
  if (problem.col_start.size() != problem.num_cols() + 1 && problem.num_cols() > 0) {
    throw DomainError("sparse_lp_solve: column index");
  }
  for (double b : problem.rhs) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw DomainError("sparse_lp_solve: rhs must be finite and >= 0");
  }
  if (problem.num_cols() == 0) {
    LpSolution sol;
    sol.status = LpStatus::Optimal;
    sol.duals.assign(problem.num_rows, 0.0);
    return sol;
  }
  RevisedSimplex s(problem);
  return s.solve();
}

}  // namespace mcm
