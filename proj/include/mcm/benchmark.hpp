#pragma once

#include <cstddef>

#include "mcm/algorithms.hpp"
#include "mcm/core.hpp"
#include "mcm/lp.hpp"

namespace mcm {

inline constexpr double kDpStateLimit = 1e6;
inline constexpr int kEnumerationBitLimit = 22;

struct DlpResult {
  double value = 0.0;
  double dual_value = 0.0;
  // Dual objective rebuilt from the opportunity prices alone, with volunteer
  // prices set to their smallest feasible values. Always >= the LP optimum.
  double reconstructed_dual = 0.0;
  std::size_t rows = 0;
  std::size_t columns = 0;
  std::size_t iterations = 0;
};

// Fractional matching upper bound. Identical volunteers are merged into one
// class whose row carries their multiplicity; this leaves the optimum
// unchanged. External coefficients use ext_signup_prob.
DlpResult solve_dlp(const Instance& instance);
double dlp_upper_bound(const Instance& instance);

// Per-volunteer D-LP as a dense problem (no aggregation, zero-mu pairs kept
// out). Only suitable for small instances; used to cross-check solve_dlp.
LpProblem build_dlp_dense(const Instance& instance);

double dp_opt_exact(const Instance& instance);

// Exact expectation of simulate_run(...).total over every sample path.
double policy_value_exact(PolicyKind policy, const Instance& instance, int capacity_slack = 0);

// Same, for a fixed GPG weight vector (or any non-GPG policy).
double policy_value_exact_fixed(const PolicyParams& params, const Instance& instance);

// Number of nondegenerate Bernoulli draws (0 < p < 1) the enumeration visits.
int enumeration_bits(const Instance& instance);

// P(w(Y2) <= x w(Y1)) for independent uniforms, w(y) = 1 - exp(y - 1).
double gpg_ratio_cdf(double x);

}  // namespace mcm
