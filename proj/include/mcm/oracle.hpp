#pragma once

#include <cstdint>

#include "json.hpp"

namespace mcm {

struct OracleConfig {
  std::uint64_t seed = 1;
  int trials = 50;
  int mc_replications = 10000;
  unsigned threads = 1;
  int capacity_slack = 0;  // fault injection only
};

struct OracleReport {
  bool passed = true;
  nlohmann::json json;
};

// Random tiny instances checked for
//   policy_value_exact <= dp_opt_exact <= dlp_upper_bound + 1e-6,
// agreement of the aggregated and per-volunteer D-LP solves, and
// |Monte-Carlo mean - exact| <= 4 stderr for every applicable policy (or a
// rare-event allowance when every replication returned the same total).
OracleReport run_oracle_check(const OracleConfig& config);

}  // namespace mcm
