#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcm/core.hpp"

namespace mcm {

// Integer counts for a sequence of fractional targets, rounded half-to-even
// on the running sum so the counts add up to the rounded total.
std::vector<int> cumulative_round(const std::vector<double>& targets);

Instance gen_hard_i1(int N, int C, double beta, std::optional<std::uint64_t> perm_seed = std::nullopt);
Instance gen_hard_i2(int N, int C, double beta);
Instance gen_hard_i3(int N, int C, double beta);
Instance gen_hard_i4(int N, int C, double beta, double alpha4);
Instance gen_example1(int N);
std::pair<Instance, Instance> gen_footnote_pair();

enum class WindowMode { None, Avg75, Avg25 };
enum class ArrivalPattern { Timestamped, Bursty, Spread };

WindowMode parse_window_mode(const std::string& s);
ArrivalPattern parse_arrival_pattern(const std::string& s);
std::string to_string(WindowMode m);
std::string to_string(ArrivalPattern p);

struct SyntheticParams {
  int n = 50;
  int capacity_min = 1;
  int capacity_max = 20;
  int num_causes = 29;
  std::vector<double> cause_popularity;  // empty => drawn U(0.05, 0.30) per cause
  int max_opp_causes = 3;
  double mu0 = 0.1;
  WindowMode window = WindowMode::None;
  // Internal arrivals before dropping incompatible ones. 0 => chosen so that
  // mu0 * T_int equals the capacity left after external fills.
  int t_int = 0;
  int t_ext = 0;
  // When set, external arrivals are drawn until the EFET reaches this value;
  // t_ext is then ignored.
  std::optional<double> target_beta;
  double ext_share = 0.5;   // fraction of opportunities that receive external traffic
  double zipf_exponent = 1.0;
  double cluster_width = 0.05;  // timestamped pattern only
  ArrivalPattern pattern = ArrivalPattern::Spread;
  std::uint64_t seed = 1;
};

Instance gen_synthetic(const SyntheticParams& params);

// Random tiny instance for oracle checks: n <= 3, T <= 8, c_i <= 3, and at
// most `max_bits` nondegenerate Bernoulli draws. Some carry a cascade.
Instance gen_tiny_random(std::uint64_t seed, int max_bits = 14);

}  // namespace mcm
