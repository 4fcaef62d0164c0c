#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mcm/algorithms.hpp"
#include "mcm/core.hpp"

namespace mcm {

enum class BenchmarkKind { Dlp, Dp, None };

BenchmarkKind parse_benchmark(const std::string& s);
std::string to_string(BenchmarkKind b);

struct ExperimentConfig {
  std::vector<PolicyKind> policies;
  int replications = 1;
  std::uint64_t base_seed = 1;
  BenchmarkKind benchmark = BenchmarkKind::Dlp;
  unsigned threads = 1;
  int capacity_slack = 0;  // fault injection only
};

struct PolicyResult {
  PolicyKind policy = PolicyKind::AC;
  double mean = 0.0;
  double stderr_ = 0.0;
  double ratio = 0.0;  // mean / benchmark; NaN without a benchmark
  std::vector<double> mean_filled_int;
  std::vector<double> mean_filled_ext;
  std::vector<double> mean_excess;
};

struct ExperimentResult {
  BenchmarkKind benchmark = BenchmarkKind::None;
  double benchmark_value = 0.0;
  int replications = 0;
  std::vector<PolicyResult> policies;

  const PolicyResult* find(PolicyKind k) const;
};

struct RatioEstimate {
  double ratio = 0.0;
  double stderr_ = 0.0;
};

// Ratio of two independent means with a delta-method standard error.
RatioEstimate mean_ratio(const PolicyResult& num, const PolicyResult& den);

// Replication r (1-based) of `policy` draws from this engine: GPG weights
// first when applicable, then the sample path.
Rng replication_rng(std::uint64_t base_seed, PolicyKind policy, std::uint64_t r);

ExperimentResult monte_carlo(const Instance& instance, const ExperimentConfig& config);

struct SweepRow {
  double beta;
  PolicyKind policy;
  double mean;
  double stderr_;
  double ratio_dlp;
  double achieved_beta;
};

std::vector<SweepRow> sweep_beta(const std::function<Instance(double)>& generator,
                                 const std::vector<double>& betas, ExperimentConfig config);

std::string sweep_csv(const std::vector<SweepRow>& rows);

unsigned default_threads();

}  // namespace mcm
