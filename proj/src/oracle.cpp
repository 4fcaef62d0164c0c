#include "mcm/oracle.hpp"

#include <cmath>

#include "mcm/benchmark.hpp"
#include "mcm/harness.hpp"
#include "mcm/instances.hpp"
#include "mcm/json_io.hpp"
#include "mcm/rng.hpp"

namespace mcm {

namespace {

constexpr double kSandwichTol = 1e-6;
constexpr double kExactTol = 1e-9;
constexpr double kMcSigmas = 4.0;
// With zero sample variance an event of probability p is missed in R draws
// with chance (1-p)^R; accept deviations up to total_capacity * kRareEvent / R.
constexpr double kRareEvent = 10.0;

std::vector<PolicyKind> applicable_policies(const Instance& inst) {
  std::vector<PolicyKind> out = {PolicyKind::AC, PolicyKind::MSVV, PolicyKind::RC};
  if (inst.recency) {
    out.push_back(PolicyKind::CP);
    out.push_back(PolicyKind::SCP);
  }
  if (inst.num_opportunities() <= 2) out.push_back(PolicyKind::GPG);
  if (inst.cascade) out.push_back(PolicyKind::ACR);
  return out;
}

}  // namespace

OracleReport run_oracle_check(const OracleConfig& cfg) {
  OracleReport report;
  nlohmann::json trials = nlohmann::json::array();
  int failures = 0;
  for (int k = 0; k < cfg.trials; ++k) {
    const std::uint64_t trial_seed = splitmix64(cfg.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(k + 1)));
    const Instance inst = gen_tiny_random(trial_seed);
    nlohmann::json t;
    t["trial"] = k;
    t["seed"] = trial_seed;
    t["n"] = inst.num_opportunities();
    t["T"] = inst.horizon();
    t["cascade"] = inst.cascade.has_value();

    const double dp = dp_opt_exact(inst);
    const double dlp = dlp_upper_bound(inst);
    const LpSolution dense = lp_solve(build_dlp_dense(inst));
    t["dp_opt"] = dp;
    t["dlp"] = dlp;
    t["dlp_dense"] = dense.value;
    std::vector<std::string> problems;
    if (dense.status != LpStatus::Optimal || std::abs(dense.value - dlp) > kSandwichTol) {
      problems.push_back("aggregated and per-volunteer D-LP disagree");
    }
    if (dp > dlp + kSandwichTol) problems.push_back("dp_opt_exact exceeds dlp_upper_bound");

    nlohmann::json pol = nlohmann::json::object();
    for (PolicyKind p : applicable_policies(inst)) {
      const double exact = policy_value_exact(p, inst, cfg.capacity_slack);
      ExperimentConfig ec;
      ec.policies = {p};
      ec.replications = cfg.mc_replications;
      ec.base_seed = trial_seed;
      ec.benchmark = BenchmarkKind::None;
      ec.threads = cfg.threads;
      ec.capacity_slack = cfg.capacity_slack;
      const PolicyResult mc = monte_carlo(inst, ec).policies.front();
      const double dev = std::abs(mc.mean - exact);
      double total_cap = 0.0;
      for (const auto& o : inst.opportunities) total_cap += o.capacity;
      const double allowed = mc.stderr_ > 0.0 ? kMcSigmas * mc.stderr_
                                              : kExactTol + total_cap * kRareEvent / cfg.mc_replications;
      const std::string id(policy_id(p));
      pol[id] = {{"exact", exact},
                 {"sandwich_margin", dp - exact},
                 {"mc_mean", mc.mean},
                 {"mc_stderr", mc.stderr_},
                 {"mc_z", mc.stderr_ > 0.0 ? dev / mc.stderr_ : 0.0}};
      if (exact > dp + kExactTol) problems.push_back(id + ": exact value exceeds dp_opt_exact");
      if (dev > allowed) problems.push_back(id + ": Monte-Carlo mean outside 4 stderr of exact value");
    }
    t["policies"] = pol;
    t["dlp_margin"] = dlp - dp;
    t["passed"] = problems.empty();
    if (!problems.empty()) {
      t["problems"] = problems;
      ++failures;
    }
    trials.push_back(std::move(t));
  }
  report.passed = failures == 0;
  report.json = {{"seed", cfg.seed},
                 {"trials", cfg.trials},
                 {"mc_replications", cfg.mc_replications},
                 {"failures", failures},
                 {"passed", report.passed},
                 {"results", std::move(trials)}};
  return report;
}

}  // namespace mcm
