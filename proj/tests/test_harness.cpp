#include <gtest/gtest.h>

#include <cmath>

#include "mcm/benchmark.hpp"
#include "mcm/bounds.hpp"
#include "mcm/harness.hpp"
#include "mcm/instances.hpp"
#include "test_util.hpp"

namespace mcm {
namespace {

using testing::internal;
using testing::make_instance;

ExperimentConfig config(std::vector<PolicyKind> policies, int R, BenchmarkKind b = BenchmarkKind::Dlp) {
  ExperimentConfig c;
  c.policies = std::move(policies);
  c.replications = R;
  c.base_seed = 42;
  c.benchmark = b;
  return c;
}

TEST(MonteCarlo, SingleDeterministicReplication) {
  const Instance inst = gen_hard_i1(6, 4, 0.5);
  const ExperimentResult r = monte_carlo(inst, config({PolicyKind::AC, PolicyKind::MSVV}, 1));
  for (const auto& p : r.policies) {
    EXPECT_DOUBLE_EQ(p.mean, policy_value_exact(p.policy, inst));
    EXPECT_DOUBLE_EQ(p.stderr_, 0.0);
    EXPECT_LE(p.ratio, 1.0 + 1e-9);
    ASSERT_EQ(p.mean_filled_int.size(), 6u);
  }
  EXPECT_DOUBLE_EQ(r.benchmark_value, 24.0);
}

TEST(MonteCarlo, AgreesWithExactValue) {
  for (std::uint64_t seed : {3u, 8u, 15u}) {
    const Instance inst = gen_tiny_random(seed);
    const ExperimentResult r = monte_carlo(inst, config({PolicyKind::AC, PolicyKind::MSVV, PolicyKind::RC}, 10000,
                                                        BenchmarkKind::Dp));
    for (const auto& p : r.policies) {
      const double exact = policy_value_exact(p.policy, inst);
      EXPECT_LE(std::abs(p.mean - exact), 4 * p.stderr_ + 1e-12) << seed << policy_id(p.policy);
    }
  }
}

TEST(MonteCarlo, StderrIsSampleStdOverRootR) {
  const Instance inst = gen_tiny_random(21);
  const int R = 500;
  const ExperimentResult r = monte_carlo(inst, config({PolicyKind::AC}, R, BenchmarkKind::None));
  std::vector<double> totals;
  PolicyParams p;
  p.kind = PolicyKind::AC;
  for (int k = 1; k <= R; ++k) {
    Rng rng = replication_rng(42, PolicyKind::AC, static_cast<std::uint64_t>(k));
    totals.push_back(static_cast<double>(simulate_run(p, inst, draw_sample_path(inst, rng)).total));
  }
  double mean = 0;
  for (double t : totals) mean += t;
  mean /= R;
  double ss = 0;
  for (double t : totals) ss += (t - mean) * (t - mean);
  EXPECT_NEAR(r.policies[0].mean, mean, 1e-12);
  EXPECT_NEAR(r.policies[0].stderr_, std::sqrt(ss / (R - 1) / R), 1e-12);
  EXPECT_TRUE(std::isnan(r.policies[0].ratio));
}

// The D-LP bounds expected values, so a sample mean may exceed it only by noise.
TEST(MonteCarlo, RatioToDlpBoundedUpToNoise) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Instance inst = gen_tiny_random(seed);
    std::vector<PolicyKind> ks = {PolicyKind::AC, PolicyKind::MSVV, PolicyKind::RC, PolicyKind::GPG};
    if (inst.cascade) ks.push_back(PolicyKind::ACR);
    const ExperimentResult r = monte_carlo(inst, config(ks, 200));
    for (const auto& p : r.policies) {
      EXPECT_LE(p.ratio, 1.0 + (4 * p.stderr_ + 1e-9) / r.benchmark_value) << seed << policy_id(p.policy);
      if (p.policy != PolicyKind::GPG || inst.num_opportunities() <= 2) {
        EXPECT_LE(policy_value_exact(p.policy, inst), r.benchmark_value + 1e-6) << seed << policy_id(p.policy);
      }
    }
  }
}

TEST(MonteCarlo, IdenticalAcrossThreadCounts) {
  SyntheticParams sp;
  sp.n = 15;
  sp.t_ext = 30;
  sp.seed = 4;
  const Instance inst = gen_synthetic(sp);
  ExperimentConfig c = config({PolicyKind::AC, PolicyKind::GPG, PolicyKind::CP}, 301);
  c.threads = 1;
  const ExperimentResult a = monte_carlo(inst, c);
  c.threads = 4;
  const ExperimentResult b = monte_carlo(inst, c);
  for (std::size_t k = 0; k < a.policies.size(); ++k) {
    EXPECT_EQ(a.policies[k].mean, b.policies[k].mean);
    EXPECT_EQ(a.policies[k].stderr_, b.policies[k].stderr_);
    EXPECT_EQ(a.policies[k].mean_filled_int, b.policies[k].mean_filled_int);
    EXPECT_EQ(a.policies[k].mean_excess, b.policies[k].mean_excess);
  }
}

TEST(MonteCarlo, Errors) {
  EXPECT_THROW(monte_carlo(make_instance({1}, {internal({0.0})}), config({PolicyKind::AC}, 10)), ValidationError);
  EXPECT_THROW(monte_carlo(gen_tiny_random(1), config({PolicyKind::AC}, 0)), ConfigError);
  EXPECT_THROW(monte_carlo(gen_hard_i1(30, 5, 0.5), config({PolicyKind::AC}, 1, BenchmarkKind::Dp)), SizeError);
}

TEST(ReplicationStreams, DependOnPolicyAndIndex) {
  Rng a = replication_rng(1, PolicyKind::AC, 1), b = replication_rng(1, PolicyKind::AC, 1);
  Rng c = replication_rng(1, PolicyKind::MSVV, 1), d = replication_rng(1, PolicyKind::AC, 2);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
}

TEST(MeanRatio, DeltaMethod) {
  PolicyResult num, den;
  num.mean = 2.0;
  num.stderr_ = 0.1;
  den.mean = 4.0;
  den.stderr_ = 0.2;
  const RatioEstimate r = mean_ratio(num, den);
  EXPECT_DOUBLE_EQ(r.ratio, 0.5);
  EXPECT_NEAR(r.stderr_, std::sqrt(std::pow(0.1 / 4, 2) + std::pow(2 * 0.2 / 16, 2)), 1e-15);
}

TEST(Sweep, SingleBetaReducesToMonteCarlo) {
  ExperimentConfig c = config({PolicyKind::AC, PolicyKind::MSVV}, 3);
  auto gen = [](double b) { return gen_hard_i1(10, 4, b); };
  const auto rows = sweep_beta(gen, {0.4}, c);
  const ExperimentResult direct = monte_carlo(gen(0.4), c);
  ASSERT_EQ(rows.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(rows[k].mean, direct.policies[k].mean);
    EXPECT_EQ(rows[k].ratio_dlp, direct.policies[k].ratio);
    EXPECT_DOUBLE_EQ(rows[k].achieved_beta, 0.4);
  }
  const std::string csv = sweep_csv(rows);
  EXPECT_EQ(csv.rfind("beta,policy,mean,stderr,ratio_dlp,achieved_beta\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(Brackets, HardInstanceAc) {
  for (double beta : {0.2, 0.5, 0.8}) {
    const Instance inst = gen_hard_i1(300, 300, beta);
    const ExperimentResult r = monte_carlo(inst, config({PolicyKind::AC}, 1));
    const double ratio = r.policies[0].ratio;
    EXPECT_GE(ratio, ac_lower_deterministic(beta, 300) - 0.02) << beta;
    EXPECT_LE(ratio, hardness_upper(beta) + 0.02) << beta;
  }
}

TEST(Brackets, WarmupInstance) {
  const Instance inst = gen_hard_i2(500, 200, 0.5);
  const ExperimentResult r = monte_carlo(inst, config({PolicyKind::AC, PolicyKind::MSVV}, 1));
  EXPECT_NEAR(r.find(PolicyKind::MSVV)->ratio, warmup_msvv_upper(0.5), 0.03);
  EXPECT_GE(r.find(PolicyKind::AC)->ratio, warmup_ac_lower(0.5, 200) - 0.02);
}

}  // namespace
}  // namespace mcm
