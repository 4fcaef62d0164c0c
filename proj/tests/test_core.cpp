#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "mcm/core.hpp"
#include "mcm/instances.hpp"
#include "mcm/json_io.hpp"
#include "test_util.hpp"

namespace mcm {
namespace {

using testing::ext;
using testing::internal;
using testing::make_instance;

TEST(Psi, EndpointsAndMidpoint) {
  EXPECT_DOUBLE_EQ(psi(1.0), 0.0);
  EXPECT_NEAR(psi(0.0), static_cast<double>(1.0L - 1.0L / std::exp(1.0L)), 1e-15);
  EXPECT_NEAR(psi(0.5), static_cast<double>(1.0L - std::exp(-0.5L)), 1e-15);
  EXPECT_NEAR(psi(0.5), 0.393469, 1e-6);
}

TEST(Psi, RejectsOutOfDomain) {
  EXPECT_THROW(psi(-1e-9), DomainError);
  EXPECT_THROW(psi(1.0 + 1e-9), DomainError);
  EXPECT_THROW(psi(std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST(Psi, StrictlyDecreasing) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    double a = u(rng), b = u(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    EXPECT_GT(psi(a), psi(b));
  }
}

TEST(Psi, CapacityRecurrence) {
  for (int c = 1; c <= 60; ++c) {
    for (int k = 1; k <= c; ++k) {
      const double lhs = 1.0 - psi((k - 1.0) / c);
      const double rhs = std::exp(-1.0 / c) * (1.0 - psi(static_cast<double>(k) / c));
      EXPECT_NEAR(lhs, rhs, 1e-12) << "c=" << c << " k=" << k;
    }
  }
}

TEST(Efet, SmallExamples) {
  EXPECT_DOUBLE_EQ(compute_efet(make_instance({1, 1}, {ext(1)})), 0.5);
  std::vector<Volunteer> eight(8, ext(1));
  EXPECT_DOUBLE_EQ(compute_efet(make_instance({5}, eight)), 1.0);
}

TEST(Efet, HardInstanceMatchesTargetCount) {
  const Instance inst = gen_hard_i1(4, 2, 0.5);
  std::vector<int> targets(4, 0);
  for (const auto& v : inst.arrivals) {
    if (v.is_external()) ++targets[v.target - 1];
  }
  double filled = 0;
  for (int i = 0; i < 4; ++i) filled += std::min(2, targets[i]);
  EXPECT_DOUBLE_EQ(filled / 8.0, 0.5);
  EXPECT_DOUBLE_EQ(compute_efet(inst), 0.5);
}

TEST(Efet, UsesTargetingCountsNotProbabilities) {
  EXPECT_DOUBLE_EQ(compute_efet(make_instance({1, 1}, {ext(1, 0.2)})), 0.5);
}

TEST(Efet, EmptyInstanceIsDomainError) {
  EXPECT_THROW(compute_efet(Instance{}), DomainError);
}

TEST(Efet, Properties) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    Instance inst = gen_tiny_random(seed);
    const double b = compute_efet(inst);
    EXPECT_GE(b, 0.0);
    EXPECT_LE(b, 1.0);

    Instance more_ext = inst;
    more_ext.arrivals.push_back(ext(static_cast<OppId>(1 + seed % inst.num_opportunities())));
    more_ext.arrivals.back().t = static_cast<int>(more_ext.arrivals.size());
    more_ext.cascade.reset();
    EXPECT_GE(compute_efet(more_ext), b);

    Instance more_int = inst;
    more_int.arrivals.push_back(internal(std::vector<double>(inst.num_opportunities(), 0.5)));
    more_int.arrivals.back().t = static_cast<int>(more_int.arrivals.size());
    more_int.cascade.reset();
    EXPECT_DOUBLE_EQ(compute_efet(more_int), b);
  }
}

TEST(Mcpr, Examples) {
  EXPECT_DOUBLE_EQ(compute_mcpr(make_instance({1, 1}, {internal({0.1, 0.0}), internal({0.1, 0.1})})), 1.0);
  EXPECT_DOUBLE_EQ(compute_mcpr(make_instance({1, 1, 1}, {internal({1.0, 0.25, 0.0})})), 4.0);
  EXPECT_DOUBLE_EQ(compute_mcpr(make_instance({1}, {ext(1)})), 1.0);
}

TEST(Mcpr, SubnormalGivesInfinity) {
  const double tiny = std::numeric_limits<double>::denorm_min();
  EXPECT_TRUE(std::isinf(compute_mcpr(make_instance({1, 1}, {internal({1.0, tiny})}))));
}

TEST(Mcpr, ScaleInvariant) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Instance inst = gen_tiny_random(seed);
    const double gamma = u(rng);
    Instance scaled = inst;
    for (auto& v : scaled.arrivals) {
      for (auto& m : v.mu) m *= gamma;
    }
    EXPECT_NEAR(compute_mcpr(scaled), compute_mcpr(inst), 1e-9 * compute_mcpr(inst));
  }
}

// The ratio at the last internal arrival is 1 / mu_2(N), which grows linearly in N.
TEST(Mcpr, ExampleOneGrowsWithN) {
  auto oracle = [](int N) {
    const long double e = std::exp(1.0L);
    const long double mu2 = (1.0L - std::exp(static_cast<long double>(N - 1) / N - 1.0L)) / (1.0L - 1.0L / e) -
                            1.0L / (2.0L * N);
    return static_cast<double>(1.0L / mu2);
  };
  double prev = 0.0;
  for (int N : {100, 200, 400, 1000}) {
    const double s = compute_mcpr(gen_example1(N));
    EXPECT_NEAR(s, oracle(N), 1e-9 * oracle(N)) << N;
    EXPECT_GT(s, 0.9 * N);
    EXPECT_GT(s, prev);
    prev = s;
  }
}

TEST(Validate, WellFormed) {
  EXPECT_TRUE(validate_instance(make_instance({2, 1}, {ext(1), internal({0.3, 0.0})})).empty());
}

bool has_code(const std::vector<Violation>& v, const std::string& code) {
  for (const auto& x : v) {
    if (x.code == code) return true;
  }
  return false;
}

TEST(Validate, ReportsViolations) {
  EXPECT_TRUE(has_code(validate_instance(make_instance({1, 1}, {ext(kDummy)})), "external without target"));
  EXPECT_TRUE(has_code(validate_instance(make_instance({1, 1}, {internal({0.5})})), "conversion length mismatch"));
  EXPECT_TRUE(has_code(validate_instance(make_instance({1}, {ext(3)})), "unknown target"));
  EXPECT_TRUE(has_code(validate_instance(make_instance({1}, {internal({0.0})})),
                       "internal without compatible opportunity"));
  EXPECT_TRUE(has_code(validate_instance(make_instance({0}, {})), "non-positive capacity"));
  Instance bad_id = make_instance({1, 1}, {});
  bad_id.opportunities[1].id = 5;
  EXPECT_TRUE(has_code(validate_instance(bad_id), "non-contiguous ids"));
  Instance casc = make_instance({1}, {internal({1.0})});
  casc.cascade = CascadeParams{{0.0}, {0.0}, 1};
  EXPECT_TRUE(has_code(validate_instance(casc), "cascade view_prob zero"));
  EXPECT_THROW(require_valid(casc), ValidationError);
}

TEST(Json, ParsesDocumentedSchema) {
  const auto j = nlohmann::json::parse(
      R"({"opportunities":[{"id":1,"capacity":5},{"id":2,"capacity":1}],"arrivals":[{"t":1,"source":"ext","target":1,"ext_signup_prob":1.0},{"t":2,"source":"int","mu":[0.1,0.0]}],"cascade":null,"recency":[2.0,1.0]})");
  const Instance inst = instance_from_json(j);
  ASSERT_EQ(inst.num_opportunities(), 2u);
  EXPECT_EQ(inst.capacity(1), 5);
  EXPECT_TRUE(inst.arrivals[0].is_external());
  EXPECT_EQ(inst.arrivals[0].target, 1);
  EXPECT_EQ(inst.arrivals[1].mu, (std::vector<double>{0.1, 0.0}));
  EXPECT_FALSE(inst.cascade.has_value());
  ASSERT_TRUE(inst.recency.has_value());
  EXPECT_TRUE(validate_instance(inst).empty());
}

TEST(Json, RoundTrip) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Instance a = gen_tiny_random(seed);
    const Instance b = instance_from_json(nlohmann::json::parse(to_json(a).dump()));
    EXPECT_EQ(to_json(a), to_json(b));
  }
}

TEST(Json, MalformedIsValidationError) {
  EXPECT_THROW(instance_from_json(nlohmann::json::parse(R"({"arrivals":[]})")), ValidationError);
  EXPECT_THROW(instance_from_json(nlohmann::json::parse(
                   R"({"opportunities":[{"id":1,"capacity":1}],"arrivals":[{"t":1,"source":"web"}]})")),
               ValidationError);
}

}  // namespace
}  // namespace mcm
