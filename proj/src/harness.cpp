#include "mcm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <thread>

#include "mcm/benchmark.hpp"

namespace mcm {

BenchmarkKind parse_benchmark(const std::string& s) {
  if (s == "dlp") return BenchmarkKind::Dlp;
  if (s == "dp") return BenchmarkKind::Dp;
  if (s == "none") return BenchmarkKind::None;
  throw ConfigError("unknown benchmark '" + s + "'");
}

std::string to_string(BenchmarkKind b) {
  switch (b) {
    case BenchmarkKind::Dlp: return "dlp";
    case BenchmarkKind::Dp: return "dp";
    case BenchmarkKind::None: return "none";
  }
  return "?";
}

const PolicyResult* ExperimentResult::find(PolicyKind k) const {
  for (const auto& p : policies) {
    if (p.policy == k) return &p;
  }
  return nullptr;
}

RatioEstimate mean_ratio(const PolicyResult& num, const PolicyResult& den) {
  RatioEstimate r;
  if (den.mean == 0.0) {
    r.ratio = std::numeric_limits<double>::quiet_NaN();
    r.stderr_ = r.ratio;
    return r;
  }
  r.ratio = num.mean / den.mean;
  const double a = num.stderr_ / den.mean;
  const double b = num.mean * den.stderr_ / (den.mean * den.mean);
  r.stderr_ = std::sqrt(a * a + b * b);
  return r;
}

Rng replication_rng(std::uint64_t base_seed, PolicyKind policy, std::uint64_t r) {
  return make_replication_rng(base_seed, policy_id(policy), r);
}

unsigned default_threads() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

namespace {

// Integer accumulators: sums of integers are exact, so aggregation order and
// thread partitioning cannot change the result.
struct Tally {
  long long sum = 0;
  long long sum_sq = 0;
  std::vector<long long> filled_int, filled_ext, excess;

  explicit Tally(std::size_t n) : filled_int(n, 0), filled_ext(n, 0), excess(n, 0) {}

  void add(const RunResult& r) {
    sum += r.total;
    sum_sq += r.total * r.total;
    for (std::size_t i = 0; i < filled_int.size(); ++i) {
      filled_int[i] += r.filled_int[i];
      filled_ext[i] += r.filled_ext[i];
      excess[i] += r.raw_signups[i] - r.filled_int[i] - r.filled_ext[i];
    }
  }

  void merge(const Tally& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    for (std::size_t i = 0; i < filled_int.size(); ++i) {
      filled_int[i] += o.filled_int[i];
      filled_ext[i] += o.filled_ext[i];
      excess[i] += o.excess[i];
    }
  }
};

Tally run_block(const Instance& instance, const ExperimentConfig& cfg, PolicyKind policy,
                std::uint64_t first, std::uint64_t last) {
  Tally t(instance.num_opportunities());
  PolicyParams params;
  params.kind = policy;
  params.capacity_slack = cfg.capacity_slack;
  for (std::uint64_t r = first; r <= last; ++r) {
    Rng rng = replication_rng(cfg.base_seed, policy, r);
    if (policy == PolicyKind::GPG) params.gpg_y = draw_gpg_y(instance.num_opportunities(), rng);
    const SamplePath path = draw_sample_path(instance, rng);
    t.add(simulate_run(params, instance, path));
  }
  return t;
}

}  // namespace

ExperimentResult monte_carlo(const Instance& instance, const ExperimentConfig& cfg) {
  require_valid(instance);
  if (cfg.replications < 1) throw ConfigError("replications must be >= 1");
  if (cfg.policies.empty()) throw ConfigError("no policies given");

  ExperimentResult out;
  out.benchmark = cfg.benchmark;
  out.replications = cfg.replications;
  switch (cfg.benchmark) {
    case BenchmarkKind::Dlp: out.benchmark_value = dlp_upper_bound(instance); break;
    case BenchmarkKind::Dp: out.benchmark_value = dp_opt_exact(instance); break;
    case BenchmarkKind::None: break;
  }

  const std::size_t n = instance.num_opportunities();
  const auto R = static_cast<std::uint64_t>(cfg.replications);
  const std::uint64_t workers = std::clamp<std::uint64_t>(cfg.threads, 1, R);

  for (PolicyKind policy : cfg.policies) {
    Tally total(n);
    if (workers == 1) {
      total = run_block(instance, cfg, policy, 1, R);
    } else {
      std::vector<Tally> parts(workers, Tally(n));
      std::vector<std::exception_ptr> errors(workers);
      std::vector<std::thread> pool;
      for (std::uint64_t w = 0; w < workers; ++w) {
        const std::uint64_t lo = 1 + R * w / workers;
        const std::uint64_t hi = R * (w + 1) / workers;
        pool.emplace_back([&, w, lo, hi]() {
          try {
            parts[w] = run_block(instance, cfg, policy, lo, hi);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
      for (const auto& p : parts) total.merge(p);
    }

    PolicyResult pr;
    pr.policy = policy;
    const double Rd = static_cast<double>(R);
    pr.mean = static_cast<double>(total.sum) / Rd;
    if (R > 1) {
      const double ss = static_cast<double>(total.sum_sq) - Rd * pr.mean * pr.mean;
      pr.stderr_ = std::sqrt(std::max(0.0, ss / (Rd - 1.0)) / Rd);
    }
    pr.ratio = cfg.benchmark == BenchmarkKind::None || out.benchmark_value == 0.0
                   ? std::numeric_limits<double>::quiet_NaN()
                   : pr.mean / out.benchmark_value;
    for (std::size_t i = 0; i < n; ++i) {
      pr.mean_filled_int.push_back(static_cast<double>(total.filled_int[i]) / Rd);
      pr.mean_filled_ext.push_back(static_cast<double>(total.filled_ext[i]) / Rd);
      pr.mean_excess.push_back(static_cast<double>(total.excess[i]) / Rd);
    }
    out.policies.push_back(std::move(pr));
  }
  return out;
}

std::vector<SweepRow> sweep_beta(const std::function<Instance(double)>& generator,
                                 const std::vector<double>& betas, ExperimentConfig config) {
  std::vector<SweepRow> rows;
  if (config.benchmark != BenchmarkKind::Dlp) config.benchmark = BenchmarkKind::Dlp;
  for (double beta : betas) {
    const Instance inst = generator(beta);
    const double achieved = compute_efet(inst);
    const ExperimentResult res = monte_carlo(inst, config);
    for (const auto& p : res.policies) {
      rows.push_back({beta, p.policy, p.mean, p.stderr_, p.ratio, achieved});
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "beta,policy,mean,stderr,ratio_dlp,achieved_beta\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.10g,%s,%.10f,%.10f,%.10f,%.10f\n", r.beta,
                  std::string(policy_id(r.policy)).c_str(), r.mean, r.stderr_, r.ratio_dlp,
                  r.achieved_beta);
    out += buf;
  }
  return out;
}

}  // namespace mcm
