// One PASS/FAIL line per acceptance criterion. Exit status is non-zero if any fails.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mcm/benchmark.hpp"
#include "mcm/bounds.hpp"
#include "mcm/harness.hpp"
#include "mcm/instances.hpp"
#include "mcm/oracle.hpp"

namespace {

using namespace mcm;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.2f s, limit %.0f s%s)\n", pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs,
              limit_s, in_time ? "" : ", exceeded");
  std::fflush(stdout);
}

ExperimentConfig experiment(std::vector<PolicyKind> policies, int R, std::uint64_t seed) {
  ExperimentConfig c;
  c.policies = std::move(policies);
  c.replications = R;
  c.base_seed = seed;
  c.benchmark = BenchmarkKind::Dlp;
  c.threads = default_threads();
  return c;
}

Outcome formulas() {
  const long double e = std::exp(1.0L);
  double worst = 0.0;
  auto check = [&](double got, long double want) { worst = std::max(worst, static_cast<double>(std::fabs(got - want))); };
  check(psi(0.0), 1.0L - 1.0L / e);
  check(hardness_upper(0.5), 1.0L + 0.5L * std::log(0.5L));
  for (int k = 0; k <= 1000; ++k) {
    const long double b = k / 1000.0L;
    check(warmup_upper(static_cast<double>(b)), b + (1.0L - b) * (1.0L - 1.0L / e));
  }
  return {worst <= 1e-12, fmt("max abs error %.2e against long double evaluation", worst)};
}

Outcome hard_bracket() {
  Outcome o;
  std::string parts;
  for (double beta : {0.0, 0.2, 1.0 / std::exp(1.0), 0.5, 0.8}) {
    const Instance inst = gen_hard_i1(300, 300, beta);
    const ExperimentResult r = monte_carlo(inst, experiment({PolicyKind::AC}, 1, 1));
    const double ratio = r.policies[0].ratio;
    const double lo = ac_lower_deterministic(beta, 300) - 0.02, hi = hardness_upper(beta) + 0.02;
    const bool ok = ratio >= lo && ratio <= hi;
    o.pass = o.pass && ok;
    parts += fmt("%sbeta=%.4f %.4f in [%.4f, %.4f]", parts.empty() ? "" : "; ", beta, ratio, lo, hi);
  }
  o.detail = parts;
  return o;
}

Outcome warmup() {
  const Instance inst = gen_hard_i2(500, 200, 0.5);
  const ExperimentResult r = monte_carlo(inst, experiment({PolicyKind::MSVV, PolicyKind::AC}, 1, 1));
  const double msvv = r.find(PolicyKind::MSVV)->ratio, ac = r.find(PolicyKind::AC)->ratio;
  const double target = warmup_msvv_upper(0.5), ac_lo = warmup_ac_lower(0.5, 200) - 0.02;
  return {std::abs(msvv - target) <= 0.03 && ac >= ac_lo,
          fmt("achieved beta %.4f; MSVV %.4f vs %.4f +- 0.03; AC %.4f >= %.4f", compute_efet(inst), msvv, target, ac,
              ac_lo)};
}

Outcome example_one() {
  const Instance inst = gen_example1(2000);
  const ExperimentResult r = monte_carlo(inst, experiment({PolicyKind::AC}, 200, 1));
  const double ratio = r.policies[0].ratio, target = 1.0 - std::exp(-1.0);
  return {std::abs(ratio - target) <= 0.01,
          fmt("mean ratio %.5f (stderr %.2e), target %.5f +- 0.01", ratio, r.policies[0].stderr_ / r.benchmark_value,
              target)};
}

Outcome footnote() {
  const auto [first, second] = gen_footnote_pair();
  double worst = 1e9;
  for (const Instance* inst : {&first, &second}) {
    worst = std::min(worst, policy_value_exact(PolicyKind::AC, *inst) / dp_opt_exact(*inst));
  }
  return {worst == 0.5, fmt("min AC/DP = %.17g", worst)};
}

Outcome sandwich() {
  OracleConfig cfg;
  cfg.seed = 1;
  cfg.trials = 50;
  cfg.mc_replications = 10000;
  cfg.threads = default_threads();
  const OracleReport clean = run_oracle_check(cfg);
  double worst_z = 0.0, min_margin = 1e9;
  for (const auto& t : clean.json["results"]) {
    min_margin = std::min(min_margin, t["dlp_margin"].get<double>());
    for (const auto& [id, p] : t["policies"].items()) {
      worst_z = std::max(worst_z, p["mc_z"].get<double>());
      min_margin = std::min(min_margin, p["sandwich_margin"].get<double>());
    }
  }
  // The same checks must reject a capacity cap that is off by one.
  cfg.capacity_slack = 1;
  cfg.mc_replications = 1000;
  const OracleReport faulty = run_oracle_check(cfg);
  return {clean.passed && !faulty.passed,
          fmt("%d/50 trials failed; min margin %.3g; max |z| %.2f; off-by-one cap flagged in %d trials",
              clean.json["failures"].get<int>(), min_margin, worst_z, faulty.json["failures"].get<int>())};
}

Outcome general_curve() {
  Outcome o;
  EnvelopeEvaluator env(400);
  double prev = -1.0, worst_gap = 1e9;
  bool monotone = true, above_beta = true, near_hardness = true;
  double at_zero = 0.0;
  for (int k = 0; k <= 50; ++k) {
    BoundQuery q;
    q.beta = k / 50.0;
    q.envelope_grid = 400;
    const double v = ac_lower_general_detail(q, env).value;
    if (k == 0) at_zero = v;
    monotone = monotone && v >= prev - 1e-12;
    above_beta = above_beta && v >= q.beta;
    worst_gap = std::min(worst_gap, v - hardness_upper(q.beta));
    near_hardness = near_hardness && v >= hardness_upper(q.beta) - 0.02;
    prev = v;
  }
  const double base_ok = at_zero >= 1.0 - std::exp(-1.0) - 0.005;
  std::vector<double> by_sigma;
  bool sigma_monotone = true;
  for (double sigma : {1.0, 1.5, std::exp(1.0) - 1.0, 10.0}) {
    BoundQuery q;
    q.beta = 0.7;
    q.sigma = sigma;
    q.envelope_grid = 400;
    by_sigma.push_back(ac_lower_general_detail(q, env).value);
    if (by_sigma.size() > 1) sigma_monotone = sigma_monotone && by_sigma.back() <= by_sigma[by_sigma.size() - 2] + 1e-12;
  }
  o.pass = monotone && above_beta && base_ok && near_hardness && sigma_monotone;
  o.detail = fmt("monotone=%d >=beta=%d f(0)=%.5f min(f-hardness)=%.4f sigma@0.7: %.4f %.4f %.4f %.4f; %zu LPs",
                 monotone, above_beta, at_zero, worst_gap, by_sigma[0], by_sigma[1], by_sigma[2], by_sigma[3],
                 env.lp_solves());
  return o;
}

Outcome separation() {
  bool below = true;
  double max_gap = 0.0, at = 0.0;
  for (int k = 40; k <= 99; ++k) {
    const double beta = k / 100.0;
    const double m = msvv_general_upper(beta), a = ac_lower_deterministic(beta, kInf);
    below = below && m < a;
    const double gap = a / m - 1.0;
    if (gap > max_gap) {
      max_gap = gap;
      at = beta;
    }
  }
  return {below && max_gap >= 0.04 && max_gap <= 0.07,
          fmt("strictly below on [0.40, 0.99]: %d; max multiplicative gap %.4f at beta=%.2f", below, max_gap, at)};
}

Outcome synthetic_patterns() {
  Outcome o;
  std::string parts;
  for (ArrivalPattern pat : {ArrivalPattern::Bursty, ArrivalPattern::Spread}) {
    for (double beta : {0.35, 0.45}) {
      SyntheticParams p;
      p.n = 50;
      p.ext_share = 0.8;
      p.target_beta = beta;
      p.pattern = pat;
      p.seed = 7;
      const Instance inst = gen_synthetic(p);
      const double achieved = compute_efet(inst);
      const ExperimentResult r = monte_carlo(inst, experiment({PolicyKind::AC, PolicyKind::MSVV}, 2000, 7));
      const RatioEstimate q = mean_ratio(*r.find(PolicyKind::AC), *r.find(PolicyKind::MSVV));
      const bool ok = pat == ArrivalPattern::Bursty ? (achieved >= 0.35 && q.ratio > 1.0) : q.ratio <= 1.0 + 2 * q.stderr_;
      o.pass = o.pass && ok;
      parts += fmt("%s%s beta=%.3f AC/MSVV=%.4f+-%.4f", parts.empty() ? "" : "; ", to_string(pat).c_str(), achieved,
                   q.ratio, q.stderr_);
    }
  }
  o.detail = parts;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int sh(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  const fs::path dir = fs::temp_directory_path() / ("mcm_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string cli = MCM_CLI_PATH;
  const std::string q = " >/dev/null 2>&1";
  struct Job {
    std::string name, args, out;
  };
  const std::string syn = (dir / "syn.json").string(), ex1 = (dir / "ex1.json").string();
  if (sh(cli + " gen --family synthetic --n 50 --ext-share 0.8 --beta 0.4 --pattern bursty --seed 7 --out " + syn + q) != 0 ||
      sh(cli + " gen --family example1 --n 2000 --out " + ex1 + q) != 0) {
    fs::remove_all(dir);
    return {false, "instance generation failed"};
  }
  const std::vector<Job> jobs = {
      {"bounds", "bounds --bounds all --beta-grid 0:1:0.1 --grid-m 100", "csv"},
      {"run-synthetic", "run --instance " + syn + " --policies ac,msvv,gpg,rc --reps 300 --seed 7", "json"},
      {"run-example1", "run --instance " + ex1 + " --policies ac --reps 200 --seed 1", "json"},
      {"sweep", "sweep --family synthetic --n 20 --ext-share 0.8 --pattern spread --betas 0.2:0.4:0.2 --reps 100 --seed 3",
       "csv"},
      {"oracle-check", "oracle-check --seed 1 --trials 5 --reps 2000", "json"},
  };
  Outcome o;
  std::string parts;
  for (const auto& j : jobs) {
    std::string first;
    bool same = true;
    for (int threads : {1, 4}) {
      const fs::path out = dir / (j.name + "_" + std::to_string(threads) + "." + j.out);
      const int rc = sh(cli + " " + j.args + " --threads " + std::to_string(threads) + " --out " + out.string() + q);
      std::string bytes = slurp(out);
      if (j.name.rfind("run", 0) == 0) {
        fs::path csv = out;
        csv.replace_extension(".csv");
        bytes += slurp(csv);
      }
      if (rc != 0 || bytes.empty()) same = false;
      if (threads == 1) first = bytes;
      else same = same && bytes == first;
    }
    o.pass = o.pass && same;
    parts += fmt("%s%s %s", parts.empty() ? "" : "; ", j.name.c_str(), same ? "identical" : "DIFFERENT");
  }
  fs::remove_all(dir);
  o.detail = parts + " (threads 1 vs 4)";
  return o;
}

}  // namespace

int main() {
  criterion(1, "psi and closed-form bounds", 1, formulas);
  criterion(2, "AC bracket on I1(300,300)", 60, hard_bracket);
  criterion(3, "MSVV and AC on I2(500,200,0.5)", 60, warmup);
  criterion(4, "Example 1 tightness", 120, example_one);
  criterion(5, "footnote pair worst ratio", 1, footnote);
  criterion(6, "oracle sandwich on 50 tiny instances", 300, sandwich);
  criterion(7, "general AC bound curve (m=400)", 600, general_curve);
  criterion(8, "MSVV upper below AC lower", 30, separation);
  criterion(9, "bursty vs spread external traffic", 600, synthetic_patterns);
  criterion(10, "byte-identical output across thread counts", 600, determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
