#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mcm/benchmark.hpp"
#include "mcm/bounds.hpp"
#include "mcm/core.hpp"
#include "mcm/harness.hpp"
#include "mcm/instances.hpp"
#include "mcm/json_io.hpp"
#include "mcm/oracle.hpp"
#include "mcm/version.hpp"

namespace {

using nlohmann::json;

enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kNumerical = 3, kOracleFailure = 4 };

// Recorded in every output file. --threads and --out are left out so that
// reruns that differ only in parallelism or destination produce identical bytes.
std::string command_line(int argc, char** argv) {
  std::string out = "mcm";
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--threads" || a == "--out" || a == "--csv") {
      ++i;
      continue;
    }
    if (a.rfind("--threads=", 0) == 0 || a.rfind("--out=", 0) == 0 || a.rfind("--csv=", 0) == 0) continue;
    out += ' ';
    out += a;
  }
  return out;
}

std::string version_line(const std::string& cmd) {
  return std::string("# version ") + mcm::kVersion + " " + cmd + "\n";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw mcm::ConfigError("cannot write " + path);
  out << text;
}

double parse_extended(const std::string& s, const char* what) {
  if (s == "inf" || s == "infinity") return mcm::kInf;
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw mcm::ConfigError(std::string("bad value for ") + what + ": '" + s + "'");
  }
}

std::string csv_path_for(const std::string& json_path) {
  const auto dot = json_path.find_last_of('.');
  const auto slash = json_path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return json_path + ".csv";
  return json_path.substr(0, dot) + ".csv";
}

struct FamilyArgs {
  std::string family;
  int n = 0;
  int c = 0;
  std::optional<double> beta;
  double alpha4 = 0.5;
  std::optional<std::uint64_t> seed;
  mcm::SyntheticParams synth;
  std::string popularity;
  std::string window = "none";
  std::string pattern = "spread";
  std::optional<double> cascade_view;
  double cascade_exit = 0.0;
  int cascade_k = 1;
};

void add_family_options(CLI::App* sub, FamilyArgs& a, bool with_beta) {
  sub->add_option("--family", a.family, "i1|i2|i3|i4|example1|footnote|synthetic")->required();
  sub->add_option("--n", a.n, "size parameter N (number of opportunities for synthetic)");
  sub->add_option("--c", a.c, "capacity C");
  if (with_beta) sub->add_option("--beta", a.beta, "EFET target");
  sub->add_option("--alpha4", a.alpha4, "i4 split parameter");
  sub->add_option("--seed", a.seed, "generator seed");
  sub->add_option("--cap-min", a.synth.capacity_min, "synthetic minimum capacity");
  sub->add_option("--cap-max", a.synth.capacity_max, "synthetic maximum capacity");
  sub->add_option("--causes", a.synth.num_causes, "synthetic number of cause areas");
  sub->add_option("--popularity", a.popularity, "comma-separated cause popularities");
  sub->add_option("--max-opp-causes", a.synth.max_opp_causes, "causes per opportunity upper limit");
  sub->add_option("--mu0", a.synth.mu0, "synthetic conversion scale");
  sub->add_option("--window", a.window, "none|avg75|avg25");
  sub->add_option("--t-int", a.synth.t_int, "internal arrivals (0 = auto)");
  sub->add_option("--t-ext", a.synth.t_ext, "external arrivals when no --beta is given");
  sub->add_option("--ext-share", a.synth.ext_share, "fraction of opportunities with external traffic");
  sub->add_option("--zipf", a.synth.zipf_exponent, "external popularity exponent");
  sub->add_option("--cluster-width", a.synth.cluster_width, "timestamped cluster width");
  sub->add_option("--pattern", a.pattern, "spread|bursty|timestamped");
  sub->add_option("--cascade-view", a.cascade_view, "attach a cascade with this view probability");
  sub->add_option("--cascade-exit", a.cascade_exit, "cascade exit probability");
  sub->add_option("--cascade-k", a.cascade_k, "cascade list length");
}

void require_positive(int v, const char* name) {
  if (v < 1) throw mcm::ConfigError(std::string("--") + name + " must be >= 1");
}

void attach_cascade(const FamilyArgs& a, mcm::Instance& inst) {
  if (!a.cascade_view) return;
  const std::size_t T = inst.arrivals.size();
  inst.cascade = mcm::CascadeParams{std::vector<double>(T, *a.cascade_view),
                                    std::vector<double>(T, a.cascade_exit), a.cascade_k};
  mcm::require_valid(inst);
}

// Single-instance families; `beta` overrides --beta when given.
mcm::Instance make_family_instance(const FamilyArgs& a, std::optional<double> beta) {
  const std::string& f = a.family;
  if (!beta) beta = a.beta;
  auto need_beta = [&]() {
    if (!beta) throw mcm::ConfigError("--beta is required for family " + f);
    return *beta;
  };
  mcm::Instance inst;
  if (f == "i1" || f == "i2" || f == "i3" || f == "i4") {
    require_positive(a.n, "n");
    require_positive(a.c, "c");
    const double b = need_beta();
    if (f == "i1") inst = mcm::gen_hard_i1(a.n, a.c, b, a.seed);
    if (f == "i2") inst = mcm::gen_hard_i2(a.n, a.c, b);
    if (f == "i3") inst = mcm::gen_hard_i3(a.n, a.c, b);
    if (f == "i4") inst = mcm::gen_hard_i4(a.n, a.c, b, a.alpha4);
  } else if (f == "example1") {
    require_positive(a.n, "n");
    inst = mcm::gen_example1(a.n);
  } else if (f == "synthetic") {
    mcm::SyntheticParams p = a.synth;
    if (a.n > 0) p.n = a.n;
    p.window = mcm::parse_window_mode(a.window);
    p.pattern = mcm::parse_arrival_pattern(a.pattern);
    if (a.seed) p.seed = *a.seed;
    p.target_beta = beta;
    if (!a.popularity.empty()) {
      std::stringstream ss(a.popularity);
      std::string tok;
      while (std::getline(ss, tok, ',')) p.cause_popularity.push_back(parse_extended(tok, "--popularity"));
    }
    inst = mcm::gen_synthetic(p);
  } else if (f == "footnote") {
    throw mcm::ConfigError("family footnote produces a bundle and has no beta parameter");
  } else {
    throw mcm::ConfigError("unknown family '" + f + "'");
  }
  attach_cascade(a, inst);
  return inst;
}

int cmd_gen(const FamilyArgs& a, const std::string& out, const std::string& cmd) {
  json meta = {{"version", mcm::kVersion}, {"command", cmd}};
  if (a.family == "footnote") {
    auto [first, second] = mcm::gen_footnote_pair();
    attach_cascade(a, first);
    attach_cascade(a, second);
    json bundle = {{"meta", meta}, {"instances", json::array({mcm::to_json(first), mcm::to_json(second)})}};
    mcm::write_json_file(out, bundle);
    std::printf("achieved_beta %.10f %.10f\n", mcm::compute_efet(first), mcm::compute_efet(second));
    return kOk;
  }
  const mcm::Instance inst = make_family_instance(a, std::nullopt);
  json j = mcm::to_json(inst);
  j["meta"]["version"] = mcm::kVersion;
  j["meta"]["command"] = cmd;
  mcm::write_json_file(out, j);
  std::printf("achieved_beta %.10f\n", mcm::compute_efet(inst));
  if (inst.meta.contains("warning")) {
    std::fprintf(stderr, "warning: %s\n", inst.meta["warning"].get<std::string>().c_str());
  }
  return kOk;
}

json policy_json(const mcm::PolicyResult& p) {
  return {{"policy", std::string(mcm::policy_id(p.policy))},
          {"mean", p.mean},
          {"stderr", p.stderr_},
          {"ratio", p.ratio},
          {"mean_filled_int", p.mean_filled_int},
          {"mean_filled_ext", p.mean_filled_ext},
          {"mean_excess", p.mean_excess}};
}

struct RunArgs {
  std::string instance;
  std::string policies = "ac,msvv";
  int reps = 1;
  std::uint64_t seed = 1;
  std::string benchmark = "dlp";
  std::string out;
  std::string csv;
};

int cmd_run(const RunArgs& a, unsigned threads, int slack, const std::string& cmd) {
  const std::vector<mcm::Instance> instances = mcm::read_instances(a.instance);
  mcm::ExperimentConfig cfg;
  cfg.policies = mcm::parse_policy_list(a.policies);
  cfg.replications = a.reps;
  cfg.base_seed = a.seed;
  cfg.benchmark = mcm::parse_benchmark(a.benchmark);
  cfg.threads = threads;
  cfg.capacity_slack = slack;

  json results = json::array();
  std::map<std::string, double> worst;
  std::string csv = version_line(cmd) + "instance,policy,mean,stderr,benchmark_value,ratio\n";
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const mcm::ExperimentResult res = mcm::monte_carlo(instances[k], cfg);
    json pols = json::array();
    for (const auto& p : res.policies) {
      pols.push_back(policy_json(p));
      const std::string id(mcm::policy_id(p.policy));
      if (!std::isnan(p.ratio)) {
        auto it = worst.find(id);
        if (it == worst.end() || p.ratio < it->second) worst[id] = p.ratio;
      }
      char buf[256];
      std::snprintf(buf, sizeof buf, "%zu,%s,%.10f,%.10f,%.10f,%.10f\n", k, id.c_str(), p.mean, p.stderr_,
                    res.benchmark_value, p.ratio);
      csv += buf;
      std::printf("instance %zu %s mean %.6f stderr %.6f ratio %.6f\n", k, id.c_str(), p.mean, p.stderr_, p.ratio);
    }
    results.push_back({{"instance", k},
                       {"efet", mcm::compute_efet(instances[k])},
                       {"benchmark_value", res.benchmark_value},
                       {"policies", pols}});
  }
  json j = {{"version", mcm::kVersion},
            {"command", cmd},
            {"benchmark", mcm::to_string(cfg.benchmark)},
            {"replications", cfg.replications},
            {"seed", cfg.base_seed},
            {"results", results},
            {"worst_ratio", worst}};
  for (const auto& [id, r] : worst) std::printf("worst_ratio %s %.10f\n", id.c_str(), r);
  if (!a.out.empty()) {
    mcm::write_json_file(a.out, j);
    write_text(a.csv.empty() ? csv_path_for(a.out) : a.csv, csv);
  } else if (!a.csv.empty()) {
    write_text(a.csv, csv);
  }
  return kOk;
}

struct BoundsArgs {
  std::string bounds = "all";
  std::string beta_grid = "0:1:0.01";
  std::string c_min = "inf";
  std::string sigma = "1";
  int grid_m = 200;
  double z_step = 1e-4;
  int alpha4_grid = 2001;
  std::string out;
};

int cmd_bounds(const BoundsArgs& a, unsigned threads, const std::string& cmd) {
  mcm::CurveRequest req;
  if (a.bounds != "all") {
    std::stringstream ss(a.bounds);
    std::string tok;
    while (std::getline(ss, tok, ',')) req.names.push_back(tok);
  }
  req.betas = mcm::parse_grid(a.beta_grid);
  req.c_min = parse_extended(a.c_min, "--c-min");
  req.sigma = parse_extended(a.sigma, "--sigma");
  req.envelope_grid = a.grid_m;
  req.z_step = a.z_step;
  req.alpha4_grid = a.alpha4_grid;
  req.threads = threads;
  const std::string text = version_line(cmd) + mcm::bound_curves_csv(mcm::emit_bound_curves(req));
  if (a.out.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    write_text(a.out, text);
  }
  return kOk;
}

struct SweepArgs {
  FamilyArgs family;
  std::string betas = "0.1:0.9:0.1";
  std::string policies = "ac,msvv";
  int reps = 100;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_sweep(const SweepArgs& a, unsigned threads, const std::string& cmd) {
  if (a.family.family == "footnote" || a.family.family == "example1") {
    throw mcm::ConfigError("family " + a.family.family + " has no beta parameter");
  }
  mcm::ExperimentConfig cfg;
  cfg.policies = mcm::parse_policy_list(a.policies);
  cfg.replications = a.reps;
  cfg.base_seed = a.seed;
  cfg.threads = threads;
  const auto betas = mcm::parse_grid(a.betas);
  const auto rows =
      mcm::sweep_beta([&](double b) { return make_family_instance(a.family, b); }, betas, cfg);
  const std::string text = version_line(cmd) + mcm::sweep_csv(rows);
  if (a.out.empty()) {
    std::fwrite(text.data(), 1, text.size(), stdout);
  } else {
    write_text(a.out, text);
  }
  return kOk;
}

struct OracleArgs {
  std::uint64_t seed = 1;
  int trials = 50;
  int reps = 10000;
  std::string out;
};

int cmd_oracle(const OracleArgs& a, unsigned threads, int slack, const std::string& cmd) {
  mcm::OracleConfig cfg;
  cfg.seed = a.seed;
  cfg.trials = a.trials;
  cfg.mc_replications = a.reps;
  cfg.threads = threads;
  cfg.capacity_slack = slack;
  mcm::OracleReport rep = mcm::run_oracle_check(cfg);
  rep.json["version"] = mcm::kVersion;
  rep.json["command"] = cmd;
  if (!a.out.empty()) mcm::write_json_file(a.out, rep.json);
  for (const auto& t : rep.json["results"]) {
    if (!t["passed"].get<bool>()) {
      for (const auto& p : t["problems"]) {
        std::fprintf(stderr, "trial %d (seed %llu): %s\n", t["trial"].get<int>(),
                     static_cast<unsigned long long>(t["seed"].get<std::uint64_t>()),
                     p.get<std::string>().c_str());
      }
    }
  }
  std::printf("oracle-check %s: %d of %d trials failed\n", rep.passed ? "PASS" : "FAIL",
              rep.json["failures"].get<int>(), a.trials);
  return rep.passed ? kOk : kOracleFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online volunteer matching: generators, policies, benchmarks and bounds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mcm::kVersion));

  unsigned threads = mcm::default_threads();
  int slack = 0;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--threads", threads, "worker threads (MCM_THREADS overrides)");
  };

  FamilyArgs gen_args;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "generate an instance file");
  add_family_options(gen, gen_args, true);
  gen->add_option("--out", gen_out, "output JSON")->required();

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Monte-Carlo evaluation of policies on an instance file");
  run->add_option("--instance", run_args.instance, "instance JSON")->required();
  run->add_option("--policies", run_args.policies, "comma-separated policy ids");
  run->add_option("--reps", run_args.reps, "replications");
  run->add_option("--seed", run_args.seed, "base seed");
  run->add_option("--benchmark", run_args.benchmark, "dlp|dp|none");
  run->add_option("--out", run_args.out, "result JSON (summary CSV written alongside)");
  run->add_option("--csv", run_args.csv, "summary CSV path");
  run->add_option("--inject-capacity-slack", slack)->group("");
  add_common(run);

  BoundsArgs bounds_args;
  auto* bounds = app.add_subcommand("bounds", "emit competitive-ratio bound curves");
  bounds->add_option("--bounds", bounds_args.bounds, "all or comma-separated names");
  bounds->add_option("--beta-grid", bounds_args.beta_grid, "lo:hi:step");
  bounds->add_option("--c-min", bounds_args.c_min, "minimum capacity or inf");
  bounds->add_option("--sigma", bounds_args.sigma, "max conversion-probability ratio or inf");
  bounds->add_option("--grid-m", bounds_args.grid_m, "envelope grid resolution");
  bounds->add_option("--z-step", bounds_args.z_step, "scan step for the general AC bound");
  bounds->add_option("--alpha4-grid", bounds_args.alpha4_grid, "grid points for the MSVV upper bound");
  bounds->add_option("--out", bounds_args.out, "output CSV (stdout if omitted)");
  add_common(bounds);

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo ratios over a grid of EFET values");
  add_family_options(sweep, sweep_args.family, false);
  sweep->add_option("--betas", sweep_args.betas, "lo:hi:step");
  sweep->add_option("--policies", sweep_args.policies, "comma-separated policy ids");
  sweep->add_option("--reps", sweep_args.reps, "replications per beta");
  sweep->add_option("--base-seed", sweep_args.seed, "Monte-Carlo base seed (defaults to --seed)");
  sweep->add_option("--out", sweep_args.out, "output CSV (stdout if omitted)");
  add_common(sweep);

  OracleArgs oracle_args;
  auto* oracle = app.add_subcommand("oracle-check", "sandwich and Monte-Carlo checks on random tiny instances");
  oracle->add_option("--seed", oracle_args.seed, "base seed");
  oracle->add_option("--trials", oracle_args.trials, "number of instances");
  oracle->add_option("--reps", oracle_args.reps, "Monte-Carlo replications per policy");
  oracle->add_option("--out", oracle_args.out, "JSON report");
  oracle->add_option("--inject-capacity-slack", slack)->group("");
  add_common(oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (const char* env = std::getenv("MCM_THREADS")) {
    try {
      threads = static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      std::fprintf(stderr, "error: MCM_THREADS must be a positive integer\n");
      return kUsage;
    }
  }
  if (threads == 0) threads = 1;
  if (sweep->parsed() && sweep->count("--base-seed") == 0 && sweep_args.family.seed) {
    sweep_args.seed = *sweep_args.family.seed;
  }

  const std::string cmd = command_line(argc, argv);
  try {
    if (gen->parsed()) return cmd_gen(gen_args, gen_out, cmd);
    if (run->parsed()) return cmd_run(run_args, threads, slack, cmd);
    if (bounds->parsed()) return cmd_bounds(bounds_args, threads, cmd);
    if (sweep->parsed()) return cmd_sweep(sweep_args, threads, cmd);
    if (oracle->parsed()) return cmd_oracle(oracle_args, threads, slack, cmd);
  } catch (const mcm::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kValidation;
  } catch (const mcm::SizeError& e) {
    std::fprintf(stderr, "size error: %s\n", e.what());
    return kValidation;
  } catch (const mcm::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}
