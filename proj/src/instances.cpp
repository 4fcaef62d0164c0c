#include "mcm/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mcm/benchmark.hpp"
#include "mcm/bounds.hpp"
#include "mcm/rng.hpp"

namespace mcm {

std::vector<int> cumulative_round(const std::vector<double>& targets) {
  std::vector<int> out;
  out.reserve(targets.size());
  double running = 0.0;
  long long emitted = 0;
  for (double x : targets) {
    running += x;
    const long long upto = std::llrint(running);  // default rounding mode: half to even
    out.push_back(static_cast<int>(upto - emitted));
    emitted = upto;
  }
  return out;
}

namespace {

void check_size(int N, int C) {
  if (N < 1 || C < 1) throw DomainError("generator needs N >= 1 and C >= 1");
}

int round_half_even(double x) { return static_cast<int>(std::llrint(x)); }

Instance uniform_capacity(int N, int C) {
  Instance inst;
  for (int i = 1; i <= N; ++i) inst.opportunities.push_back({i, C});
  return inst;
}

void push_external(Instance& inst, OppId target, int count) {
  for (int k = 0; k < count; ++k) {
    Volunteer v;
    v.t = static_cast<int>(inst.arrivals.size()) + 1;
    v.source = Source::External;
    v.target = target;
    inst.arrivals.push_back(std::move(v));
  }
}

// `count` internal volunteers with mu = 1 on opportunities first..N.
void push_triangle_batch(Instance& inst, int first, int count) {
  const std::size_t n = inst.opportunities.size();
  std::vector<double> mu(n, 0.0);
  for (std::size_t i = static_cast<std::size_t>(first - 1); i < n; ++i) mu[i] = 1.0;
  for (int k = 0; k < count; ++k) {
    Volunteer v;
    v.t = static_cast<int>(inst.arrivals.size()) + 1;
    v.source = Source::Internal;
    v.mu = mu;
    inst.arrivals.push_back(std::move(v));
  }
}

void annotate(Instance& inst, const std::string& family, double requested) {
  inst.meta["family"] = family;
  inst.meta["requested_beta"] = requested;
  const double achieved = compute_efet(inst);
  inst.meta["achieved_beta"] = achieved;
  inst.meta["total_capacity"] = inst.total_capacity();
  if (requested > 0.0 && std::abs(achieved - requested) / requested > 0.05) {
    inst.meta["warning"] = "relative rounding error of achieved beta exceeds 5%";
  }
}

// External prefix on opportunities 1..n_a with e_i = C(1 - r^i), where
// r = (N - n_a) / (N - n_a + 1).
std::vector<int> geometric_prefix(int N, int C, int n_a) {
  const double r = static_cast<double>(N - n_a) / (N - n_a + 1);
  std::vector<double> x(static_cast<std::size_t>(n_a));
  for (int i = 1; i <= n_a; ++i) x[static_cast<std::size_t>(i - 1)] = C * (1.0 - std::pow(r, i));
  auto e = cumulative_round(x);
  for (auto& v : e) v = std::clamp(v, 0, C);
  return e;
}

}  // namespace

Instance gen_hard_i1(int N, int C, double beta, std::optional<std::uint64_t> perm_seed) {
  check_size(N, C);
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("gen_hard_i1: beta outside [0,1]");
  const int n_ext = round_half_even(beta * N);
  const int n_int = N - n_ext;

  std::vector<OppId> label(static_cast<std::size_t>(N));
  std::iota(label.begin(), label.end(), 1);
  if (perm_seed) {
    Rng rng = make_rng(*perm_seed);
    shuffle(label.begin(), label.end(), rng);
  }

  Instance inst = uniform_capacity(N, C);
  const std::size_t n = static_cast<std::size_t>(N);
  for (int j = 1; j <= n_int; ++j) {
    std::vector<double> mu(n, 0.0);
    for (int i = j; i <= N; ++i) mu[static_cast<std::size_t>(label[static_cast<std::size_t>(i - 1)] - 1)] = 1.0;
    for (int k = 0; k < C; ++k) {
      Volunteer v;
      v.t = static_cast<int>(inst.arrivals.size()) + 1;
      v.mu = mu;
      inst.arrivals.push_back(std::move(v));
    }
  }
  for (int j = n_int + 1; j <= N; ++j) push_external(inst, label[static_cast<std::size_t>(j - 1)], C);
  annotate(inst, "i1", beta);
  inst.meta["N"] = N;
  inst.meta["C"] = C;
  if (perm_seed) inst.meta["perm_seed"] = *perm_seed;
  return inst;
}

Instance gen_hard_i2(int N, int C, double beta) {
  check_size(N, C);
  const double a1 = warmup_msvv_alpha1(beta);
  const int n_a = std::clamp(round_half_even(a1 * N), 0, N);
  const auto e = geometric_prefix(N, C, n_a);

  Instance inst = uniform_capacity(N, C);
  for (int i = 1; i <= static_cast<int>(e.size()); ++i) push_external(inst, i, e[static_cast<std::size_t>(i - 1)]);
  for (int i = 1; i <= N; ++i) {
    const int ext = i <= static_cast<int>(e.size()) ? e[static_cast<std::size_t>(i - 1)] : 0;
    push_triangle_batch(inst, i, C - ext);
  }
  annotate(inst, "i2", beta);
  inst.meta["N"] = N;
  inst.meta["C"] = C;
  inst.meta["alpha1_hat"] = a1;
  inst.meta["external_opportunities"] = static_cast<int>(e.size());
  return inst;
}

Instance gen_hard_i3(int N, int C, double beta) {
  check_size(N, C);
  if (!(beta > 1.0 / std::exp(1.0) && beta <= 1.0)) throw DomainError("gen_hard_i3 requires beta in (1/e, 1]");
  const double a1 = msvv_general_alpha1(beta);
  const double a2 = msvv_general_alpha2(beta);
  const int n_2 = std::clamp(round_half_even(a2 * N), 0, N);
  const int n_a = std::clamp(round_half_even(a1 * N), 0, n_2);
  const auto e = geometric_prefix(N, C, n_a);

  Instance inst = uniform_capacity(N, C);
  for (int i = 1; i <= n_a; ++i) push_external(inst, i, e[static_cast<std::size_t>(i - 1)]);
  for (int i = 1; i <= n_2; ++i) {
    const int ext = i <= n_a ? e[static_cast<std::size_t>(i - 1)] : 0;
    push_triangle_batch(inst, i, C - ext);
  }
  for (int i = n_2 + 1; i <= N; ++i) push_external(inst, i, C);
  annotate(inst, "i3", beta);
  inst.meta["N"] = N;
  inst.meta["C"] = C;
  inst.meta["alpha1"] = a1;
  inst.meta["alpha2"] = a2;
  return inst;
}

Instance gen_hard_i4(int N, int C, double beta, double alpha4) {
  check_size(N, C);
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("gen_hard_i4: beta outside [0,1]");
  if (!(alpha4 >= 0.0 && alpha4 <= beta)) throw DomainError("gen_hard_i4 requires alpha4 in [0, beta]");
  const int n_late = std::clamp(round_half_even(alpha4 * N), 0, N);
  const int n_early = N - n_late;
  const double share = alpha4 < 1.0 ? (beta - alpha4) / (1.0 - alpha4) : 0.0;
  auto e = cumulative_round(std::vector<double>(static_cast<std::size_t>(n_early), share * C));
  for (auto& v : e) v = std::clamp(v, 0, C);

  Instance inst = uniform_capacity(N, C);
  for (int i = 1; i <= n_early; ++i) push_external(inst, i, e[static_cast<std::size_t>(i - 1)]);
  for (int i = 1; i <= n_early; ++i) push_triangle_batch(inst, i, C - e[static_cast<std::size_t>(i - 1)]);
  for (int i = n_early + 1; i <= N; ++i) push_external(inst, i, C);
  annotate(inst, "i4", beta);
  inst.meta["N"] = N;
  inst.meta["C"] = C;
  inst.meta["alpha4"] = alpha4;
  return inst;
}

Instance gen_example1(int N) {
  if (N < 2) throw DomainError("gen_example1 requires N >= 2");
  const double e = std::exp(1.0);
  Instance inst;
  inst.opportunities.push_back({1, N});
  inst.opportunities.push_back({2, round_half_even(N / (e - 1.0))});
  int clamped = 0;
  for (int t = 1; t <= N; ++t) {
    double mu2 = (1.0 - std::exp(static_cast<double>(t - 1) / N - 1.0)) / (1.0 - 1.0 / e) - 1.0 / (2.0 * N);
    if (mu2 < 0.0) {
      mu2 = 0.0;
      ++clamped;
    }
    Volunteer v;
    v.t = t;
    v.mu = {1.0, mu2};
    inst.arrivals.push_back(std::move(v));
  }
  push_external(inst, 1, N);
  annotate(inst, "example1", 1.0 - 1.0 / e);
  inst.meta["N"] = N;
  inst.meta["clamped_mu2"] = clamped;
  return inst;
}

std::pair<Instance, Instance> gen_footnote_pair() {
  auto make = [](std::vector<double> second) {
    Instance inst;
    inst.opportunities = {{1, 1}, {2, 1}};
    Volunteer a;
    a.t = 1;
    a.mu = {1.0, 1.0};
    Volunteer b;
    b.t = 2;
    b.mu = std::move(second);
    inst.arrivals = {a, b};
    annotate(inst, "footnote", 0.0);
    return inst;
  };
  Instance first = make({1.0, 0.0});
  Instance second = make({0.0, 1.0});
  first.meta["sequence"] = 1;
  second.meta["sequence"] = 2;
  return {std::move(first), std::move(second)};
}

// ---------------------------------------------------------------------------

WindowMode parse_window_mode(const std::string& s) {
  if (s == "none") return WindowMode::None;
  if (s == "avg75") return WindowMode::Avg75;
  if (s == "avg25") return WindowMode::Avg25;
  throw ConfigError("unknown window mode '" + s + "'");
}

ArrivalPattern parse_arrival_pattern(const std::string& s) {
  if (s == "timestamped") return ArrivalPattern::Timestamped;
  if (s == "bursty") return ArrivalPattern::Bursty;
  if (s == "spread") return ArrivalPattern::Spread;
  throw ConfigError("unknown arrival pattern '" + s + "'");
}

std::string to_string(WindowMode m) {
  switch (m) {
    case WindowMode::None: return "none";
    case WindowMode::Avg75: return "avg75";
    case WindowMode::Avg25: return "avg25";
  }
  return "?";
}

std::string to_string(ArrivalPattern p) {
  switch (p) {
    case ArrivalPattern::Timestamped: return "timestamped";
    case ArrivalPattern::Bursty: return "bursty";
    case ArrivalPattern::Spread: return "spread";
  }
  return "?";
}

namespace {

double normal01(Rng& rng) {
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::size_t draw_weighted(const std::vector<double>& cdf, Rng& rng) {
  const double u = uniform01(rng) * cdf.back();
  return static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
}

}  // namespace

Instance gen_synthetic(const SyntheticParams& p) {
  if (p.n < 1) throw ConfigError("synthetic: n must be >= 1");
  if (p.capacity_min < 1 || p.capacity_max < p.capacity_min) throw ConfigError("synthetic: bad capacity range");
  if (p.num_causes < 1) throw ConfigError("synthetic: num_causes must be >= 1");
  if (!p.cause_popularity.empty() && static_cast<int>(p.cause_popularity.size()) != p.num_causes) {
    throw ConfigError("synthetic: cause popularity vector has " + std::to_string(p.cause_popularity.size()) +
                      " entries, expected " + std::to_string(p.num_causes));
  }
  if (p.max_opp_causes < 1) throw ConfigError("synthetic: max_opp_causes must be >= 1");
  if (!(p.mu0 > 0.0 && p.mu0 <= 1.0)) throw ConfigError("synthetic: mu0 must be in (0,1]");
  if (!(p.ext_share > 0.0 && p.ext_share <= 1.0)) throw ConfigError("synthetic: ext_share must be in (0,1]");
  if (p.target_beta && !(*p.target_beta >= 0.0 && *p.target_beta <= 1.0)) {
    throw ConfigError("synthetic: target beta outside [0,1]");
  }
  if (p.t_int < 0 || p.t_ext < 0) throw ConfigError("synthetic: arrival counts must be >= 0");

  Rng rng = make_rng(p.seed);
  const std::size_t n = static_cast<std::size_t>(p.n);
  const std::size_t K = static_cast<std::size_t>(p.num_causes);

  Instance inst;
  long long total_cap = 0;
  for (int i = 1; i <= p.n; ++i) {
    const int span = p.capacity_max - p.capacity_min + 1;
    const int c = p.capacity_min + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(span)));
    inst.opportunities.push_back({i, c});
    total_cap += c;
  }

  std::vector<double> pop = p.cause_popularity;
  if (pop.empty()) {
    pop.resize(K);
    for (auto& x : pop) x = 0.05 + 0.25 * uniform01(rng);
  }

  std::vector<std::vector<char>> opp_cause(n, std::vector<char>(K, 0));
  const std::size_t max_c = std::min<std::size_t>(K, static_cast<std::size_t>(p.max_opp_causes));
  std::vector<std::size_t> causes(K);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t count = 1 + uniform_index(rng, max_c);
    std::iota(causes.begin(), causes.end(), 0);
    shuffle(causes.begin(), causes.end(), rng);
    for (std::size_t k = 0; k < count; ++k) opp_cause[i][causes[k]] = 1;
  }

  std::vector<double> recency(n);
  for (auto& r : recency) r = uniform01(rng);
  inst.recency = recency;

  // External targets: Zipf over a random subset of opportunities.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  shuffle(order.begin(), order.end(), rng);
  const std::size_t n_ext_opps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llrint(p.ext_share * p.n)));
  std::vector<double> cdf(n_ext_opps);
  double acc = 0.0;
  for (std::size_t k = 0; k < n_ext_opps; ++k) {
    acc += 1.0 / std::pow(static_cast<double>(k + 1), p.zipf_exponent);
    cdf[k] = acc;
  }

  std::vector<OppId> ext_targets;
  std::vector<long long> target_count(n, 0);
  long long ext_fill = 0;
  auto add_target = [&]() {
    const std::size_t i = order[draw_weighted(cdf, rng)];
    ext_targets.push_back(static_cast<OppId>(i + 1));
    if (++target_count[i] <= inst.opportunities[i].capacity) ++ext_fill;
  };
  if (p.target_beta) {
    long long reachable = 0;
    for (std::size_t k = 0; k < n_ext_opps; ++k) reachable += inst.opportunities[order[k]].capacity;
    const double goal = *p.target_beta * static_cast<double>(total_cap);
    if (goal > static_cast<double>(reachable) + 1e-9) {
      throw ConfigError("synthetic: target beta exceeds the external share of capacity");
    }
    const long long max_draws = 1000 * total_cap + 1000;
    while (static_cast<double>(ext_fill) < goal - 1e-9) {
      if (static_cast<long long>(ext_targets.size()) >= max_draws) {
        throw ConfigError("synthetic: target beta not reached within the draw budget");
      }
      add_target();
    }
  } else {
    for (int k = 0; k < p.t_ext; ++k) add_target();
  }
  const double achieved = static_cast<double>(ext_fill) / static_cast<double>(total_cap);

  int t_int = p.t_int;
  if (t_int == 0) t_int = static_cast<int>(std::ceil((1.0 - achieved) * static_cast<double>(total_cap) / p.mu0));

  // Compatibility windows on the internal arrival index 1..t_int.
  std::vector<int> win_lo(n, 1), win_hi(n, t_int);
  double window_sum = 0.0;
  if (p.window != WindowMode::None && t_int >= 2) {
    const double frac = p.window == WindowMode::Avg75 ? 0.75 : 0.25;
    const double mean_cap = static_cast<double>(total_cap) / p.n;
    std::vector<double> raw(n);
    for (std::size_t i = 0; i < n; ++i) {
      raw[i] = frac * t_int * (inst.opportunities[i].capacity / mean_cap) * (0.5 + uniform01(rng));
    }
    // Truncation shortens long windows; rescale so the mean still hits frac.
    auto clamp_len = [&](double x) { return std::clamp(static_cast<int>(std::llrint(x)), 1, t_int - 1); };
    double scale = 1.0;
    for (int iter = 0; iter < 30; ++iter) {
      double sum = 0.0;
      for (double r : raw) sum += clamp_len(scale * r);
      const double mean = sum / static_cast<double>(n);
      if (mean <= 0.0) break;
      scale = std::min(scale * frac * t_int / mean, 1e6);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const int tau = clamp_len(scale * raw[i]);
      const int start = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(t_int - tau)));
      win_lo[i] = start;
      win_hi[i] = start + tau;
      window_sum += tau;
    }
  }

  std::vector<Volunteer> internal;
  int dropped = 0;
  std::vector<char> vol_cause(K);
  for (int t = 1; t <= t_int; ++t) {
    for (std::size_t k = 0; k < K; ++k) vol_cause[k] = bernoulli(rng, pop[k]) ? 1 : 0;
    Volunteer v;
    v.mu.assign(n, 0.0);
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (t < win_lo[i] || t > win_hi[i]) continue;
      for (std::size_t k = 0; k < K; ++k) {
        if (vol_cause[k] && opp_cause[i][k]) {
          v.mu[i] = p.mu0;
          any = true;
          break;
        }
      }
    }
    if (!any) {
      ++dropped;
      continue;
    }
    internal.push_back(std::move(v));
  }

  auto make_ext = [](OppId target) {
    Volunteer v;
    v.source = Source::External;
    v.target = target;
    return v;
  };

  std::vector<Volunteer> seq;
  seq.reserve(internal.size() + ext_targets.size());
  switch (p.pattern) {
    case ArrivalPattern::Spread: {
      std::vector<char> is_ext(internal.size() + ext_targets.size(), 0);
      std::fill(is_ext.begin(), is_ext.begin() + static_cast<std::ptrdiff_t>(ext_targets.size()), 1);
      shuffle(is_ext.begin(), is_ext.end(), rng);
      std::size_t a = 0, b = 0;
      for (char e : is_ext) {
        if (e) seq.push_back(make_ext(ext_targets[b++]));
        else seq.push_back(internal[a++]);
      }
      break;
    }
    case ArrivalPattern::Bursty: {
      for (OppId tgt : ext_targets) {
        if (target_count[static_cast<std::size_t>(tgt - 1)] < inst.opportunities[static_cast<std::size_t>(tgt - 1)].capacity) {
          seq.push_back(make_ext(tgt));
        }
      }
      for (auto& v : internal) seq.push_back(v);
      for (OppId tgt : ext_targets) {
        if (target_count[static_cast<std::size_t>(tgt - 1)] >= inst.opportunities[static_cast<std::size_t>(tgt - 1)].capacity) {
          seq.push_back(make_ext(tgt));
        }
      }
      break;
    }
    case ArrivalPattern::Timestamped: {
      std::vector<double> center(n);
      for (auto& c : center) c = uniform01(rng);
      std::vector<std::pair<double, std::size_t>> stamps;
      const std::size_t ni = internal.size();
      for (std::size_t k = 0; k < ni; ++k) stamps.emplace_back((k + 0.5) / std::max<std::size_t>(ni, 1), k);
      for (std::size_t k = 0; k < ext_targets.size(); ++k) {
        const double s = center[static_cast<std::size_t>(ext_targets[k] - 1)] + p.cluster_width * normal01(rng);
        stamps.emplace_back(std::clamp(s, 0.0, 1.0), ni + k);
      }
      std::stable_sort(stamps.begin(), stamps.end(),
                       [](const auto& x, const auto& y) { return x.first < y.first; });
      for (const auto& [s, k] : stamps) {
        if (k < ni) seq.push_back(internal[k]);
        else seq.push_back(make_ext(ext_targets[k - ni]));
      }
      break;
    }
  }
  for (std::size_t k = 0; k < seq.size(); ++k) seq[k].t = static_cast<int>(k + 1);
  inst.arrivals = std::move(seq);

  annotate(inst, "synthetic", p.target_beta ? *p.target_beta : achieved);
  inst.meta["seed"] = p.seed;
  inst.meta["pattern"] = to_string(p.pattern);
  inst.meta["window"] = to_string(p.window);
  inst.meta["t_int_requested"] = t_int;
  inst.meta["internal_dropped"] = dropped;
  inst.meta["external_arrivals"] = ext_targets.size();
  if (p.window != WindowMode::None && t_int >= 2) {
    inst.meta["mean_window_fraction"] = window_sum / p.n / t_int;
  }
  return inst;
}

// ---------------------------------------------------------------------------

Instance gen_tiny_random(std::uint64_t seed, int max_bits) {
  Rng rng = make_replication_rng(seed, "tiny", 0);
  for (int attempt = 0;; ++attempt) {
    Instance inst;
    const int n = 1 + static_cast<int>(uniform_index(rng, 3));
    const int T = 1 + static_cast<int>(uniform_index(rng, 8));
    for (int i = 1; i <= n; ++i) inst.opportunities.push_back({i, 1 + static_cast<int>(uniform_index(rng, 3))});
    std::vector<double> rec(static_cast<std::size_t>(n));
    for (auto& r : rec) r = uniform01(rng);
    inst.recency = rec;
    for (int t = 1; t <= T; ++t) {
      Volunteer v;
      v.t = t;
      if (uniform01(rng) < 0.25) {
        v.source = Source::External;
        v.target = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n)));
        v.ext_signup_prob = uniform01(rng) < 0.3 ? 0.5 : 1.0;
      } else {
        v.mu.assign(static_cast<std::size_t>(n), 0.0);
        bool any = false;
        while (!any) {
          for (auto& m : v.mu) {
            const double u = uniform01(rng);
            if (u < 0.3) m = 0.0;
            else if (u < 0.45) m = 1.0;
            else m = std::round((0.05 + 0.9 * uniform01(rng)) * 100.0) / 100.0;
            any = any || m > 0.0;
          }
        }
      }
      inst.arrivals.push_back(std::move(v));
    }
    if (uniform01(rng) < 0.25) {
      CascadeParams c;
      c.max_list_len = 1 + static_cast<int>(uniform_index(rng, 2));
      for (int t = 0; t < T; ++t) {
        c.view_prob.push_back(uniform01(rng) < 0.5 ? 1.0 : 0.6);
        c.exit_prob.push_back(uniform01(rng) < 0.5 ? 0.0 : 0.5);
      }
      inst.cascade = c;
    }
    if (enumeration_bits(inst) <= max_bits) {
      inst.meta["family"] = "tiny";
      inst.meta["seed"] = seed;
      return inst;
    }
  }
}

}  // namespace mcm
