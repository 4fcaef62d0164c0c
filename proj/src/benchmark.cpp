#include "mcm/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>

namespace mcm {

namespace {

struct VolunteerClasses {
  // Representative arrival index and multiplicity per class, in order of first
  // appearance.
  std::vector<std::size_t> representative;
  std::vector<double> multiplicity;
};

VolunteerClasses group_volunteers(const Instance& instance) {
  VolunteerClasses out;
  std::map<std::vector<double>, std::size_t> internal;
  std::map<std::pair<int, double>, std::size_t> external;
  for (std::size_t t = 0; t < instance.horizon(); ++t) {
    const auto& v = instance.arrivals[t];
    std::size_t k;
    if (v.is_external()) {
      auto [it, fresh] = external.try_emplace({v.target, v.ext_signup_prob}, out.representative.size());
      k = it->second;
      if (fresh) {
        out.representative.push_back(t);
        out.multiplicity.push_back(0.0);
      }
    } else {
      auto [it, fresh] = internal.try_emplace(v.mu, out.representative.size());
      k = it->second;
      if (fresh) {
        out.representative.push_back(t);
        out.multiplicity.push_back(0.0);
      }
    }
    out.multiplicity[k] += 1.0;
  }
  return out;
}

// (opportunity index, coefficient) pairs of the D-LP columns for one volunteer.
std::vector<std::pair<std::size_t, double>> dlp_terms(const Volunteer& v) {
  std::vector<std::pair<std::size_t, double>> out;
  if (v.is_external()) {
    out.emplace_back(static_cast<std::size_t>(v.target - 1), v.ext_signup_prob);
  } else {
    for (std::size_t i = 0; i < v.mu.size(); ++i) {
      if (v.mu[i] > 0.0) out.emplace_back(i, v.mu[i]);
    }
  }
  return out;
}

}  // namespace

DlpResult solve_dlp(const Instance& instance) {
  require_valid(instance);
  const std::size_t n = instance.num_opportunities();
  const VolunteerClasses classes = group_volunteers(instance);

  SparseLp lp;
  lp.num_rows = n + classes.representative.size();
  lp.rhs.resize(lp.num_rows);
  for (std::size_t i = 0; i < n; ++i) lp.rhs[i] = instance.opportunities[i].capacity;
  struct ClassCols {
    std::size_t first, count;
  };
  std::vector<ClassCols> spans;
  for (std::size_t k = 0; k < classes.representative.size(); ++k) {
    lp.rhs[n + k] = classes.multiplicity[k];
    auto terms = dlp_terms(instance.arrivals[classes.representative[k]]);
    std::stable_sort(terms.begin(), terms.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    spans.push_back({lp.num_cols(), terms.size()});
    for (const auto& [i, coef] : terms) lp.add_column(coef, {{i, coef}, {n + k, 1.0}});
  }
  // Crash start: most constrained classes first, best coefficient first.
  std::stable_sort(spans.begin(), spans.end(),
                   [](const ClassCols& a, const ClassCols& b) { return a.count < b.count; });
  for (const auto& s : spans) {
    for (std::size_t c = 0; c < s.count; ++c) lp.crash_order.push_back(s.first + c);
  }

  const LpSolution sol = sparse_lp_solve(lp);
  if (sol.status != LpStatus::Optimal) throw NumericalError("D-LP did not solve to optimality");

  DlpResult out;
  out.value = sol.value;
  out.dual_value = sol.dual_value;
  out.rows = lp.num_rows;
  out.columns = lp.num_cols();
  out.iterations = sol.iterations;

  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = std::max(0.0, sol.duals[i]);
    out.reconstructed_dual += lp.rhs[i] * u[i];
  }
  for (std::size_t k = 0; k < classes.representative.size(); ++k) {
    double vk = 0.0;
    for (const auto& [i, coef] : dlp_terms(instance.arrivals[classes.representative[k]])) {
      vk = std::max(vk, coef * (1.0 - u[i]));
    }
    out.reconstructed_dual += classes.multiplicity[k] * vk;
  }

  const double scale = std::max(1.0, std::abs(out.value));
  if (std::abs(out.value - out.dual_value) > 1e-8 * scale ||
      out.reconstructed_dual < out.value - 1e-8 * scale ||
      out.reconstructed_dual > out.value + 1e-6 * scale) {
    throw NumericalError("D-LP duality check failed: primal " + std::to_string(out.value) +
                         ", dual " + std::to_string(out.dual_value) + ", reconstructed " +
                         std::to_string(out.reconstructed_dual));
  }
  return out;
}

double dlp_upper_bound(const Instance& instance) { return solve_dlp(instance).value; }

LpProblem build_dlp_dense(const Instance& instance) {
  require_valid(instance);
  const std::size_t n = instance.num_opportunities();
  const std::size_t T = instance.horizon();
  struct Var {
    std::size_t opp, t;
    double coef;
  };
  std::vector<Var> vars;
  for (std::size_t t = 0; t < T; ++t) {
    for (const auto& [i, coef] : dlp_terms(instance.arrivals[t])) vars.push_back({i, t, coef});
  }
  LpProblem p;
  p.num_vars = vars.size();
  for (const auto& v : vars) p.objective.push_back(v.coef);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(vars.size(), 0.0);
    for (std::size_t j = 0; j < vars.size(); ++j) {
      if (vars[j].opp == i) row[j] = vars[j].coef;
    }
    p.add_row(row, RowSense::LessEq, instance.opportunities[i].capacity);
  }
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> row(vars.size(), 0.0);
    for (std::size_t j = 0; j < vars.size(); ++j) {
      if (vars[j].t == t) row[j] = 1.0;
    }
    p.add_row(row, RowSense::LessEq, 1.0);
  }
  return p;
}

// ---------------------------------------------------------------------------

double dp_opt_exact(const Instance& instance) {
  require_valid(instance);
  const std::size_t n = instance.num_opportunities();
  const std::size_t T = instance.horizon();
  double states = 1.0;
  for (const auto& o : instance.opportunities) states *= o.capacity + 1.0;
  if (states * std::max<std::size_t>(T, 1) > kDpStateLimit) {
    throw SizeError("dp_opt_exact: state space " + std::to_string(states) + " x T=" +
                    std::to_string(T) + " exceeds 1e6");
  }
  const std::size_t S = static_cast<std::size_t>(states);
  std::vector<std::size_t> stride(n);
  std::size_t acc = 1;
  for (std::size_t i = 0; i < n; ++i) {
    stride[i] = acc;
    acc *= static_cast<std::size_t>(instance.opportunities[i].capacity) + 1;
  }
  auto remaining = [&](std::size_t s, std::size_t i) {
    return (s / stride[i]) % (static_cast<std::size_t>(instance.opportunities[i].capacity) + 1);
  };

  std::vector<double> next(S, 0.0), cur(S, 0.0), gains;
  gains.reserve(n);
  for (std::size_t tt = T; tt-- > 0;) {
    const auto& v = instance.arrivals[tt];
    std::vector<double> view;
    if (v.is_internal() && instance.cascade) {
      const auto& c = *instance.cascade;
      view = view_position_probs(c.view_prob[tt], c.exit_prob[tt], c.max_list_len);
      view.pop_back();
    }
    for (std::size_t s = 0; s < S; ++s) {
      const double stay = next[s];
      if (v.is_external()) {
        const std::size_t i = static_cast<std::size_t>(v.target - 1);
        if (remaining(s, i) > 0) {
          const double p = v.ext_signup_prob;
          cur[s] = p * (1.0 + next[s - stride[i]]) + (1.0 - p) * stay;
        } else {
          cur[s] = stay;
        }
        continue;
      }
      gains.clear();
      for (std::size_t i = 0; i < n; ++i) {
        if (v.mu[i] == 0.0 || remaining(s, i) == 0) continue;
        const double g = v.mu[i] * (1.0 + next[s - stride[i]] - stay);
        if (g > 0.0) gains.push_back(g);
      }
      double best = 0.0;
      if (view.empty()) {
        for (double g : gains) best = std::max(best, g);
      } else {
        std::sort(gains.begin(), gains.end(), std::greater<>());
        for (std::size_t k = 0; k < gains.size() && k < view.size(); ++k) best += view[k] * gains[k];
      }
      cur[s] = stay + best;
    }
    std::swap(cur, next);
  }
  return next[S - 1];
}

// ---------------------------------------------------------------------------

namespace {

struct Site {
  enum Kind { IntBit, ExtBit, View } kind;
  std::size_t t;
  std::size_t i;
  double p;                    // bits: success probability
  std::vector<double> probs;   // view: P[pos = k + 1]
};

std::vector<Site> random_sites(const Instance& instance, SamplePath& base) {
  const std::size_t n = instance.num_opportunities();
  const std::size_t T = instance.horizon();
  base.n = n;
  base.int_signup.assign(T * n, 0);
  base.ext_signup.assign(T, 0);
  if (instance.cascade) base.view_position.assign(T, 0);
  std::vector<Site> sites;
  for (std::size_t t = 0; t < T; ++t) {
    const auto& v = instance.arrivals[t];
    if (v.is_external()) {
      const double p = v.ext_signup_prob;
      if (p >= 1.0) base.ext_signup[t] = 1;
      else sites.push_back({Site::ExtBit, t, 0, p, {}});
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double m = v.mu[i];
      if (m >= 1.0) base.int_signup[t * n + i] = 1;
      else if (m > 0.0) sites.push_back({Site::IntBit, t, i, m, {}});
    }
    if (instance.cascade) {
      const auto& c = *instance.cascade;
      auto probs = view_position_probs(c.view_prob[t], c.exit_prob[t], c.max_list_len);
      std::size_t nonzero = 0, last = 0;
      for (std::size_t k = 0; k < probs.size(); ++k) {
        if (probs[k] > 0.0) {
          ++nonzero;
          last = k;
        }
      }
      if (nonzero <= 1) base.view_position[t] = static_cast<int>(last + 1);
      else sites.push_back({Site::View, t, 0, 0.0, std::move(probs)});
    }
  }
  return sites;
}

double outcome_count(const std::vector<Site>& sites) {
  double count = 1.0;
  for (const auto& s : sites) {
    if (s.kind == Site::View) {
      count *= static_cast<double>(std::count_if(s.probs.begin(), s.probs.end(),
                                                 [](double p) { return p > 0.0; }));
    } else {
      count *= 2.0;
    }
  }
  return count;
}

}  // namespace

int enumeration_bits(const Instance& instance) {
  SamplePath base;
  const auto sites = random_sites(instance, base);
  return static_cast<int>(std::ceil(std::log2(outcome_count(sites)) - 1e-9));
}

double policy_value_exact_fixed(const PolicyParams& params, const Instance& instance) {
  require_valid(instance);
  SamplePath path;
  const auto sites = random_sites(instance, path);
  if (outcome_count(sites) > std::ldexp(1.0, kEnumerationBitLimit)) {
    throw SizeError("policy_value_exact: more than 2^22 sample paths");
  }
  const std::size_t n = instance.num_opportunities();
  double total = 0.0;
  std::function<void(std::size_t, double)> walk = [&](std::size_t k, double weight) {
    if (k == sites.size()) {
      total += weight * static_cast<double>(simulate_run(params, instance, path).total);
      return;
    }
    const Site& s = sites[k];
    switch (s.kind) {
      case Site::IntBit:
        path.int_signup[s.t * n + s.i] = 1;
        walk(k + 1, weight * s.p);
        path.int_signup[s.t * n + s.i] = 0;
        walk(k + 1, weight * (1.0 - s.p));
        break;
      case Site::ExtBit:
        path.ext_signup[s.t] = 1;
        walk(k + 1, weight * s.p);
        path.ext_signup[s.t] = 0;
        walk(k + 1, weight * (1.0 - s.p));
        break;
      case Site::View:
        for (std::size_t pos = 0; pos < s.probs.size(); ++pos) {
          if (s.probs[pos] <= 0.0) continue;
          path.view_position[s.t] = static_cast<int>(pos + 1);
          walk(k + 1, weight * s.probs[pos]);
        }
        break;
    }
  };
  walk(0, 1.0);
  return total;
}

namespace {

constexpr int kGpgQuadrature = 10000;

double gpg_weight(double y) { return 1.0 - std::exp(y - 1.0); }

// Weights realizing a ratio rho = w(y2) / w(y1) with both y in [0, 1).
std::vector<double> gpg_y_for_ratio(double rho) {
  const double w0 = gpg_weight(0.0);
  if (rho <= 1.0) return {0.0, 1.0 + std::log1p(-rho * w0)};
  return {1.0 + std::log1p(-w0 / rho), 0.0};
}

}  // namespace

double gpg_ratio_cdf(double x) {
  if (x <= 0.0) return 0.0;
  const double cap = gpg_weight(0.0);
  double acc = 0.0;
  for (int k = 0; k < kGpgQuadrature; ++k) {
    const double s = x * gpg_weight((k + 0.5) / kGpgQuadrature);
    acc += s >= cap ? 1.0 : -std::log1p(-s);
  }
  return acc / kGpgQuadrature;
}

double policy_value_exact(PolicyKind policy, const Instance& instance, int capacity_slack) {
  PolicyParams params;
  params.kind = policy;
  params.capacity_slack = capacity_slack;
  if (policy != PolicyKind::GPG) return policy_value_exact_fixed(params, instance);

  const std::size_t n = instance.num_opportunities();
  if (n > 2) throw SizeError("policy_value_exact: GPG supports at most 2 opportunities");
  if (n == 1) {
    params.gpg_y = {0.0};
    return policy_value_exact_fixed(params, instance);
  }
  // GPG's choice between opportunities 1 and 2 flips where rho crosses
  // mu1/mu2, so the expectation is piecewise constant in rho.
  std::vector<double> cuts;
  for (const auto& v : instance.arrivals) {
    if (v.is_internal() && v.mu[0] > 0.0 && v.mu[1] > 0.0) cuts.push_back(v.mu[0] / v.mu[1]);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  double total = 0.0;
  double lo = 0.0, f_lo = 0.0;
  for (std::size_t k = 0; k <= cuts.size(); ++k) {
    const bool last = k == cuts.size();
    const double hi = last ? 0.0 : cuts[k];
    const double f_hi = last ? 1.0 : gpg_ratio_cdf(hi);
    const double mass = f_hi - f_lo;
    if (mass > 0.0) {
      double rho;
      if (cuts.empty()) rho = 1.0;
      else if (k == 0) rho = 0.5 * hi;
      else if (last) rho = 2.0 * lo;
      else rho = 0.5 * (lo + hi);
      params.gpg_y = gpg_y_for_ratio(rho);
      total += mass * policy_value_exact_fixed(params, instance);
    }
    lo = hi;
    f_lo = f_hi;
  }
  return total;
}

}  // namespace mcm
