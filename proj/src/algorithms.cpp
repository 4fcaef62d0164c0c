#include "mcm/algorithms.hpp"

#include <algorithm>
#include <cmath>

namespace mcm {

PolicyKind parse_policy(std::string_view id) {
  if (id == "ac") return PolicyKind::AC;
  if (id == "msvv") return PolicyKind::MSVV;
  if (id == "gpg") return PolicyKind::GPG;
  if (id == "cp") return PolicyKind::CP;
  if (id == "scp") return PolicyKind::SCP;
  if (id == "rc") return PolicyKind::RC;
  if (id == "ac-r") return PolicyKind::ACR;
  throw ConfigError("unknown policy '" + std::string(id) + "'");
}

std::string_view policy_id(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::AC: return "ac";
    case PolicyKind::MSVV: return "msvv";
    case PolicyKind::GPG: return "gpg";
    case PolicyKind::CP: return "cp";
    case PolicyKind::SCP: return "scp";
    case PolicyKind::RC: return "rc";
    case PolicyKind::ACR: return "ac-r";
  }
  return "?";
}

std::vector<PolicyKind> parse_policy_list(std::string_view csv) {
  std::vector<PolicyKind> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = csv.find(',', pos);
    const std::size_t end = comma == std::string_view::npos ? csv.size() : comma;
    if (end > pos) out.push_back(parse_policy(csv.substr(pos, end - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw ConfigError("empty policy list");
  return out;
}

// ---------------------------------------------------------------------------

PolicyState::PolicyState(const Instance& instance, int capacity_slack)
    : instance_(&instance),
      slack_(capacity_slack),
      signups_int_(instance.num_opportunities(), 0),
      signups_ext_(instance.num_opportunities(), 0),
      raw_(instance.num_opportunities(), 0) {}

double PolicyState::ac_fill_rate(OppId i) const {
  const int denom = capacity(i) - signups_ext(i);
  if (denom <= 0) return 1.0;
  return std::min(1.0, static_cast<double>(signups_int(i)) / denom);
}

double PolicyState::msvv_fill_rate(OppId i) const {
  return std::min(1.0, static_cast<double>(filled_total(i)) / capacity(i));
}

void PolicyState::record_external(OppId i) {
  ++raw_[idx(i)];
  if (filled_total(i) < cap_limit(i)) ++signups_ext_[idx(i)];
}

void PolicyState::record_internal(OppId i) {
  ++raw_[idx(i)];
  if (filled_total(i) < cap_limit(i)) ++signups_int_[idx(i)];
}

void PolicyState::set_counters(OppId i, int signups_int, int signups_ext) {
  signups_int_[idx(i)] = signups_int;
  signups_ext_[idx(i)] = signups_ext;
}

// ---------------------------------------------------------------------------

namespace {

// argmax with the dummy at value 0 and strict improvement, so ties go to the
// lowest index and zero-valued opportunities lose to the dummy.
template <class Value>
OppId argmax_from_dummy(std::size_t n, Value value) {
  OppId best = kDummy;
  double best_v = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const OppId i = static_cast<OppId>(k + 1);
    const double v = value(i);
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  return best;
}

// argmax of a score over a candidate set; dummy when the set is empty.
template <class Admit, class Score>
OppId argmax_over(std::size_t n, Admit admit, Score score) {
  OppId best = kDummy;
  double best_s = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const OppId i = static_cast<OppId>(k + 1);
    if (!admit(i)) continue;
    const double s = score(i);
    if (best == kDummy || s > best_s) {
      best_s = s;
      best = i;
    }
  }
  return best;
}

double mu_of(const Volunteer& v, OppId i) { return v.mu[static_cast<std::size_t>(i - 1)]; }

const std::vector<double>& require_recency(const PolicyState& state) {
  if (!state.instance().recency) {
    throw ConfigError("CP/SCP require per-opportunity recency scores");
  }
  return *state.instance().recency;
}

}  // namespace

Recommendation ac_recommend(const PolicyState& state, const Volunteer& v) {
  return Recommendation::one(argmax_from_dummy(state.n(), [&](OppId i) {
    const double m = mu_of(v, i);
    return m == 0.0 ? 0.0 : m * psi(state.ac_fill_rate(i));
  }));
}

Recommendation msvv_recommend(const PolicyState& state, const Volunteer& v) {
  return Recommendation::one(argmax_from_dummy(state.n(), [&](OppId i) {
    const double m = mu_of(v, i);
    return m == 0.0 ? 0.0 : m * psi(state.msvv_fill_rate(i));
  }));
}

Recommendation gpg_recommend(const PolicyState& state, const Volunteer& v,
                             const std::vector<double>& gpg_y) {
  if (gpg_y.size() != state.n()) throw ConfigError("GPG weights not initialized");
  return Recommendation::one(argmax_from_dummy(state.n(), [&](OppId i) {
    if (state.remaining(i) <= 0) return 0.0;
    return mu_of(v, i) * (1.0 - std::exp(gpg_y[static_cast<std::size_t>(i - 1)] - 1.0));
  }));
}

Recommendation cp_recommend(const PolicyState& state, const Volunteer& v) {
  const auto& rec = require_recency(state);
  return Recommendation::one(argmax_over(
      state.n(), [&](OppId i) { return mu_of(v, i) > 0.0; },
      [&](OppId i) { return rec[static_cast<std::size_t>(i - 1)]; }));
}

Recommendation scp_recommend(const PolicyState& state, const Volunteer& v) {
  const auto& rec = require_recency(state);
  return Recommendation::one(argmax_over(
      state.n(), [&](OppId i) { return mu_of(v, i) > 0.0 && state.remaining(i) > 0; },
      [&](OppId i) { return rec[static_cast<std::size_t>(i - 1)]; }));
}

Recommendation rc_recommend(const PolicyState& state, const Volunteer& v) {
  return Recommendation::one(argmax_over(
      state.n(), [&](OppId i) { return mu_of(v, i) > 0.0 && state.remaining(i) > 0; },
      [&](OppId i) { return static_cast<double>(state.remaining(i)); }));
}

Recommendation acr_rank(const PolicyState& state, const Volunteer& v,
                        const CascadeParams& cascade) {
  std::vector<std::pair<double, OppId>> scored;
  for (std::size_t k = 0; k < state.n(); ++k) {
    const OppId i = static_cast<OppId>(k + 1);
    const double m = mu_of(v, i);
    if (m == 0.0) continue;
    const double s = m * psi(state.ac_fill_rate(i));
    if (s > 0.0) scored.emplace_back(s, i);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  Recommendation r;
  r.is_ranking = true;
  const std::size_t K = static_cast<std::size_t>(cascade.max_list_len);
  for (std::size_t k = 0; k < scored.size() && k < K; ++k) r.ranked.push_back(scored[k].second);
  return r;
}

Recommendation recommend(const PolicyParams& params, const PolicyState& state,
                         const Volunteer& v) {
  const auto& cascade = state.instance().cascade;
  if (params.kind == PolicyKind::ACR) {
    if (!cascade) throw ConfigError("ac-r requires cascade parameters on the instance");
    return acr_rank(state, v, *cascade);
  }
  Recommendation r;
  switch (params.kind) {
    case PolicyKind::AC: r = ac_recommend(state, v); break;
    case PolicyKind::MSVV: r = msvv_recommend(state, v); break;
    case PolicyKind::GPG: r = gpg_recommend(state, v, params.gpg_y); break;
    case PolicyKind::CP: r = cp_recommend(state, v); break;
    case PolicyKind::SCP: r = scp_recommend(state, v); break;
    case PolicyKind::RC: r = rc_recommend(state, v); break;
    case PolicyKind::ACR: break;
  }
  if (cascade) {
    r.is_ranking = true;
    if (r.single != kDummy) r.ranked.push_back(r.single);
    r.single = kDummy;
  }
  return r;
}

// ---------------------------------------------------------------------------

std::vector<double> draw_gpg_y(std::size_t n, Rng& rng) {
  std::vector<double> y(n);
  for (auto& x : y) x = uniform01(rng);
  return y;
}

std::vector<double> view_position_probs(double view_prob, double exit_prob, int max_list_len) {
  std::vector<double> p(static_cast<std::size_t>(max_list_len) + 1, 0.0);
  const double pass = (1.0 - view_prob) * (1.0 - exit_prob);
  double reach = 1.0;
  double acc = 0.0;
  for (int k = 0; k < max_list_len; ++k) {
    p[static_cast<std::size_t>(k)] = view_prob * reach;
    acc += p[static_cast<std::size_t>(k)];
    reach *= pass;
  }
  p.back() = std::max(0.0, 1.0 - acc);
  return p;
}

SamplePath draw_sample_path(const Instance& instance, Rng& rng) {
  const std::size_t n = instance.num_opportunities();
  const std::size_t T = instance.horizon();
  SamplePath path;
  path.n = n;
  path.int_signup.assign(T * n, 0);
  path.ext_signup.assign(T, 0);
  if (instance.cascade) path.view_position.assign(T, 0);
  for (std::size_t t = 0; t < T; ++t) {
    const auto& v = instance.arrivals[t];
    if (v.is_external()) {
      path.ext_signup[t] = bernoulli(rng, v.ext_signup_prob) ? 1 : 0;
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) path.int_signup[t * n + i] = bernoulli(rng, v.mu[i]) ? 1 : 0;
    if (instance.cascade) {
      const auto& c = *instance.cascade;
      const auto probs = view_position_probs(c.view_prob[t], c.exit_prob[t], c.max_list_len);
      const double u = uniform01(rng);
      double acc = 0.0;
      int pos = c.max_list_len + 1;
      for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
        acc += probs[k];
        if (u < acc) {
          pos = static_cast<int>(k + 1);
          break;
        }
      }
      path.view_position[t] = pos;
    }
  }
  return path;
}

void check_path_shape(const Instance& instance, const SamplePath& path) {
  const std::size_t n = instance.num_opportunities();
  const std::size_t T = instance.horizon();
  if (path.n != n || path.int_signup.size() != T * n || path.ext_signup.size() != T) {
    throw DomainError("sample path shape does not match instance");
  }
  if (instance.cascade && path.view_position.size() != T) {
    throw DomainError("sample path lacks cascade view positions");
  }
}

RunResult simulate_run(const PolicyParams& params, const Instance& instance,
                       const SamplePath& path) {
  check_path_shape(instance, path);
  PolicyState state(instance, params.capacity_slack);
  for (std::size_t t = 0; t < instance.horizon(); ++t) {
    const auto& v = instance.arrivals[t];
    if (v.is_external()) {
      if (path.ext_signup[t]) state.record_external(v.target);
      continue;
    }
    const Recommendation r = recommend(params, state, v);
    OppId viewed = kDummy;
    if (r.is_ranking) {
      const int pos = path.view_position[t];
      if (pos >= 1 && static_cast<std::size_t>(pos) <= r.ranked.size()) {
        viewed = r.ranked[static_cast<std::size_t>(pos - 1)];
      }
    } else {
      viewed = r.single;
    }
    if (viewed != kDummy && path.signs_up(t, viewed)) state.record_internal(viewed);
  }
  RunResult out;
  const std::size_t n = instance.num_opportunities();
  out.filled_int.resize(n);
  out.filled_ext.resize(n);
  out.raw_signups.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const OppId i = static_cast<OppId>(k + 1);
    out.filled_int[k] = state.signups_int(i);
    out.filled_ext[k] = state.signups_ext(i);
    out.raw_signups[k] = state.raw_signups(i);
    out.total += out.filled_int[k] + out.filled_ext[k];
  }
  return out;
}

}  // namespace mcm
