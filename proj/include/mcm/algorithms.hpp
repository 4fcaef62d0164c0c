#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mcm/core.hpp"
#include "mcm/rng.hpp"

namespace mcm {

enum class PolicyKind { AC, MSVV, GPG, CP, SCP, RC, ACR };

PolicyKind parse_policy(std::string_view id);
std::string_view policy_id(PolicyKind kind);
std::vector<PolicyKind> parse_policy_list(std::string_view csv);

struct PolicyParams {
  PolicyKind kind = PolicyKind::AC;
  std::vector<double> gpg_y;  // GPG only; one uniform per opportunity
  // Fault injection for mutation testing: the capacity cap applied to the
  // fill counters becomes c + capacity_slack. Must be 0 in normal use.
  int capacity_slack = 0;
};

// Per-run bookkeeping. signups_int/signups_ext are the min-capped AC
// counters; with the caps they coincide with the useful fills by source, so
// the MSVV counter is their sum.
class PolicyState {
 public:
  PolicyState(const Instance& instance, int capacity_slack = 0);

  const Instance& instance() const { return *instance_; }
  std::size_t n() const { return signups_int_.size(); }

  int capacity(OppId i) const { return instance_->capacity(i); }
  int cap_limit(OppId i) const { return capacity(i) + slack_; }
  int signups_int(OppId i) const { return signups_int_[idx(i)]; }
  int signups_ext(OppId i) const { return signups_ext_[idx(i)]; }
  int filled_total(OppId i) const { return signups_int(i) + signups_ext(i); }
  int raw_signups(OppId i) const { return raw_[idx(i)]; }
  int remaining(OppId i) const { return cap_limit(i) - filled_total(i); }

  double ac_fill_rate(OppId i) const;
  double msvv_fill_rate(OppId i) const;

  void record_external(OppId i);
  void record_internal(OppId i);

  // Test hook: place counters directly. Values are not re-validated.
  void set_counters(OppId i, int signups_int, int signups_ext);

 private:
  static std::size_t idx(OppId i) { return static_cast<std::size_t>(i - 1); }

  const Instance* instance_;
  int slack_;
  std::vector<int> signups_int_;
  std::vector<int> signups_ext_;
  std::vector<int> raw_;
};

// A single opportunity (0 = dummy) or, under a cascade, a ranked list of
// distinct non-dummy opportunities.
struct Recommendation {
  OppId single = kDummy;
  std::vector<OppId> ranked;
  bool is_ranking = false;

  static Recommendation one(OppId id) { return {id, {}, false}; }
};

Recommendation ac_recommend(const PolicyState& state, const Volunteer& volunteer);
Recommendation msvv_recommend(const PolicyState& state, const Volunteer& volunteer);
Recommendation gpg_recommend(const PolicyState& state, const Volunteer& volunteer,
                             const std::vector<double>& gpg_y);
Recommendation cp_recommend(const PolicyState& state, const Volunteer& volunteer);
Recommendation scp_recommend(const PolicyState& state, const Volunteer& volunteer);
Recommendation rc_recommend(const PolicyState& state, const Volunteer& volunteer);
Recommendation acr_rank(const PolicyState& state, const Volunteer& volunteer,
                        const CascadeParams& cascade);

// Dispatch. Under a cascade every policy yields a ranking; single-choice
// policies produce a list of length <= 1.
Recommendation recommend(const PolicyParams& params, const PolicyState& state,
                         const Volunteer& volunteer);

// GPG's random weights, drawn once per run.
std::vector<double> draw_gpg_y(std::size_t n, Rng& rng);

SamplePath draw_sample_path(const Instance& instance, Rng& rng);

// Cascade view-position law: P[k] for k = 1..K and P[K+1] = no view.
std::vector<double> view_position_probs(double view_prob, double exit_prob, int max_list_len);

void check_path_shape(const Instance& instance, const SamplePath& path);

RunResult simulate_run(const PolicyParams& params, const Instance& instance,
                       const SamplePath& path);

}  // namespace mcm
