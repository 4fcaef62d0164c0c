#include "mcm/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace mcm {

long long Instance::total_capacity() const {
  long long sum = 0;
  for (const auto& o : opportunities) sum += o.capacity;
  return sum;
}

int Instance::min_capacity() const {
  if (opportunities.empty()) throw DomainError("instance has no opportunities");
  int m = opportunities.front().capacity;
  for (const auto& o : opportunities) m = std::min(m, o.capacity);
  return m;
}

double psi(double fill_rate) {
  if (!(fill_rate >= 0.0 && fill_rate <= 1.0)) {
    throw DomainError("psi: fill rate outside [0,1]");
  }
  return 1.0 - std::exp(fill_rate - 1.0);
}

double compute_efet(const Instance& instance) {
  const std::size_t n = instance.num_opportunities();
  if (n == 0) throw DomainError("compute_efet: empty opportunity set");
  std::vector<long long> targets(n, 0);
  for (const auto& v : instance.arrivals) {
    if (v.is_external() && v.target >= 1 && static_cast<std::size_t>(v.target) <= n) {
      ++targets[static_cast<std::size_t>(v.target - 1)];
    }
  }
  long long filled = 0;
  for (std::size_t i = 0; i < n; ++i) {
    filled += std::min<long long>(instance.opportunities[i].capacity, targets[i]);
  }
  return static_cast<double>(filled) / static_cast<double>(instance.total_capacity());
}

double compute_mcpr(const Instance& instance) {
  double sigma = 1.0;
  for (const auto& v : instance.arrivals) {
    if (!v.is_internal()) continue;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (double m : v.mu) {
      if (m == 0.0) continue;
      if (std::fpclassify(m) == FP_SUBNORMAL) return std::numeric_limits<double>::infinity();
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    if (hi > 0.0) sigma = std::max(sigma, hi / lo);
  }
  return sigma;
}

namespace {

bool is_prob(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

}  // namespace

std::vector<Violation> validate_instance(const Instance& instance) {
  std::vector<Violation> out;
  auto add = [&out](std::string code, std::string msg) {
    out.push_back({std::move(code), std::move(msg)});
  };
  const std::size_t n = instance.num_opportunities();
  if (n == 0) add("no opportunities", "instance has no opportunities");

  for (std::size_t i = 0; i < n; ++i) {
    const auto& o = instance.opportunities[i];
    if (o.id != static_cast<OppId>(i + 1)) {
      add("non-contiguous ids", "opportunity at position " + std::to_string(i + 1) +
                                    " has id " + std::to_string(o.id));
    }
    if (o.capacity < 1) {
      add("non-positive capacity", "opportunity " + std::to_string(o.id) + " has capacity " +
                                       std::to_string(o.capacity));
    }
  }

  for (std::size_t k = 0; k < instance.arrivals.size(); ++k) {
    const auto& v = instance.arrivals[k];
    const std::string where = "arrival " + std::to_string(k + 1);
    if (v.t != static_cast<int>(k + 1)) {
      add("arrival index mismatch", where + " carries t=" + std::to_string(v.t));
    }
    if (v.is_external()) {
      if (v.target == kDummy) {
        add("external without target", where);
      } else if (v.target < 1 || static_cast<std::size_t>(v.target) > n) {
        add("unknown target", where + " targets " + std::to_string(v.target));
      }
      if (!v.mu.empty()) add("external with conversion vector", where);
      if (!(std::isfinite(v.ext_signup_prob) && v.ext_signup_prob > 0.0 &&
            v.ext_signup_prob <= 1.0)) {
        add("bad ext_signup_prob", where);
      }
    } else {
      if (v.target != kDummy) add("internal with target", where);
      if (v.mu.size() != n) {
        add("conversion length mismatch", where + " has " + std::to_string(v.mu.size()) +
                                              " entries, expected " + std::to_string(n));
      }
      bool any_pos = false;
      bool all_prob = true;
      for (double m : v.mu) {
        all_prob = all_prob && is_prob(m);
        any_pos = any_pos || m > 0.0;
      }
      if (!all_prob) add("conversion out of range", where);
      if (!any_pos) add("internal without compatible opportunity", where);
    }
  }

  if (instance.cascade) {
    const auto& c = *instance.cascade;
    const std::size_t T = instance.arrivals.size();
    if (c.view_prob.size() != T || c.exit_prob.size() != T) {
      add("cascade length mismatch", "view_prob/exit_prob must have one entry per arrival");
    } else {
      for (std::size_t k = 0; k < T; ++k) {
        if (!is_prob(c.exit_prob[k])) add("cascade exit_prob out of range", "arrival " + std::to_string(k + 1));
        if (!is_prob(c.view_prob[k])) {
          add("cascade view_prob out of range", "arrival " + std::to_string(k + 1));
        } else if (instance.arrivals[k].is_internal() && c.view_prob[k] <= 0.0) {
          add("cascade view_prob zero", "arrival " + std::to_string(k + 1));
        }
      }
    }
    if (c.max_list_len < 1) add("cascade max_list_len", "K must be positive");
  }

  if (instance.recency) {
    if (instance.recency->size() != n) add("recency length mismatch", "one score per opportunity");
    for (double r : *instance.recency) {
      if (!std::isfinite(r)) add("recency not finite", "recency scores must be finite");
    }
  }
  return out;
}

void require_valid(const Instance& instance) {
  auto v = validate_instance(instance);
  if (v.empty()) return;
  std::ostringstream os;
  os << "invalid instance:";
  for (const auto& x : v) os << "\n  " << x.code << ": " << x.message;
  throw ValidationError(os.str());
}

}  // namespace mcm
