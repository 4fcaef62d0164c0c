#pragma once

// Domain model for online matching with multi-channel (internal/external) traffic.
//
// Opportunities are identified by 1-based ids; id 0 is the dummy "no
// recommendation" sink. Per-opportunity arrays are 0-based (id i lives at
// index i - 1) and never store the dummy.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace mcm {

// Error taxonomy. The CLI maps each family onto an exit code.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using OppId = int;
inline constexpr OppId kDummy = 0;

enum class Source { External, Internal };

struct Opportunity {
  OppId id = 0;
  int capacity = 1;
};

struct Volunteer {
  int t = 0;  // arrival position, 1-based
  Source source = Source::Internal;
  OppId target = kDummy;          // External only
  double ext_signup_prob = 1.0;   // External only
  std::vector<double> mu;         // Internal only, length n

  bool is_external() const { return source == Source::External; }
  bool is_internal() const { return source == Source::Internal; }
};

// Opportunity-agnostic cascade: per-arrival view probability nu_t and exit
// probability q_t, lists truncated at max_list_len.
struct CascadeParams {
  std::vector<double> view_prob;
  std::vector<double> exit_prob;
  int max_list_len = 1;
};

struct Instance {
  std::vector<Opportunity> opportunities;
  std::vector<Volunteer> arrivals;
  std::optional<CascadeParams> cascade;
  std::optional<std::vector<double>> recency;
  nlohmann::json meta = nlohmann::json::object();

  std::size_t num_opportunities() const { return opportunities.size(); }
  std::size_t horizon() const { return arrivals.size(); }
  int capacity(OppId id) const { return opportunities[static_cast<std::size_t>(id - 1)].capacity; }
  long long total_capacity() const;
  int min_capacity() const;
};

// Fixed realization of all volunteer randomness. Arrays are indexed by the
// 0-based arrival position; int_signup is row-major T x n.
struct SamplePath {
  std::size_t n = 0;
  std::vector<std::uint8_t> int_signup;
  std::vector<std::uint8_t> ext_signup;
  std::vector<int> view_position;  // empty unless the instance has a cascade

  bool signs_up(std::size_t t_index, OppId id) const {
    return int_signup[t_index * n + static_cast<std::size_t>(id - 1)] != 0;
  }
};

struct RunResult {
  std::vector<int> filled_int;
  std::vector<int> filled_ext;
  std::vector<int> raw_signups;
  long long total = 0;
};

struct Violation {
  std::string code;
  std::string message;
};

// Trade-off function 1 - exp(fill_rate - 1) on [0, 1].
double psi(double fill_rate);

// Effective fraction of external traffic. Counts targeting volunteers, not
// realized sign-ups.
double compute_efet(const Instance& instance);

// Maximum conversion probability ratio; +inf if a positive mu is subnormal.
double compute_mcpr(const Instance& instance);

std::vector<Violation> validate_instance(const Instance& instance);

// Throws ValidationError listing every violation when the instance is invalid.
void require_valid(const Instance& instance);

}  // namespace mcm
