#include "mcm/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <thread>

#include "mcm/core.hpp"
#include "mcm/lp.hpp"

namespace mcm {

namespace {

const double kE = std::exp(1.0);
const double kOneMinusInvE = 1.0 - 1.0 / kE;

void check_beta(double beta, const char* who) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError(std::string(who) + ": beta outside [0,1]");
}

double inv_c(double c_min) {
  if (!(c_min >= 1.0)) throw DomainError("c_min must be >= 1");
  return std::isinf(c_min) ? 0.0 : 1.0 / c_min;
}

double capacity_factor(double c_min) { return std::exp(-inv_c(c_min)); }

// exp(-a/(1-a)), with the a -> 1 limit 0.
double decay(double a) { return a >= 1.0 ? 0.0 : std::exp(-a / (1.0 - a)); }

double warmup_lhs(double a) { return a + (1.0 - a) * (decay(a) - 1.0); }

double prop5_lhs(double a) { return warmup_lhs(a) + (1.0 - a) / std::exp(decay(a)); }

// Unique root of f(a) = beta on [0,1]. Requires a single sign change of
// f - beta on a 10^4-point grid, then bisects.
double unique_root(const std::function<double(double)>& f, double beta, const char* who) {
  constexpr int kGrid = 10000;
  int changes = 0;
  int last_sign = 0;
  int zero_runs = 0;
  bool in_zero = false;
  double zero_at = 0.0;
  std::size_t bracket = 0;
  for (int k = 0; k <= kGrid; ++k) {
    const double a = static_cast<double>(k) / kGrid;
    const double h = f(a) - beta;
    const int s = h > 0.0 ? 1 : (h < 0.0 ? -1 : 0);
    if (s == 0) {
      if (!in_zero) {
        ++zero_runs;
        zero_at = a;
      }
      in_zero = true;
      continue;
    }
    in_zero = false;
    if (last_sign != 0 && s != last_sign) {
      ++changes;
      bracket = static_cast<std::size_t>(k);
    }
    last_sign = s;
  }
  if (changes <= 1 && zero_runs == 1) return zero_at;
  if (changes != 1 || zero_runs > 1) {
    throw NumericalError(std::string(who) + ": root is not unique on [0,1]");
  }
  double lo = static_cast<double>(bracket - 1) / kGrid;
  double hi = static_cast<double>(bracket) / kGrid;
  const bool rising = f(hi) - beta > 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double h = f(mid) - beta;
    if (std::abs(h) <= 1e-12 && hi - lo < 1e-12) return mid;
    if ((h > 0.0) == rising) hi = mid;
    else lo = mid;
    if (hi - lo <= 1e-16) break;
  }
  const double mid = 0.5 * (lo + hi);
  if (std::abs(f(mid) - beta) > 1e-12) throw NumericalError(std::string(who) + ": bisection stalled");
  return mid;
}

}  // namespace

double hardness_upper(double beta) {
  check_beta(beta, "hardness_upper");
  if (beta <= 1.0 / kE) return kOneMinusInvE;
  return 1.0 + beta * std::log(beta);
}

double warmup_upper(double beta) {
  check_beta(beta, "warmup_upper");
  return beta + (1.0 - beta) * kOneMinusInvE;
}

double warmup_ac_lower(double beta, double c_min) {
  return std::max(0.0, warmup_upper(beta) - inv_c(c_min));
}

double ac_lower_deterministic(double beta, double c_min) {
  return std::max(0.0, hardness_upper(beta) - 2.0 * inv_c(c_min));
}

double warmup_msvv_alpha1(double beta) {
  check_beta(beta, "warmup_msvv_upper");
  return unique_root(warmup_lhs, beta, "warmup_msvv_upper");
}

double warmup_msvv_upper(double beta) {
  const double a = warmup_msvv_alpha1(beta);
  return 1.0 - (1.0 - a) / std::exp(decay(a));
}

double msvv_general_alpha1(double beta) {
  check_beta(beta, "msvv_general_upper");
  if (beta <= 1.0 / kE) return 0.0;
  return unique_root(prop5_lhs, beta, "msvv_general_upper");
}

double msvv_general_alpha2(double beta) {
  const double a = msvv_general_alpha1(beta);
  return 1.0 - (1.0 - a) / std::exp(decay(a));
}

double msvv_general_alpha3(double beta, int alpha4_grid) {
  check_beta(beta, "msvv_general_upper");
  if (alpha4_grid < 2) throw DomainError("alpha4 grid needs at least 2 points");
  if (beta >= 1.0) return 1.0;
  double best = kInf;
  for (int k = 0; k < alpha4_grid; ++k) {
    const double a4 = k == alpha4_grid - 1 ? beta : beta * k / (alpha4_grid - 1);
    if (1.0 - a4 <= 0.0) {
      best = std::min(best, 1.0);
      continue;
    }
    const double a5 = std::min(1.0 - a4, a4 * (beta - a4) / (1.0 - beta));
    const double a6 = std::min(1.0 - a4, 1.0 - (1.0 - a5) / kE);
    const double tail = (1.0 - a6 == 1.0 - a5) ? 0.0 : (1.0 - a6) * std::log((1.0 - a5) / (1.0 - a6));
    best = std::min(best, 1.0 - ((1.0 - beta) / (1.0 - a4)) * (a5 + tail));
  }
  return best;
}

double msvv_general_upper(double beta, int alpha4_grid) {
  check_beta(beta, "msvv_general_upper");
  if (beta <= 1.0 / kE) return kOneMinusInvE;
  return std::min(msvv_general_alpha2(beta), msvv_general_alpha3(beta, alpha4_grid));
}

// ---------------------------------------------------------------------------

double g_fn(double x1, double x2) {
  constexpr double tol = 1e-12;
  if (!(x1 >= -tol && x2 >= -tol && x1 + x2 <= 1.0 + tol)) {
    throw DomainError("g: point outside {x1, x2 >= 0, x1 + x2 <= 1}");
  }
  x1 = std::clamp(x1, 0.0, 1.0);
  x2 = std::clamp(x2, 0.0, 1.0 - x1);
  double mid = 0.0;
  if (x1 < 1.0) mid = (1.0 - x1) * psi(std::min(1.0, x2 / (1.0 - x1)));
  return kOneMinusInvE + x1 + mid - psi(x2);
}

EnvelopeEvaluator::EnvelopeEvaluator(int grid_m) : m_(grid_m) {
  if (grid_m < 1) throw DomainError("envelope grid must be >= 1");
  for (int a = 0; a <= m_; ++a) {
    for (int b = 0; a + b <= m_; ++b) {
      const double x1 = static_cast<double>(a) / m_;
      const double x2 = static_cast<double>(b) / m_;
      qx_.push_back(x1);
      qy_.push_back(x2);
      gv_.push_back(g_fn(x1, x2));
    }
  }
}

bool EnvelopeEvaluator::lookup(const Facet& f, double x1, double x2, double& out) const {
  const double d = (f.py[1] - f.py[2]) * (f.px[0] - f.px[2]) + (f.px[2] - f.px[1]) * (f.py[0] - f.py[2]);
  const double l0 = ((f.py[1] - f.py[2]) * (x1 - f.px[2]) + (f.px[2] - f.px[1]) * (x2 - f.py[2])) / d;
  const double l1 = ((f.py[2] - f.py[0]) * (x1 - f.px[2]) + (f.px[0] - f.px[2]) * (x2 - f.py[2])) / d;
  const double l2 = 1.0 - l0 - l1;
  constexpr double tol = -1e-12;
  if (l0 < tol || l1 < tol || l2 < tol) return false;
  out = f.a + f.b * x1 + f.c * x2;
  return true;
}

double EnvelopeEvaluator::solve(double x1, double x2) {
  const std::size_t N = gv_.size();
  LpProblem p;
  p.num_vars = N;
  p.objective.resize(N);
  for (std::size_t k = 0; k < N; ++k) p.objective[k] = -gv_[k];
  p.add_row(std::vector<double>(N, 1.0), RowSense::Equal, 1.0);
  p.add_row(qx_, RowSense::Equal, x1);
  p.add_row(qy_, RowSense::Equal, x2);
  const LpSolution sol = lp_solve(p);
  ++solves_;
  if (sol.status != LpStatus::Optimal) throw NumericalError("envelope LP not optimal");

  // Dual plane h(q) = -(y0 + y1 q1 + y2 q2) supports g from below and is
  // tight on the basic grid points.
  Facet f{-sol.duals[0], -sol.duals[1], -sol.duals[2], {}, {}};
  bool structural = sol.basis.size() == 3;
  for (std::size_t r = 0; structural && r < 3; ++r) {
    const std::size_t j = sol.basis[r];
    if (j >= N) {
      structural = false;
      break;
    }
    f.px[r] = qx_[j];
    f.py[r] = qy_[j];
  }
  if (structural) {
    const double area = (f.px[1] - f.px[0]) * (f.py[2] - f.py[0]) - (f.px[2] - f.px[0]) * (f.py[1] - f.py[0]);
    if (std::abs(area) > 1e-14) facets_.push_back(f);
  }
  return -sol.value;
}

double EnvelopeEvaluator::operator()(double x1, double x2) {
  g_fn(x1, x2);  // domain check
  x1 = std::clamp(x1, 0.0, 1.0);
  x2 = std::clamp(x2, 0.0, 1.0 - x1);
  double v;
  if (last_hit_ < facets_.size() && lookup(facets_[last_hit_], x1, x2, v)) {
    ++hits_;
    return v;
  }
  for (std::size_t k = facets_.size(); k-- > 0;) {
    if (lookup(facets_[k], x1, x2, v)) {
      last_hit_ = k;
      ++hits_;
      return v;
    }
  }
  v = solve(x1, x2);
  last_hit_ = facets_.empty() ? 0 : facets_.size() - 1;
  return v;
}

double envelope_eval(double x1, double x2, int grid_m) {
  EnvelopeEvaluator env(grid_m);
  return env(x1, x2);
}

AcLowerResult ac_lower_general_detail(const BoundQuery& q, EnvelopeEvaluator& env) {
  check_beta(q.beta, "ac_lower_general");
  if (!(q.sigma >= 1.0)) throw DomainError("ac_lower_general: sigma must be >= 1");
  if (!(q.z_step > 0.0)) throw DomainError("ac_lower_general: z_step must be positive");
  const double e = capacity_factor(q.c_min);
  const double z_lo = e * kOneMinusInvE;
  for (long k = 0;; ++k) {
    double z = z_lo + static_cast<double>(k) * q.z_step;
    const bool last = z >= 1.0;
    if (last) z = 1.0;
    const double x1 = std::isinf(q.sigma) ? 0.0 : std::max(0.0, q.beta - q.sigma + z);
    const double x2 = z - x1;
    if (z >= e * env(x1, x2)) return {std::max(q.beta, z), z, false};
    if (last) break;
  }
  return {std::max(q.beta, z_lo), z_lo, true};
}

double ac_lower_general(double beta, double c_min, double sigma, int grid_m, double z_step) {
  EnvelopeEvaluator env(grid_m);
  return ac_lower_general_detail({beta, c_min, sigma, grid_m, z_step}, env).value;
}

double ranking_lower(double beta, double c_min) {
  check_beta(beta, "ranking_lower");
  return std::max(beta, capacity_factor(c_min) * kOneMinusInvE);
}

double cascade_lower(double beta, double c_min, double sigma, int grid_m, double z_step) {
  return ac_lower_general(beta, c_min, sigma, grid_m, z_step);
}

// ---------------------------------------------------------------------------

namespace {

// Fixed chunking keeps every envelope cache's history independent of the
// thread count, so output bytes do not depend on parallelism.
constexpr std::size_t kBetaChunk = 8;

}  // namespace

std::vector<BoundCurve> emit_bound_curves(const CurveRequest& req) {
  std::vector<std::string> names = req.names.empty() ? bound_names() : req.names;
  for (const auto& n : names) {
    if (std::find(bound_names().begin(), bound_names().end(), n) == bound_names().end()) {
      throw ConfigError("unknown bound '" + n + "'");
    }
  }
  std::vector<double> betas = req.betas;
  std::sort(betas.begin(), betas.end());
  for (double b : betas) check_beta(b, "emit_bound_curves");

  std::vector<BoundCurve> curves;
  for (const auto& n : names) curves.push_back({n, req.c_min, req.sigma, std::vector<BoundSample>(betas.size())});

  auto eval_chunk = [&](std::size_t chunk) {
    EnvelopeEvaluator env(req.envelope_grid);
    const std::size_t lo = chunk * kBetaChunk;
    const std::size_t hi = std::min(betas.size(), lo + kBetaChunk);
    for (std::size_t k = lo; k < hi; ++k) {
      const double b = betas[k];
      double general = -1.0;
      auto general_value = [&]() {
        if (general < 0.0) {
          general = ac_lower_general_detail({b, req.c_min, req.sigma, req.envelope_grid, req.z_step}, env).value;
        }
        return general;
      };
      for (auto& c : curves) {
        double v = 0.0;
        if (c.name == "hardness_upper") v = hardness_upper(b);
        else if (c.name == "warmup_upper") v = warmup_upper(b);
        else if (c.name == "warmup_ac_lower") v = warmup_ac_lower(b, req.c_min);
        else if (c.name == "warmup_msvv_upper") v = warmup_msvv_upper(b);
        else if (c.name == "ac_lower_deterministic") v = ac_lower_deterministic(b, req.c_min);
        else if (c.name == "ac_lower_general") v = general_value();
        else if (c.name == "msvv_general_upper") v = msvv_general_upper(b, req.alpha4_grid);
        else if (c.name == "ranking_lower") v = ranking_lower(b, req.c_min);
        else if (c.name == "cascade_lower") v = general_value();
        c.samples[k] = {b, v};
      }
    }
  };

  const std::size_t chunks = (betas.size() + kBetaChunk - 1) / kBetaChunk;
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(req.threads, chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) eval_chunk(c);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w]() {
        try {
          for (std::size_t c = w; c < chunks; c += workers) eval_chunk(c);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return curves;
}

namespace {

std::string fmt_param(double v) {
  if (std::isinf(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string bound_curves_csv(const std::vector<BoundCurve>& curves) {
  std::string out = "beta,bound_name,c_min,sigma,value\n";
  if (curves.empty()) return out;
  char buf[64];
  for (std::size_t k = 0; k < curves.front().samples.size(); ++k) {
    for (const auto& c : curves) {
      std::snprintf(buf, sizeof buf, "%.10g", c.samples[k].beta);
      out += buf;
      out += ',' + c.name + ',' + fmt_param(c.c_min) + ',' + fmt_param(c.sigma) + ',';
      std::snprintf(buf, sizeof buf, "%.12f", c.samples[k].value);
      out += buf;
      out += '\n';
    }
  }
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  double lo, hi, step;
  char tail;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &lo, &hi, &step, &tail) != 3) {
    if (std::sscanf(text.c_str(), "%lf%c", &lo, &tail) == 1) return {lo};
    throw ConfigError("malformed grid '" + text + "', expected lo:hi:step");
  }
  if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ConfigError("malformed grid '" + text + "'");
  }
  const double span = (hi - lo) / step;
  const long n = static_cast<long>(std::floor(span + 1e-9));
  if (n > 10000000) throw ConfigError("grid '" + text + "' is too large");
  std::vector<double> out;
  for (long k = 0; k <= n; ++k) out.push_back(lo + static_cast<double>(k) * step);
  if (std::abs(out.back() - hi) < 1e-9 * std::max(1.0, std::abs(hi))) out.back() = hi;
  return out;
}

}  // namespace mcm
