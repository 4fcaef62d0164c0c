#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace mcm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// c_min and sigma use +inf for the asymptotic / unbounded cases.
struct BoundQuery {
  double beta = 0.0;
  double c_min = kInf;
  double sigma = 1.0;
  int envelope_grid = 200;
  double z_step = 1e-4;
};

double hardness_upper(double beta);
double warmup_upper(double beta);
double warmup_ac_lower(double beta, double c_min);
double ac_lower_deterministic(double beta, double c_min);

// Root of beta = a + (1-a)(exp(-a/(1-a)) - 1) on [0,1].
double warmup_msvv_alpha1(double beta);
double warmup_msvv_upper(double beta);

// Root of the same equation with the extra (1-a)/exp(exp(-a/(1-a))) term;
// defined for beta > 1/e.
double msvv_general_alpha1(double beta);
double msvv_general_alpha2(double beta);
double msvv_general_alpha3(double beta, int alpha4_grid = 2001);
double msvv_general_upper(double beta, int alpha4_grid = 2001);

double g_fn(double x1, double x2);

// Lower convex envelope of g over the triangular grid {(a/m, b/m): a+b <= m},
// one LP per call.
double envelope_eval(double x1, double x2, int grid_m);

// Envelope evaluator that keeps the optimal dual plane of each solved LP
// together with its support triangle. A query inside a cached triangle is
// answered from the plane, which the primal/dual pair certifies as exact.
// Not thread-safe; use one instance per thread.
class EnvelopeEvaluator {
 public:
  explicit EnvelopeEvaluator(int grid_m);

  double operator()(double x1, double x2);
  int grid() const { return m_; }
  std::size_t lp_solves() const { return solves_; }
  std::size_t cache_hits() const { return hits_; }

 private:
  struct Facet {
    double a, b, c;        // plane value a + b*x1 + c*x2
    double px[3], py[3];   // support triangle
  };
  bool lookup(const Facet& f, double x1, double x2, double& out) const;
  double solve(double x1, double x2);

  int m_;
  std::vector<double> qx_, qy_, gv_;
  std::vector<Facet> facets_;
  std::size_t last_hit_ = 0;
  std::size_t solves_ = 0;
  std::size_t hits_ = 0;
};

struct AcLowerResult {
  double value = 0.0;
  double z_star = 0.0;
  bool scan_exhausted = false;
};

AcLowerResult ac_lower_general_detail(const BoundQuery& q, EnvelopeEvaluator& env);
double ac_lower_general(double beta, double c_min, double sigma, int grid_m = 200,
                        double z_step = 1e-4);

double ranking_lower(double beta, double c_min);
double cascade_lower(double beta, double c_min, double sigma, int grid_m = 200,
                     double z_step = 1e-4);

struct BoundSample {
  double beta;
  double value;
};

struct BoundCurve {
  std::string name;
  double c_min;
  double sigma;
  std::vector<BoundSample> samples;
};

inline const std::vector<std::string>& bound_names() {
  static const std::vector<std::string> names = {
      "hardness_upper",          "warmup_upper",   "warmup_ac_lower",
      "warmup_msvv_upper",       "ac_lower_deterministic", "ac_lower_general",
      "msvv_general_upper",      "ranking_lower",  "cascade_lower"};
  return names;
}

struct CurveRequest {
  std::vector<std::string> names;  // empty => all
  std::vector<double> betas;
  double c_min = kInf;
  double sigma = 1.0;
  int envelope_grid = 200;
  double z_step = 1e-4;
  int alpha4_grid = 2001;
  unsigned threads = 1;
};

std::vector<BoundCurve> emit_bound_curves(const CurveRequest& request);

// Long-format CSV body: header `beta,bound_name,c_min,sigma,value` then one
// row per (beta, bound), grouped by beta.
std::string bound_curves_csv(const std::vector<BoundCurve>& curves);

// "lo:hi:step" grid, endpoints inclusive.
std::vector<double> parse_grid(const std::string& text);

}  // namespace mcm
