#pragma once

// Radial weights w(xi) = profile(|xi|) and the comparisons between them.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "convolab/core.hpp"

namespace convolab {

class Weight {
 public:
  using Profile = std::function<double(double)>;  // r >= 0 -> profile(r)

  Weight() = default;
  Weight(std::string key, Profile profile, bool monotone, bool subadditive_by_construction);

  static Weight log_weight();                        // log(1 + r)
  static Weight gevrey(double a);                    // r^a, 0 < a < 1
  static Weight affine_log(double b);                // b log(1 + r), b > 0
  static Weight power_log(double p);                 // log(1 + r)^p, p >= 1
  // Piecewise linear through (r_i, v_i); evaluation beyond the last node
  // throws unless `extrapolate` continues with the last slope.
  static Weight sampled(std::vector<double> r, std::vector<double> v, std::string key,
                        bool extrapolate = false);
  static Weight sampled_csv(const std::string& path);
  // "log", "gevrey:0.5", "affine-log:2", "power-log:2", "sampled:<csv>".
  static Weight from_key(const std::string& key);
  static std::vector<std::string> catalog_keys();

  double operator()(double xi) const { return profile_(xi < 0 ? -xi : xi); }
  const std::string& key() const { return key_; }
  bool monotone() const { return monotone_; }
  bool subadditive_by_construction() const { return subadditive_; }

  // Pointwise combinations; the result is marked non-catalog.
  Weight scaled(double s) const;
  Weight plus(const Weight& o) const;
  Weight compose_after(const std::function<double(double)>& gamma_of, const std::string& tag) const;

  // Samples on r = 0, step, ..., n*step.
  std::vector<double> sample(double step, std::size_t n) const;

 private:
  std::string key_;
  Profile profile_;
  bool monotone_ = false;
  bool subadditive_ = false;
};

struct MembershipReport {
  bool normalization = false;  // |w(0)| tiny
  bool nonnegative = false;
  bool subadditive = false;
  bool log_lower_bound = false;
  bool integral_bound = false;
  double fit_a = 0, fit_b = 0;     // w >= a + b log(1 + r) on the window
  double tail_slope = 0;           // log-log slope of dyadic increments of int w/(1+r^2)
  std::vector<double> integral_ladder;  // int_0^R w/(1+r^2) for R on the window ladder
  std::vector<double> witnesses;   // violating points
  bool passed() const {
    return normalization && nonnegative && subadditive && log_lower_bound && integral_bound;
  }
};

MembershipReport check_membership(const Weight& w, const FrequencyWindow& win);

enum class Relation { dominates, strictly_dominates, equivalent, fails, inconclusive };
std::string_view to_string(Relation r);

enum class CompareMode { dominates, strictly_dominates, equivalent };

struct DominationVerdict {
  Relation relation = Relation::inconclusive;
  double A = 0, B = 0;               // w2 >= A + B w1 on the window
  std::vector<double> scale_ratio;   // per ladder scale: min of w2/w1
  std::vector<double> witnesses;
};

// Does w2 dominate w1?  Trend verdicts read min w2/w1 over dyadic scales.
DominationVerdict compare(const Weight& w2, const Weight& w1, CompareMode mode, const FrequencyWindow& win);

// Same comparison for two sampled curves on a common radial grid r >= 0.
DominationVerdict compare_samples(const std::vector<double>& r, const std::vector<double>& w2,
                                  const std::vector<double>& w1, const std::vector<double>& ladder,
                                  CompareMode mode);

struct SlowVariationReport {
  DominationVerdict inner;  // inf over balls against sup over balls
  Verdict verdict = Verdict::inconclusive;
};

// inf_{B(xi, delta(xi))} w dominates sup_{B(xi, delta(xi))} w?
SlowVariationReport is_slowly_varying(const Weight& w, const std::function<double(double)>& delta,
                                      const FrequencyWindow& win);

struct MTildeReport {
  Verdict verdict = Verdict::inconclusive;
  double c = 0;                // min_j ratio
  std::vector<double> ratio;   // min_{|eta|<=rho_j} w(xi_j + eta) / w(xi_j)
  std::vector<std::size_t> witnesses;
};

MTildeReport in_M_tilde(const Weight& w, const std::vector<double>& xi, const std::vector<double>& rho);

// Least concave nondecreasing majorant on [0, radius], continued linearly.
// With strict = true the majorant of env * (1 + log(1+r))^(1/2) is returned,
// which strictly dominates w.
Weight concave_majorant(const Weight& w, const FrequencyWindow& win, bool strict);

}  // namespace convolab
