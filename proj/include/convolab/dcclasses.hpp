#pragma once

// Denjoy-Carleman sequences L_k and the functionals built on them.

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "convolab/core.hpp"
#include "convolab/jet.hpp"
#include "convolab/weights.hpp"

namespace convolab {

using SmoothFn = std::function<Jet(const Jet&)>;

class DCSequence {
 public:
  // L_0 = 1 is enforced; fn is consulted for k >= 1.
  DCSequence(std::string key, std::function<double(int)> fn, bool log_convex_moments);

  static DCSequence analytic();            // L_k = k
  static DCSequence gevrey(double sigma);  // L_k = k^sigma, sigma >= 1
  static DCSequence table(std::vector<double> L, std::string key);  // L[0] must be 1
  static DCSequence from_key(const std::string& key);  // "analytic", "gevrey:2", "table:<csv>"

  double operator()(int k) const;
  double log_at(int k) const { return std::log((*this)(k)); }
  const std::string& key() const { return key_; }
  // k log L_k convex in k, so q_L can be maximized by bisection.
  bool log_convex_moments() const { return log_convex_; }
  int max_index() const { return max_index_; }

 private:
  std::string key_;
  std::function<double(int)> fn_;
  bool log_convex_;
  int max_index_ = std::numeric_limits<int>::max();
};

struct DCValidation {
  bool ok = false;
  double C = 0;  // L_{k+1} >= C L_k for k < checked
  std::string reason;
};

DCValidation validate(const DCSequence& L, int k_check = 200);

// q_L(t) = log sup_{k>=0} (t/L_k)^k, t > 0.
double q_L(const DCSequence& L, double t);
// The maximizing k (0 when t <= L_1).
int q_L_argmax(const DCSequence& L, double t);

struct DCSeminormResult {
  double log_value = 0;              // log of the sup (may be large)
  std::vector<double> per_order;     // log max_x (r/L_a)^a |D^a f| for a = 0..alpha_max
  bool growing = false;              // truncation flag: not yet decaying at alpha_max
  double value() const { return std::exp(log_value); }
};

// sup over x in [K_lo, K_hi] and a <= alpha_max of (r/L_a)^a |D^a f(x)|.
DCSeminormResult dc_seminorm(const SmoothFn& f, const DCSequence& L, double r, double K_lo, double K_hi,
                             int alpha_max = 40, int x_points = 201);

enum class Trend { convergent, divergent, inconclusive };
std::string_view to_string(Trend t);

struct QuasiAnalyticReport {
  Trend trend = Trend::inconclusive;
  std::vector<double> T;          // dyadic endpoints 2^m
  std::vector<double> partial;    // int_1^T q_L(t) t^-2 dt
  std::vector<double> increment_ratio;
  bool quasi_analytic() const { return trend == Trend::divergent; }
};

QuasiAnalyticReport quasianalytic_test(const DCSequence& L, double t_max = 16384);

struct StarCertificate {
  Verdict verdict = Verdict::inconclusive;
  double a = 0;                 // smallest certifying ladder value
  double R = 0;                 // inequality holds for |xi| > R on the window
  std::vector<double> witnesses;  // violating xi near the window edge, if refuted
  std::vector<double> a_ladder;
  std::vector<double> last_violation;  // per ladder a: largest violating xi (0 if none)
};

// Search a ladder of a for q_L(a w'(xi)) >= b w(xi) on |xi| > R, with R
// inside the inner quarter of the window.
StarCertificate star_condition(const DCSequence& L, const Weight& w, const Weight& wprime, double b,
                               const FrequencyWindow& win, double grid_refine = 1.0);

}  // namespace convolab
