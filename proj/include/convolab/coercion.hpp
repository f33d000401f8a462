#pragma once

// Sufficient conditions for coercivity as runnable window experiments:
// kernel families, the tail estimate, the star and double-star conditions,
// and the Gevrey parameter map.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "convolab/dcclasses.hpp"
#include "convolab/mollifiers.hpp"
#include "convolab/symbols.hpp"

namespace convolab {

struct KernelFamily {
  std::vector<KernelModel> members;
  std::vector<std::string> labels;

  static KernelFamily single(KernelModel a, std::string label);
  // {a_{chi_N p}} for the members of a unit sequence.
  static KernelFamily units(const UnitSequence& seq, const SymbolModel& p, const FrequencyWindow& win);
  std::size_t size() const { return members.size(); }
};

struct BoundednessRow {
  double lambda = 0;
  std::optional<double> Lambda;  // smallest bounded Lambda on the ladder
  double sup_bracket = 0;        // sup over members at that Lambda (or at the largest tried)
};

struct TailRow {
  double lambda = 0;
  std::optional<double> rho;          // smallest rho with the decay trend
  std::vector<double> scale_max;      // per dyadic scale: max of log T + lambda w (at rho, else at the largest)
};

struct CoercionReport {
  std::string kind;  // "lemma2", "star", "double_star"
  std::string w_key, w_prime_key, p_key, psi_tag, u_tag;
  std::vector<std::string> assumptions;
  std::vector<std::string> notes;

  Verdict family_bounded = Verdict::inconclusive;     // STEP 1
  Verdict inf_slow_decrease = Verdict::inconclusive;  // STEP 2
  Verdict tail_estimate = Verdict::inconclusive;      // STEP 3
  Verdict conclusion = Verdict::inconclusive;         // w'-slow decrease of f

  double lambda0 = 0;  // exponent in the tail integral, e^{lambda0 w(eta)}
  std::vector<BoundednessRow> bounded_rows;
  std::vector<TailRow> tail_rows;
  double C_main = 0;                       // smallest C in the assembled main estimate
  std::optional<double> A_star_inf, A_star_f, A_star_v;
  bool low_accuracy = false;

  // star case
  double step1_max_ratio = 0;              // sup_N [a_N] / (||Phi|| [a_psi]) over the lambda ladder
  std::vector<double> theory_rho;          // a(b)/r per lambda, from the star-condition certificate
  double residual_decay = 0;                // last-scale max of log(|v^| - inf_N |A_N u^|)_+ + w
  // double star case
  double gamma_domination_B = 0;

  std::vector<double> curve_xi, curve_log_inf, curve_log_f;
};

// Kernel-family scan on a window: f must live on the family's window; everything is
// judged on interior rows |xi| <= radius/2.
CoercionReport lemma2_scan(const KernelFamily& G, const GridSpectrum& f, const Weight& w, const Weight& w_prime,
                           double lambda0, const std::vector<double>& lambda_ladder,
                           const std::vector<double>& rho_ladder, const std::vector<double>& A_ladder = {1, 2, 4, 8});

struct StarKind {
  DCSequence L = DCSequence::analytic();
  double r = 1;  // p(., xi) of class C^L with radius r on the support
};
struct DoubleStarKind {
  Weight gamma;  // gamma(xi) = Gamma(|xi|), Gamma nondecreasing
};
using CoercionKind = std::variant<StarKind, DoubleStarKind>;

struct CoercionOptions {
  double m = 0;  // order of p
  int N_max = 12;
  std::vector<double> lambda_ladder{1, 2};
  std::vector<double> rho_ladder{0.5, 1, 2, 4, 8, 16, 32};
  std::vector<double> A_ladder{1, 2, 4, 8};
  BumpModel Phi = BumpModel::box_unit(2, 1);
  BumpModel phi = BumpModel::triangle(0.5);
};

CoercionReport coercion_experiment(const CoercionKind& kind, const SymbolModel& p, const BumpModel& psi,
                                   const PhysicalModel& u, const Weight& w, const Weight& w_prime,
                                   const FrequencyWindow& win, const CoercionOptions& opt = {});

struct GevreyRelation {
  bool coercive_claim = false;         // a s >= r
  bool counterexample_exists = false;  // a < r / s
  bool gap = false;                    // neither
  std::string note;
};

GevreyRelation gevrey_relation(double a, double r, double s);

}  // namespace convolab
