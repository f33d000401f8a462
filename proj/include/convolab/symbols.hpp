#pragma once

// Symbols p(x, xi), their seminorms, ellipticity, asymptotic sums, and the
// pseudo-convolution kernels a_{psi p}.

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "convolab/dcclasses.hpp"
#include "convolab/functions.hpp"
#include "convolab/mollifiers.hpp"

namespace convolab {

struct SymbolTerm {
  std::string fkey, gkey;
  SmoothFn f;  // in x
  SmoothFn g;  // in xi
};

// Real values on a product grid, bilinear in between. No derivative access.
struct SymbolTable {
  std::vector<double> x, xi;
  std::vector<double> v;  // row-major: v[i * xi.size() + j] = p(x[i], xi[j])
  double operator()(double x, double xi) const;
};

class SymbolModel {
 public:
  std::string key;
  double order = 0;
  double x_lo = -std::numeric_limits<double>::infinity();
  double x_hi = std::numeric_limits<double>::infinity();

  static SymbolModel separable(const std::string& fkey, const std::string& gkey);
  static SymbolModel separable(std::string fkey, SmoothFn f, std::string gkey, SmoothFn g, double order);
  static SymbolModel from_table(std::shared_ptr<const SymbolTable> t, double order, std::string key);
  static SymbolModel table_csv(const std::string& path, double order);  // columns x,xi,value
  // "poly:<c0,c1,...>" (in xi), "sep:<fkey>:<gkey>", "table:<path>"
  static SymbolModel from_key(const std::string& key);
  static std::vector<std::string> catalog_keys();

  SymbolModel plus(const SymbolModel& o) const;  // order = max
  SymbolModel scaled(double s) const;

  bool has_derivatives() const { return !table_; }
  const std::vector<SymbolTerm>& terms() const { return terms_; }

  double operator()(double x, double xi) const;
  // D_x^a D_xi^b p(x, xi). Throws RepresentationError for tables when a + b > 0.
  double derivative(int a, int b, double x, double xi) const;

 private:
  std::vector<SymbolTerm> terms_;
  std::shared_ptr<const SymbolTable> table_;
};

struct SeminormResult {
  double value = 0;
  double log_value = -std::numeric_limits<double>::infinity();
  double arg_x = 0, arg_xi = 0, arg_eta = 0;
  bool tail_flag = false;  // sup sits at the window edge
  bool truncated = false;  // derivative orders still growing at the cap
};

// sup_{xi, eta} |(phi p(., xi))^(eta)| e^{-m w1(xi) + lambda w2(eta)}
struct BeurlingFlavor {
  double lambda = 1;
  BumpModel phi;
  Weight w1, w2;
};
// sup_{xi, x in K} |D_x^alpha p| times (1+|xi|)^{-m} (xi reading) or (1+|x|)^{-m} (x reading).
struct SchwartzFlavor {
  enum class Reading { xi_weight, x_weight };
  int alpha = 0;
  double K_lo = 0, K_hi = 1;
  Reading reading = Reading::xi_weight;
};
// sup_{xi, x in K, alpha} (r/L_alpha)^alpha |D_x^alpha p| e^{-m w(xi)}
struct DCFlavor {
  DCSequence L = DCSequence::analytic();
  double r = 1;
  double K_lo = 0, K_hi = 1;
  Weight w;
  int alpha_max = 40;
};
using SeminormFlavor = std::variant<BeurlingFlavor, SchwartzFlavor, DCFlavor>;

SeminormResult symbol_seminorm(const SymbolModel& p, double m, const SeminormFlavor& flavor,
                               const FrequencyWindow& win);

struct RegularityRow {
  int alpha = 0;
  std::optional<double> r;  // largest feasible r on the ladder
  double log_sup = 0;        // at that r
};
struct RegularityReport {
  std::vector<double> r_ladder;
  std::vector<RegularityRow> rows;
  Verdict verdict = Verdict::inconclusive;
  std::string detail;
};

// For each alpha <= alpha_max: the largest r with
// sup_{|xi| > R} |D_xi^alpha p(., xi)|_{L,r,K} (1+|xi|)^{-m+alpha} finite on the window.
RegularityReport sm_regularity_check(const SymbolModel& p, double m, const DCSequence& L, double K_lo, double K_hi,
                                     double R, int alpha_max, const FrequencyWindow& win, int beta_max = 40);

struct EllipticityReport {
  Verdict verdict = Verdict::inconclusive;
  double c = 0, C = 0;
  std::vector<double> C_ladder, c_at;  // min |p| |xi|^-m over |xi| > C
  double witness_x = 0, witness_xi = 0;
};

// |p(x, xi)| >= c |xi|^m for x within `margin` of K and |xi| > C.
EllipticityReport ellipticity_check(const SymbolModel& p, double m, double K_lo, double K_hi,
                                    const FrequencyWindow& win, double margin = 0.05);

struct SumTermReport {
  int j = 0;
  double m_j = 0, eps = 1;
  std::vector<double> C_alpha;   // Leibniz constants C_{alpha,j}
  std::vector<double> measured;  // |P_j|^{(alpha)}_{m0'} on the grid
};
struct AsymptoticSum {
  SymbolModel p;
  double m0 = 0;  // max m_j
  int j0 = -1;    // first j with m_j <= m0 - 1 (-1 if none)
  std::vector<SumTermReport> terms;
  Verdict verdict = Verdict::inconclusive;  // certificate of 2^j bounds
};

// P_j = (1 - chi(eps_j xi)) p_j with eps_j from the Leibniz bound, safety factor 1/2.
// chi must be 1 near 0 and vanish outside [-3, 3].
AsymptoticSum asymptotic_sum(const std::vector<SymbolModel>& p_list, const SmoothFn& chi, int alpha_max,
                             double K_lo, double K_hi, double R, const FrequencyWindow& win, int refine = 1);

// ---- pseudo-convolution kernels ----

// Row quadrature in eta: Simpson on each half line when the center index is
// even, trapezoid otherwise.
std::vector<double> quad_weights(const FrequencyWindow& win);

// a(xi, eta) on window x window. a_{psi p}(xi, eta) = (2 pi)^-1 (psi p(., eta))^(xi - eta),
// so that A_a f(xi) = int a(xi, eta) f(eta) d eta.
class KernelModel {
 public:
  using Entry = std::function<cplx(std::size_t, std::size_t)>;
  KernelModel(FrequencyWindow win, Entry entry, std::string provenance);
  static KernelModel from_function(const FrequencyWindow& win, const std::function<cplx(double, double)>& a,
                                   std::string provenance);
  const FrequencyWindow& window() const { return win_; }
  cplx operator()(std::size_t i, std::size_t j) const { return entry_(i, j); }
  const std::string& provenance() const { return provenance_; }
  // little-endian: "CLKERN01", u64 n, f64 radius, f64 step, then n*n (re, im) f64 pairs
  void write_binary(const std::string& path) const;
  static KernelModel read_binary(const std::string& path);

 private:
  FrequencyWindow win_;
  Entry entry_;
  std::string provenance_;
};

KernelModel kernel_of(const BumpModel& psi, const SymbolModel& p, const FrequencyWindow& win);

struct BracketResult {
  double value = 0;
  double argmax = 0;
  bool lower_bound_only = false;
  std::vector<double> rows;  // int |a(xi, .)| e^{lambda w}
};
// sup_xi e^{-Lambda w(xi)} int |a(xi, eta)| e^{lambda w(eta)} d eta
BracketResult bracket(const KernelModel& a, double lambda, double Lambda, const Weight& w);

struct AppliedSpectrum {
  GridSpectrum out;
  bool low_accuracy = false;
};
// (psi p(x,D) u)^(xi) = int a_{psi p}(xi, eta) u^(eta) d eta
AppliedSpectrum apply_operator(const SymbolModel& p, const BumpModel& psi, const GridSpectrum& u);
AppliedSpectrum apply_kernel(const KernelModel& a, const GridSpectrum& u);

struct Lemma1Report {
  std::optional<double> Lambda1;  // chosen for part (1)
  double lhs1 = 0, rhs1 = 0, margin1 = 0;
  double lhs2 = 0, rhs2 = 0, margin2 = 0;
  Verdict part1 = Verdict::inconclusive, part2 = Verdict::inconclusive;
  Verdict verdict = Verdict::inconclusive;
};

// (1) [a_{psi p}]_{lambda, m+lambda} <= |p|_{m; Lambda1, psi} int e^{(|m+lambda| - Lambda1) w}
//     with Lambda1 the first ladder value making the integral finite;
// (2) [a_{psi1 psi p}]_{lambda, Lambda} <= ||psi1||_{|Lambda|} [a_{psi p}]_{lambda, Lambda}.
Lemma1Report lemma1_check(const SymbolModel& p, const BumpModel& psi, const BumpModel& psi1, double m, double lambda,
                          double Lambda, const Weight& w, const FrequencyWindow& win);

// int_R e^{-c w(eta)} d eta (infinite when it diverges).
double weight_exp_integral(const Weight& w, double c);

}  // namespace convolab
