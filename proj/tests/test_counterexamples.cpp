#include <cmath>
#include <numbers>

#include "convolab/counterexamples.hpp"
#include "doctest.h"

using namespace convolab;

namespace {

// standard normal mass of (a, b) via erfc
double normal_mass(double a, double b) { return 0.5 * (std::erfc(a / std::numbers::sqrt2) - std::erfc(b / std::numbers::sqrt2)); }
// Laplace e^{-|t|}/2: mass of (a, b)
double laplace_cdf(double x) { return x < 0 ? 0.5 * std::exp(x) : 1 - 0.5 * std::exp(-x); }

IntervalFamily two_boxes() { return IntervalFamily::make({3.5, 9.5}, {1.5, 1.5}); }

}  // namespace

TEST_CASE("distance to E") {
  auto fam = two_boxes();
  CHECK(distance_to_E(fam, 0.0) == 0);
  CHECK(distance_to_E(fam, 6.5) == 0);
  CHECK(distance_to_E(fam, 3.5) == doctest::Approx(1.5));
  CHECK(distance_to_E(fam, 3.5 + 0.75) == doctest::Approx(0.75));
  CHECK(distance_to_E(fam, 2.0) == 0);  // the edge lies in the closure of E
  CHECK(distance_to_union(fam, 0.0) == doctest::Approx(2.0));
  CHECK(distance_to_union(fam, 6.5) == doctest::Approx(1.5));
  for (double x = -3; x < 14; x += 0.37)
    for (std::size_t j = 0; j < fam.size(); ++j)
      if (std::abs(x - fam.xi[j]) < fam.d[j]) CHECK(distance_to_E(fam, x) <= fam.d[j]);
}

TEST_CASE("interval family invariants") {
  CHECK_THROWS_AS(IntervalFamily::make({3, 5}, {1, 1}), PreconditionError);      // gap 0
  CHECK_THROWS_AS(IntervalFamily::make({10, 40}, {1, 5}), PreconditionError);   // d/xi grows
  CHECK_NOTHROW(IntervalFamily::make({10, 40}, {2, 5}));
  FrequencyWindow win(64, 1.0 / 16);
  CHECK_THROWS_AS(IntervalFamily::make({60}, {8}).check_inside(win), PreconditionError);
}

TEST_CASE("sandwich terms against erf oracle") {
  StretchedExpProfile gauss(2, 0.5);
  const double Z = std::sqrt(2 * std::numbers::pi);
  auto fam = two_boxes();
  auto t = sandwich_terms(gauss, fam, 0.0, SandwichSide::intervals);
  CHECK(t.r == doctest::Approx(2));
  CHECK(t.middle / Z == doctest::Approx(normal_mass(2, 5) + normal_mass(8, 11)).epsilon(1e-10));
  CHECK(t.lower / Z == doctest::Approx(normal_mass(2, 3)).epsilon(1e-10));
  CHECK(t.upper / Z == doctest::Approx(2 * normal_mass(2, INFINITY)).epsilon(1e-10));
  CHECK(t.middle / Z == doctest::Approx(0.02275).epsilon(2e-4));
  CHECK(t.lower / Z == doctest::Approx(0.02140).epsilon(2e-4));
  CHECK(t.upper / Z == doctest::Approx(0.04550).epsilon(2e-4));
  // deep in E: r = 0, lower = nu((0, 1))
  auto c = sandwich_terms(gauss, fam, -20.0, SandwichSide::complement);
  CHECK(c.r == 0);
  CHECK(c.lower / Z == doctest::Approx(normal_mass(0, 1)).epsilon(1e-10));
  CHECK(c.middle >= c.lower);
}

TEST_CASE("sandwich holds on the grid for a Laplace density") {
  StretchedExpProfile lap(1, 1);  // total mass 2
  FrequencyWindow win(128, 1.0 / 8);
  for (auto fam : {two_boxes(), IntervalFamily::make({10, 20, 40, 80}, {2.5, 4, 6, 9})}) {
    auto rep = sandwich_check(lap, fam, win);
    CHECK(rep.total == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rep.verdict == Verdict::verified);
    // closed-form middle term, complement side
    for (double x : {-5.0, 3.0, 11.25, 47.5}) {
      double um = 0;
      for (std::size_t j = 0; j < fam.size(); ++j) um += laplace_cdf(x - fam.lo(j)) - laplace_cdf(x - fam.hi(j));
      std::size_t i = win.index_of(x);
      double r = distance_to_E(fam, win.at(i));
      double lower = 0.5 * (std::exp(-r) - std::exp(-r - 1));
      CHECK(rep.complement.lower_margin[i] / 2 == doctest::Approx((1 - um) - lower).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(sandwich_check(lap, IntervalFamily::make({10}, {0.5}), win), PreconditionError);
}

TEST_CASE("pseudo-measure from an even profile") {
  FrequencyWindow win(256, 1.0 / 16);
  auto g = std::make_shared<StretchedExpProfile>(0.9);
  auto m = MassModel::from_profile(g);
  const double total = std::exp(g->log_total());
  auto empty = build_pseudomeasure(m, IntervalFamily{}, win);
  for (std::size_t i = 0; i < win.size(); i += 97) CHECK(std::exp(empty.u_hat.log_abs(i)) == doctest::Approx(total));

  auto fam = IntervalFamily::make({30, 120}, {10, 25});
  auto pm = build_pseudomeasure(m, fam, win);
  // continuity bound for a symmetric unimodal g^: int |g(t+h) - g(t)| = 2 mass(-h/2, h/2)
  const double jump = 2 * std::exp(g->log_mass(-win.step() / 2, win.step() / 2));
  double worst_jump = 0;
  for (std::size_t i = 0; i < win.size(); ++i) {
    double u = std::exp(pm.u_hat.log_abs(i));
    CHECK(u >= 0);
    CHECK(u <= total * (1 + 1e-12));
    if (i > 0) worst_jump = std::max(worst_jump, std::abs(u - std::exp(pm.u_hat.log_abs(i - 1))));
  }
  CHECK(worst_jump <= jump * (1 + 1e-9));
  // deep in E the loss is the g^-mass of the far intervals
  std::size_t i = win.index_of(-200.0);
  CHECK(std::exp(pm.u_hat.log_abs(i)) == doctest::Approx(total).epsilon(1e-12));
  // center of an interval: direct quadrature oracle of g^ over xi - E
  double x = 120;
  double direct = total - std::exp(g->log_mass(x - 40, x - 20)) - std::exp(g->log_mass(x - 145, x - 95));
  CHECK(std::exp(pm.u_hat.log_abs(win.index_of(x))) == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("pseudo-measure from a bump") {
  FrequencyWindow win(512, 1.0 / 8);
  auto g = make_autocorr_bump(BumpModel::triangle(0.5));  // g^ = sinc^4 >= 0
  auto fam = IntervalFamily::make({40, 200}, {8, 30});
  auto pm = build_pseudomeasure(g, fam, win);
  auto spec = g.spectrum(win);
  // brute force Riemann sum of g^(xi - eta) over eta in E
  for (double x : {0.0, 40.0, 45.0, 190.0}) {
    double acc = 0;
    for (std::size_t k = 0; k < win.size(); ++k) {
      double eta = win.at(k);
      if (distance_to_E(fam, eta) > 0) continue;
      double t = x - eta;
      if (std::abs(t) > win.radius()) continue;
      bool edge = false;  // trapezoid weight at the interval ends
      for (std::size_t j = 0; j < fam.size(); ++j) edge = edge || eta == fam.lo(j) || eta == fam.hi(j);
      acc += spec.value(win.index_of(t)).real() * win.step() * (edge ? 0.5 : 1.0);
    }
    CHECK(std::exp(pm.u_hat.log_abs(win.index_of(x))) == doctest::Approx(acc).epsilon(2e-3));
  }
  CHECK_THROWS_AS(build_pseudomeasure(BumpModel::indicator(-1, 1), fam, win), PreconditionError);
}

TEST_CASE("lemma bounds") {
  FrequencyWindow win(256, 1.0 / 16);
  auto g = std::make_shared<StretchedExpProfile>(0.9);
  StretchedExpProfile f(0.65);
  // empty family: (fu)^ is the total mass of f^ * g^
  auto pm0 = build_pseudomeasure(MassModel::from_profile(g), IntervalFamily{}, win);
  auto v0 = verify_bounds(pm0, f, win);
  CHECK(v0.verdict == Verdict::verified);
  CHECK(v0.eq2_margin_min > 0);
  // single interval far right: r(0) = 0
  auto fam = IntervalFamily::make({150}, {40});
  auto pm = build_pseudomeasure(MassModel::from_profile(g), fam, win);
  auto v = verify_bounds(pm, f, win);
  CHECK(v.verdict == Verdict::verified);
  REQUIRE(v.eq1_margin.size() == 1);
  CHECK(v.eq1_margin[0] >= 0);
  double rhs0 = std::exp(g->log_mass(-1, 0) + f.log_density(2.0));
  CHECK(std::exp(v.fu_hat.log_abs(win.index_of(0.0))) >= rhs0);
  // an increasing f^ is rejected
  class Bump final : public EvenProfile {
   public:
    double log_density(double t) const override { return -std::abs(std::abs(t) - 3); }
    double log_upper_tail(double) const override { return 0; }
    std::string name() const override { return "bump"; }
  } bad;
  CHECK_THROWS_AS(verify_bounds(pm, bad, win), PreconditionError);
}

TEST_CASE("d_j equations") {
  // sqrt(d) = log(1001 - d) by plain bisection
  double lo = 1, hi = 500;
  for (int k = 0; k < 200; ++k) {
    double mid = 0.5 * (lo + hi);
    (std::sqrt(mid) - std::log(1001 - mid) < 0 ? lo : hi) = mid;
  }
  auto s = solve_dj(Weight::gevrey(0.5), Weight::log_weight(), {1000});
  CHECK(s.d[0] == doctest::Approx(lo).epsilon(1e-12));
  CHECK(s.d[0] == doctest::Approx(47).epsilon(0.01));
  CHECK(s.residual[0] < 1e-9);

  Weight id("id", [](double r) { return r; }, true, true);
  double X = std::exp(10.0);
  auto s2 = solve_dj(id, Weight::log_weight(), {X});
  CHECK(s2.d[0] == doctest::Approx(std::log1p(X - s2.d[0])).epsilon(1e-12));
  CHECK(s2.d[0] < 10);
  CHECK(s2.d[0] > 9.99);
  CHECK(s2.residual[0] < 1e-9);

  // monotone w: ball minimum at xi - d, compared with a non-monotone copy (grid min)
  Weight lg_plain("log-copy", [](double r) { return std::log1p(r); }, false, false);
  auto a = solve_dj(Weight::gevrey(0.5), Weight::log_weight(), {500, 4000});
  auto b = solve_dj(Weight::gevrey(0.5), lg_plain, {500, 4000});
  for (int j = 0; j < 2; ++j) CHECK(a.d[j] == doctest::Approx(b.d[j]).epsilon(1e-9));
  CHECK(a.ratio_decreasing);
  CHECK(a.c_fit > 0);

  Weight big("big", [](double r) { return 100 + r; }, true, false);
  CHECK_THROWS_AS(solve_dj(big, Weight::log_weight(), {1000}), SolveError);
}

TEST_CASE("gevrey counterexample parameters") {
  FrequencyWindow win(4096, 1.0 / 64);
  CHECK_THROWS_AS(gevrey_counterexample(1.0, 0.5, 0.7, {100}, win), PreconditionError);
  CHECK_THROWS_AS(gevrey_counterexample(0.6, 1.5, 0.7, {100}, win), DomainError);
  // trend exponent r beta / alpha - s > 0 wherever a < r/s (midpoint rule)
  for (int ia = 1; ia <= 20; ++ia)
    for (int ir = 1; ir < 20; ++ir)
      for (int is = 1; is < 20; ++is) {
        double a = ia / 20.0, r = ir / 20.0, s = is / 20.0;
        if (ia * is >= 20 * ir) continue;  // a >= r/s, decided in integers
        double alpha = 0.5 * (std::max(a, r) + r / s);
        double beta = 0.5 * (alpha * s / r + 1);
        CHECK(r * beta / alpha - s > 0);
      }
}

TEST_CASE("gevrey counterexample pipeline") {
  FrequencyWindow win(4096, 1.0 / 64);
  auto rep = gevrey_counterexample(0.6, 0.5, 0.7, {100, 400, 1600}, win);
  CHECK(rep.alpha == doctest::Approx(0.5 * (0.6 + 0.5 / 0.7)));
  CHECK(rep.beta == doctest::Approx(0.5 * (rep.alpha * 0.7 / 0.5 + 1)));
  CHECK(rep.trend_exponent == doctest::Approx(0.5 * rep.beta / rep.alpha - 0.7));
  CHECK(rep.trend_exponent > 0.03);
  for (std::size_t j = 0; j < rep.xi.size(); ++j) {
    CHECK(rep.d[j] == doctest::Approx(std::pow(rep.xi[j], 0.5 / rep.alpha)));
    CHECK(rep.eq1_margins[j] >= -1e-6);
    CHECK(rep.witness_near[j]);
  }
  CHECK(rep.eq2_margin_min >= -1e-6);
  CHECK(rep.w_s == Verdict::refuted);
  CHECK(rep.w_r == Verdict::verified);
  CHECK(rep.verdict == Verdict::verified);
}

TEST_CASE("general counterexample rejects weights outside M-tilde") {
  FrequencyWindow win(4096, 1.0 / 64);
  // log weight with flat zeros just left of each center
  std::vector<double> xi{100, 400, 1600};
  std::vector<double> r{0}, v{0};
  for (double x = 1; x < 9000; x += 1) {
    bool dip = false;
    for (double c : xi) dip = dip || (x >= c - 3 && x <= c - 2);
    r.push_back(x);
    v.push_back(dip ? 0.0 : std::log1p(x));
  }
  auto w = Weight::sampled(r, v, "dipped-log", true);
  CHECK_THROWS_AS(general_counterexample(w, Weight::gevrey(0.3), xi, win), PreconditionError);
}

TEST_CASE("sandwich: grid middle term matches closed-form interval masses") {
  FrequencyWindow win(200, 1.0 / 16);
  std::vector<double> xi, d;
  for (int j = 0; j < 4; ++j) {
    xi.push_back(10 * std::pow(1.8, j));
    d.push_back(1 + 0.3 * std::sqrt(xi.back()));
  }
  auto fam = IntervalFamily::make(xi, d);
  for (double beta : {0.5, 1.0, 2.0}) {
    StretchedExpProfile nu(beta, 1.0);
    auto r = sandwich_check(nu, fam, win);
    for (std::size_t i = 0; i < win.size(); i += 13) {
      double x = win.at(i), exact = 0;
      for (std::size_t j = 0; j < fam.size(); ++j) exact += std::exp(nu.log_mass(x - fam.hi(j), x - fam.lo(j)));
      double lower = std::exp(nu.log_mass(distance_to_union(fam, x), distance_to_union(fam, x) + 1));
      CAPTURE(beta);
      CAPTURE(x);
      CHECK(std::abs(r.intervals.lower_margin[i] + lower - exact) < 1e-11);
    }
  }
}
