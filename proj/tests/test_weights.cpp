#include <cmath>
#include <random>

#include "convolab/weights.hpp"
#include "doctest.h"

using namespace convolab;

namespace {
// Composite Simpson for int_0^R sqrt(x)/(1+x^2) after x = u^2, which removes
// the cusp at the origin.
double simpson_sqrt(double R, int n) {
  double U = std::sqrt(R), h = U / n, s = 0;
  for (int i = 0; i <= n; ++i) {
    double u = i * h;
    double v = 2 * u * u / (1 + u * u * u * u);
    s += v * (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2));
  }
  return s * h / 3;
}
}  // namespace

TEST_CASE("catalog weights pass membership") {
  FrequencyWindow win(1e4, 1e4 / 4096);
  for (auto key : {"log", "gevrey:0.5", "affine-log:2"}) {
    auto w = Weight::from_key(key);
    auto rep = check_membership(w, win);
    INFO(key);
    CHECK(rep.passed());
  }
  auto rep = check_membership(Weight::gevrey(0.5), win);
  CHECK(rep.tail_slope == doctest::Approx(-0.5).epsilon(0.05));
  CHECK(rep.integral_ladder.back() == doctest::Approx(simpson_sqrt(1e4, 200000)).epsilon(1e-6));
}

TEST_CASE("membership failures carry witnesses") {
  FrequencyWindow win(1e4, 1e4 / 4096);
  // linear growth breaks the integral condition
  std::vector<double> r{0, 1e5}, v{0, 1e5};
  auto lin = Weight::sampled(r, v, "linear");
  auto rep = check_membership(lin, win);
  CHECK_FALSE(rep.integral_bound);
  // a bump that is not subadditive
  std::vector<double> r2{0, 1, 2, 3, 1e5}, v2{0, 0, 5, 0, 0};
  auto bump = Weight::sampled(r2, v2, "bump");
  auto rep2 = check_membership(bump, win);
  CHECK_FALSE(rep2.subadditive);
  CHECK_FALSE(rep2.witnesses.empty());
  CHECK_THROWS_AS(Weight::from_key("nope"), ConfigError);
}

TEST_CASE("domination") {
  FrequencyWindow win(1e4, 1e4 / 4096);
  auto lg = Weight::log_weight();
  auto g = Weight::gevrey(0.5);
  auto self = compare(lg, lg, CompareMode::dominates, win);
  CHECK(self.relation == Relation::dominates);
  CHECK(self.A == doctest::Approx(0.0));
  CHECK(self.B == doctest::Approx(1.0));
  CHECK(compare(g, lg, CompareMode::strictly_dominates, win).relation == Relation::strictly_dominates);
  auto bad = compare(lg, g, CompareMode::dominates, win);
  CHECK(bad.relation == Relation::fails);
  CHECK(bad.witnesses.back() > 0.5 * win.radius());
  CHECK(compare(Weight::affine_log(2), lg, CompareMode::equivalent, win).relation == Relation::equivalent);
  // a window too small for a trend
  FrequencyWindow tiny(8, 8.0 / 1024);
  CHECK(compare(lg, g, CompareMode::dominates, tiny).relation == Relation::inconclusive);
}

TEST_CASE("domination certificate holds on the grid") {
  FrequencyWindow win(1e4, 1e4 / 4096);
  auto g = Weight::gevrey(0.5);
  auto lg = Weight::log_weight();
  auto v = compare(g, lg, CompareMode::dominates, win);
  REQUIRE(v.relation == Relation::dominates);
  for (std::size_t i = win.center(); i < win.size(); ++i) {
    double x = win.at(i);
    CHECK(g(x) >= v.A + v.B * lg(x) - 1e-9);
  }
}

TEST_CASE("slow variation") {
  FrequencyWindow win(1e4, 1e4 / 4096);
  auto sq = [](double x) { return std::sqrt(x); };
  CHECK(is_slowly_varying(Weight::log_weight(), sq, win).verdict == Verdict::verified);
  // oscillation by a factor r^0.1 on scales shorter than delta
  std::vector<double> r, v;
  for (double x = 0; x <= 2.2e4; x += 0.25) {
    r.push_back(x);
    double s = 0.5 * (1 + std::sin(x));
    v.push_back(std::sqrt(x) * std::pow(1 + x, -0.1 * s));
  }
  auto osc = Weight::sampled(r, v, "osc");
  CHECK(is_slowly_varying(osc, sq, win).verdict == Verdict::refuted);
  CHECK_THROWS_AS(is_slowly_varying(Weight::log_weight(), [](double x) { return x * x; }, win), PreconditionError);
}

TEST_CASE("M-tilde") {
  std::vector<double> xi{1e2, 1e3, 1e4}, rho{10, 31.6, 100};
  auto rep = in_M_tilde(Weight::log_weight(), xi, rho);
  CHECK(rep.verdict == Verdict::verified);
  CHECK(rep.c > 0.9);
  std::vector<double> r{0, 90, 950, 970, 990, 1e6}, v{0, 5, 5, 0, 0, 1e6};  // zero near xi_1 - rho_1
  auto hole = Weight::sampled(r, v, "hole");
  auto bad = in_M_tilde(hole, xi, rho);
  CHECK(bad.verdict == Verdict::refuted);
  REQUIRE(bad.witnesses.size() == 1);
  CHECK(bad.witnesses.front() == 1);
  CHECK_THROWS_AS(in_M_tilde(Weight::log_weight(), xi, std::vector<double>{1, 100, 1e4}), PreconditionError);
}

TEST_CASE("concave majorants") {
  FrequencyWindow win(1e4, 1e4 / 4096);
  auto lg = Weight::log_weight();
  auto env = concave_majorant(lg, win, false);
  for (std::size_t i : {0, 1, 7, 300, 4095}) {
    double x = win.step() * double(i);
    CHECK(env(x) == doctest::Approx(lg(x)).epsilon(1e-12));
  }
  auto strict = concave_majorant(lg, win, true);
  CHECK(check_membership(strict, win).passed());
  CHECK(compare(strict, lg, CompareMode::strictly_dominates, win).relation == Relation::strictly_dominates);
  // majorant property and concavity on random triples
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1e4);
  for (int k = 0; k < 2000; ++k) {
    double a = u(rng), b = u(rng), t = 0.3;
    CHECK(strict(a) >= lg(a) - 1e-12);
    CHECK(strict(t * a + (1 - t) * b) >= t * strict(a) + (1 - t) * strict(b) - 1e-9);
  }
}
