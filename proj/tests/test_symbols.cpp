#include <cmath>
#include <cstdio>
#include <numbers>

#include "convolab/fft.hpp"
#include "convolab/symbols.hpp"
#include "doctest.h"

using namespace convolab;
constexpr double kPi = std::numbers::pi;

TEST_CASE("symbol keys and evaluation") {
  auto p = SymbolModel::from_key("sep:exp:bracket:1");
  CHECK(p.order == 1.0);
  CHECK(p(0.5, -2.0) == doctest::Approx(std::exp(0.5) * 3));
  CHECK(p.derivative(3, 1, 0.5, 2.0) == doctest::Approx(std::exp(0.5)));
  auto q = SymbolModel::from_key("poly:1,0,1");
  CHECK(q.order == 2.0);
  CHECK(q.derivative(0, 2, 0.3, 5.0) == doctest::Approx(2.0));
  auto g = SymbolModel::from_key("sep:gbump:0.9:bracket:1");
  CHECK(g(0.0, 0.0) == doctest::Approx(std::exp(-1.0)));
  CHECK_THROWS_AS(SymbolModel::from_key("sep:nope:one"), ConfigError);
  CHECK(p.plus(q)(0.5, 2.0) == doctest::Approx(std::exp(0.5) * 3 + 5));
}

TEST_CASE("table symbols") {
  std::string path = "symbol_table_test.csv";
  {
    std::FILE* f = std::fopen(path.c_str(), "w");
    std::fprintf(f, "x,xi,value\n");
    for (double x : {0.0, 1.0})
      for (double xi : {-1.0, 0.0, 1.0}) std::fprintf(f, "%g,%g,%g\n", x, xi, x + xi * xi);
    std::fclose(f);
  }
  auto t = SymbolModel::from_key("table:" + path);
  CHECK(t(0.5, 0.5) == doctest::Approx(0.5 + 0.5));
  CHECK_THROWS_AS(t.derivative(1, 0, 0.5, 0.5), RepresentationError);
  CHECK_THROWS_AS(t(2.0, 0.0), RepresentationError);
  std::remove(path.c_str());
}

TEST_CASE("schwartz and dc seminorms") {
  FrequencyWindow win(128, 1.0 / 8);
  auto one = SymbolModel::from_key("sep:one:one");
  auto s = symbol_seminorm(one, 0, SchwartzFlavor{0, 0, 1}, win);
  CHECK(s.value == doctest::Approx(1.0));
  CHECK_FALSE(s.tail_flag);
  auto quad = SymbolModel::from_key("poly:1,0,1");
  CHECK(symbol_seminorm(quad, 1, SchwartzFlavor{0, 0, 1}, win).tail_flag);
  CHECK_FALSE(symbol_seminorm(quad, 2, SchwartzFlavor{0, 0, 1}, win).tail_flag);
  // the x reading ignores xi growth entirely
  CHECK(symbol_seminorm(quad, 2, SchwartzFlavor{0, 0, 1, SchwartzFlavor::Reading::x_weight}, win).tail_flag);

  // sup_a (1/a)^a e^x (1+|xi|) e^{-log(1+|xi|)} over x in [0,1] = e
  auto ex = SymbolModel::from_key("sep:exp:bracket:1");
  DCFlavor dc;
  dc.w = Weight::log_weight();
  auto d = symbol_seminorm(ex, 1, dc, win);
  CHECK(d.value == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  CHECK_FALSE(d.truncated);
  CHECK_FALSE(d.tail_flag);
}

TEST_CASE("beurling seminorm of a separable symbol") {
  FrequencyWindow win(128, 1.0 / 8);
  auto phi = BumpModel::box_product(1.0);
  auto p = SymbolModel::from_key("poly:1,0,1");
  auto r = symbol_seminorm(p, 2, BeurlingFlavor{1.0, phi, Weight::log_weight(), Weight::log_weight()}, win);
  // (1+xi^2)/(1+|xi|)^2 peaks at xi = 0, so the sup is sup |phi^(eta)| (1+|eta|)
  double oracle = 0;
  for (std::size_t k = 0; k < win.size(); ++k) {
    double eta = win.at(k);
    oracle = std::max(oracle, std::abs(phi.fourier(eta)) * (1 + std::abs(eta)));
  }
  CHECK(r.value == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(r.arg_xi == 0.0);
  CHECK_FALSE(r.tail_flag);
}

TEST_CASE("regularity in the S^m sense") {
  FrequencyWindow win(128, 1.0 / 8);
  auto L = DCSequence::analytic();
  auto quad = sm_regularity_check(SymbolModel::from_key("poly:1,0,1"), 2, L, 0, 1, 1, 3, win);
  CHECK(quad.verdict == Verdict::verified);
  auto ex = sm_regularity_check(SymbolModel::from_key("sep:exp:bracket:1"), 1, L, 0, 1, 1, 3, win);
  CHECK(ex.verdict == Verdict::verified);
  for (const auto& row : ex.rows) CHECK(row.r.value_or(0) >= 1.0);
  // non-analyticity only shows where the derivatives blow up, i.e. near the support edge
  auto gb = sm_regularity_check(SymbolModel::from_key("sep:gbump:0.9:bracket:1"), 1, L, -0.7, 0.7, 1, 1, win);
  CHECK(gb.verdict == Verdict::refuted);
  CHECK_THROWS_AS(sm_regularity_check(SymbolModel::from_key("poly:1"), 0, L, 0, 1, 1e6, 1, win), PreconditionError);
}

TEST_CASE("ellipticity") {
  FrequencyWindow win(128, 1.0 / 8);
  auto a = ellipticity_check(SymbolModel::from_key("poly:1,0,1"), 2, 0, 1, win);
  CHECK(a.verdict == Verdict::verified);
  CHECK(a.c >= 0.5);
  CHECK(a.C <= 1.0);
  auto b = ellipticity_check(SymbolModel::from_key("sep:one:id"), 1, 0, 1, win);
  CHECK(b.verdict == Verdict::verified);
  CHECK(b.c == doctest::Approx(1.0));
  CHECK(b.C == 0.0);
  auto c = ellipticity_check(SymbolModel::from_key("sep:sin:id"), 1, -0.5, 0.5, win);
  CHECK(c.verdict == Verdict::refuted);
  CHECK(std::abs(c.witness_x) < 1e-9);
  // |xi|^{1/2} is not elliptic of order 1
  auto d = ellipticity_check(SymbolModel::from_key("sep:one:bracket:0.5"), 1, 0, 1, win);
  CHECK(d.verdict == Verdict::refuted);
}

TEST_CASE("asymptotic sums") {
  FrequencyWindow win(128, 1.0 / 8);
  auto chi = smooth_from_key("cutoff");
  std::vector<SymbolModel> ps;
  for (int j = 0; j <= 8; ++j) ps.push_back(SymbolModel::from_key("sep:one:bracket:" + std::to_string(-j)));
  auto s = asymptotic_sum(ps, chi, 3, 0, 1, 1, win);
  CHECK(s.verdict == Verdict::verified);
  CHECK(s.j0 == 1);
  CHECK(s.p.order == 0.0);
  for (std::size_t j = 1; j < s.terms.size(); ++j) CHECK(s.terms[j].eps < s.terms[j - 1].eps);
  for (std::size_t j = 1; j < s.terms.size(); ++j)
    for (int a = 0; a <= std::min<int>(3, j); ++a) CHECK(s.terms[j].measured[a] < std::ldexp(1.0, j));
  CHECK(asymptotic_sum(ps, chi, 3, 0, 1, 1, win, 2).verdict == Verdict::verified);

  auto single = asymptotic_sum({ps[0]}, chi, 3, 0, 1, 1, win);
  CHECK(single.verdict == Verdict::verified);
  CHECK(single.j0 == -1);
  CHECK(single.p(0.3, 10.0) == doctest::Approx(1.0));
  CHECK(single.p(0.3, 0.5) == 0.0);
  CHECK_THROWS_AS(asymptotic_sum({ps[0], ps[0]}, chi, 3, 0, 1, 1, win), PreconditionError);

  std::vector<SymbolModel> xs;
  for (int j = 0; j <= 5; ++j) xs.push_back(SymbolModel::from_key("sep:exp:bracket:" + std::to_string(-j)));
  auto t = asymptotic_sum(xs, chi, 2, 0, 1, 1, win);
  CHECK(t.verdict == Verdict::verified);
  DCFlavor dc;
  dc.w = Weight::log_weight();
  auto sn = symbol_seminorm(t.p, t.m0, dc, win);
  CHECK(std::isfinite(sn.value));
  CHECK_FALSE(sn.truncated);
}

TEST_CASE("pseudo-convolution kernels") {
  FrequencyWindow win(128, 1.0 / 8);
  auto psi = BumpModel::box_product(1.0);
  auto a = kernel_of(psi, SymbolModel::from_key("sep:one:one"), win);
  auto b = kernel_of(psi, SymbolModel::from_key("sep:cos:bracket:1"), win);
  double worst1 = 0, worst2 = 0;
  for (std::size_t i = 0; i < win.size(); i += 97)
    for (std::size_t j = 0; j < win.size(); j += 89) {
      double xi = win.at(i), eta = win.at(j), z = xi - eta;
      cplx ref1 = psi.fourier(z) / (2 * kPi);
      cplx ref2 = (1 + std::abs(eta)) * 0.5 * (psi.fourier(z - 1) + psi.fourier(z + 1)) / (2 * kPi);
      worst1 = std::max(worst1, std::abs(a(i, j) - ref1));
      worst2 = std::max(worst2, std::abs(b(i, j) - ref2) / (1 + std::abs(eta)));
    }
  CHECK(worst1 < 1e-8);
  CHECK(worst2 < 1e-8);
}

TEST_CASE("brackets") {
  FrequencyWindow win(128, 1.0 / 8);
  auto a = KernelModel::from_function(win, [](double, double eta) { return cplx(std::exp(-std::abs(eta)), 0); }, "e");
  auto lg = Weight::log_weight();
  auto b0 = bracket(a, 0, 0, lg);
  CHECK(b0.value == doctest::Approx(2.0).epsilon(1e-6));
  CHECK_FALSE(b0.lower_bound_only);
  CHECK(bracket(a, 1, 0, lg).value == doctest::Approx(4.0).epsilon(1e-5));
  auto flat = KernelModel::from_function(win, [](double, double) { return cplx(1, 0); }, "flat");
  CHECK(bracket(flat, 0, 0, lg).lower_bound_only);
  CHECK(weight_exp_integral(lg, 1.5) == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(std::isinf(weight_exp_integral(lg, 1.0)));
  CHECK(std::isfinite(weight_exp_integral(Weight::gevrey(0.5), 0.1)));
}

TEST_CASE("operator application") {
  FrequencyWindow win(128, 1.0 / 8);
  auto psi = BumpModel::box_product(1.0);
  auto u = PhysicalModel::gaussian(0.7);
  auto uh = fourier_of(u, win);
  auto ps = psi.samples(win);
  auto us = physical_samples(u, win);

  auto out = apply_operator(SymbolModel::from_key("sep:one:one"), psi, uh);
  std::vector<double> prod(ps.size());
  for (std::size_t k = 0; k < ps.size(); ++k) prod[k] = ps[k] * us[k];
  auto ref = spectrum_of_samples(prod, win, "psi u");
  // D u = -i u', and u' = -x u / s^2
  auto d = apply_operator(SymbolModel::from_key("sep:one:id"), psi, uh);
  std::vector<cplx> dprod(ps.size());
  for (std::size_t k = 0; k < ps.size(); ++k) {
    double x = win.x_at(k);
    dprod[k] = cplx(0, 1) * ps[k] * x * us[k] / (0.7 * 0.7);
  }
  auto dref = fft::forward(win, dprod);
  double w1 = 0, w2 = 0;
  for (std::size_t i = 0; i < win.size(); ++i) {
    if (std::abs(win.at(i)) > 64) continue;
    w1 = std::max(w1, std::abs(out.out.value(i) - ref.value(i)));
    w2 = std::max(w2, std::abs(d.out.value(i) - dref[i]));
  }
  CHECK(w1 < 1e-7);
  CHECK(w2 < 1e-6);

  // u = delta: output is psi(0) for p = 1; psi^ decays slowly, so use a wide window
  FrequencyWindow wide(512, 1.0 / 8);
  auto ka = kernel_of(psi, SymbolModel::from_key("sep:one:one"), wide);
  double psi0 = psi.samples(wide)[wide.fft_size() / 2];
  for (double xi : {0.0, 5.0, -30.0}) {
    std::size_t i = wide.index_of(xi);
    cplx row(0, 0);
    for (std::size_t j = 0; j + 1 < wide.size(); ++j) row += ka(i, j) * wide.step();
    CHECK(std::abs(row - psi0) < 1e-7);
  }

  // linearity
  auto g2 = fourier_of(PhysicalModel::triangle(1.0), win, false);
  std::vector<cplx> mix(win.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = uh.value(i) + 2.0 * g2.value(i);
  auto p = SymbolModel::from_key("sep:cos:bracket:1");
  auto lhs = apply_operator(p, psi, GridSpectrum(win, mix, "mix"));
  auto r1 = apply_operator(p, psi, uh), r2 = apply_operator(p, psi, g2);
  double lin = 0;
  for (std::size_t i = 0; i < win.size(); i += 3)
    lin = std::max(lin, std::abs(lhs.out.value(i) - r1.out.value(i) - 2.0 * r2.out.value(i)));
  CHECK(lin < 1e-9);
}

TEST_CASE("kernel bracket bounds under cutoffs") {
  FrequencyWindow win(128, 1.0 / 8);
  // a wide bump keeps psi^ negligible at the window edge
  auto psi = BumpModel::box_product(8.0);
  auto psi1 = BumpModel::box_unit(6.0, 4.0);
  auto lg = Weight::log_weight();
  auto r0 = lemma1_check(SymbolModel::from_key("sep:one:one"), psi, psi1, 0, 0, 0, lg, win);
  REQUIRE(r0.Lambda1);
  CHECK(r0.part1 == Verdict::verified);
  CHECK(r0.margin1 >= 0);
  CHECK(r0.margin2 >= 0);
  CHECK(r0.part2 != Verdict::refuted);
  auto r1 = lemma1_check(SymbolModel::from_key("sep:cos:japanese:1"), psi, psi1, 1, 1, 2, lg, win);
  CHECK(r1.part1 != Verdict::refuted);
  CHECK(r1.part2 != Verdict::refuted);
  CHECK(r1.margin2 >= -1e-6 * r1.rhs2);
}

TEST_CASE("kernel file round trip") {
  FrequencyWindow win(128, 1.0 / 8);
  auto a = kernel_of(BumpModel::box_product(1.0), SymbolModel::from_key("sep:cos:bracket:1"), win);
  std::string path = "kernel_roundtrip.bin";
  a.write_binary(path);
  auto b = KernelModel::read_binary(path);
  std::remove(path.c_str());
  for (std::size_t i = 0; i < win.size(); i += 301)
    for (std::size_t j = 0; j < win.size(); j += 293) CHECK(a(i, j) == b(i, j));
}
