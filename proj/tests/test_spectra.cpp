#include <cmath>
#include <cstdio>
#include <numbers>

#include "convolab/spectra.hpp"
#include "doctest.h"

using namespace convolab;

namespace {
GridSpectrum from_fn(const FrequencyWindow& win, double (*f)(double)) {
  std::vector<double> la(win.size());
  for (std::size_t i = 0; i < la.size(); ++i) la[i] = f(win.at(i));
  return GridSpectrum::from_log_abs(win, la, "test");
}
}  // namespace

TEST_CASE("transforms of catalog models") {
  FrequencyWindow win(50, 1.0 / 64);
  auto ind = fourier_of(PhysicalModel::indicator(-1, 1), win, false);
  double worst = 0;
  for (std::size_t i = 0; i < win.size(); ++i) {
    double xi = win.at(i);
    double ref = xi == 0 ? 2.0 : 2 * std::sin(xi) / xi;
    worst = std::max(worst, std::abs(ind.value(i) - cplx(ref, 0)));
  }
  CHECK(worst < 1e-6);
  auto g = fourier_of(PhysicalModel::gaussian(), win, false);
  for (double xi : {0.0, 1.5, 4.0})
    CHECK(g.value(win.index_of(xi)).real() ==
          doctest::Approx(std::sqrt(2 * std::numbers::pi) * std::exp(-xi * xi / 2)).epsilon(1e-10));
  auto d = fourier_of(PhysicalModel::dirac(), win);
  for (std::size_t i = 0; i < win.size(); i += 101) CHECK(std::abs(d.value(i) - cplx(1, 0)) < 1e-15);
  // indicator with a jump that sits exactly on a grid node
  FrequencyWindow w2(64, 1.0 / 16);  // dx = pi/64, box starts at -16 pi
  double node = w2.x_at(w2.fft_size() / 2 + 40);
  auto ind2 = fourier_of(PhysicalModel::indicator(-1, node), w2, false);
  auto ref2 = fourier_of(PhysicalModel::indicator(-1, node), w2, true);
  double worst2 = 0;
  for (std::size_t i = 0; i < w2.size(); ++i) worst2 = std::max(worst2, std::abs(ind2.value(i) - ref2.value(i)));
  CHECK(worst2 < 1e-9);
}

TEST_CASE("transform is linear") {
  FrequencyWindow win(50, 1.0 / 64);
  auto f = PhysicalModel::indicator(-1, 2);
  auto g = PhysicalModel::triangle(1.5);
  auto fg = fourier_of(f.combine(2.0, g, -3.0), win, false);
  auto F = fourier_of(f, win, false), G = fourier_of(g, win, false);
  double worst = 0;
  for (std::size_t i = 0; i < win.size(); ++i)
    worst = std::max(worst, std::abs(fg.value(i) - (2.0 * F.value(i) - 3.0 * G.value(i))));
  CHECK(worst < 1e-10);
}

TEST_CASE("aliasing is reported") {
  FrequencyWindow win(1024, 1);  // box half-width pi
  CHECK_THROWS_AS(fourier_of(PhysicalModel::indicator(-5, 5), win, false), AliasingError);
  CHECK_THROWS_AS(fourier_of(PhysicalModel::gaussian(2.0), win, false), AliasingError);
}

TEST_CASE("weighted norms") {
  FrequencyWindow win(32, 1.0 / 32);
  auto g = fourier_of(PhysicalModel::gaussian(), win, false);
  auto n = w_norm(g, 1.0, Weight::log_weight());
  // int sqrt(2pi) e^{-x^2/2} (1+|x|) = 2 pi + 2 sqrt(2 pi)
  CHECK(n.value == doctest::Approx(2 * std::numbers::pi + 2 * std::sqrt(2 * std::numbers::pi)).epsilon(1e-8));
  CHECK_FALSE(n.lower_bound_only);
  auto d = fourier_of(PhysicalModel::dirac(), win);
  CHECK(w_norm(d, 1.0, Weight::log_weight()).lower_bound_only);

  FrequencyWindow big(4096, 1.0 / 4);
  auto u = from_fn(big, [](double x) { return -std::sqrt(std::abs(x)); });
  auto s = sup_seminorm(u, 1.0, Weight::gevrey(0.5));
  CHECK(s.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(s.edge_growth);
  CHECK(sup_seminorm(u, 2.0, Weight::gevrey(0.5)).edge_growth);
}

TEST_CASE("decay order") {
  FrequencyWindow win(4096, 1.0 / 4);
  auto one = from_fn(win, [](double) { return 0.0; });
  auto p1 = pw_order(one, Weight::log_weight());
  CHECK(p1.lambda == doctest::Approx(0.0));
  auto cube = from_fn(win, [](double x) { return -3 * std::log1p(std::abs(x)); });
  auto p3 = pw_order(cube, Weight::log_weight());
  CHECK(p3.lambda == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(p3.status == Verdict::verified);
  auto sq = from_fn(win, [](double x) { return -std::sqrt(std::abs(x)); });
  CHECK(pw_order(sq, Weight::gevrey(0.5)).lambda == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("slow decrease calibration") {
  FrequencyWindow win(1024, 1.0 / 32);
  auto lg = Weight::log_weight();
  auto one = fourier_of(PhysicalModel::dirac(), win);
  auto r1 = slow_decrease_check(one, lg);
  CHECK(r1.verdict == Verdict::verified);
  REQUIRE(r1.A_star);
  CHECK(*r1.A_star <= 1.0);
  auto ex = from_fn(win, [](double x) { return -std::abs(x); });
  auto r2 = slow_decrease_check(ex, lg);
  CHECK(r2.verdict == Verdict::refuted);
  CHECK(r2.witness_count > 0);
  // margins increase with A wherever both are evaluated
  auto m1 = slow_decrease_margins(ex, lg, 1.0), m2 = slow_decrease_margins(ex, lg, 2.0);
  for (std::size_t i = 0; i < m1.size(); i += 7)
    if (!std::isnan(m1[i]) && !std::isnan(m2[i])) CHECK(m2[i] >= m1[i] - 1e-12);
  // a coarse grid violates the resolution precondition
  FrequencyWindow coarse(1024, 1);
  CHECK_THROWS_AS(slow_decrease_check(fourier_of(PhysicalModel::dirac(), coarse), lg), PreconditionError);
}

TEST_CASE("slow decrease verdict survives a tiny smooth perturbation") {
  FrequencyWindow win(1024, 1.0 / 32);
  auto lg = Weight::log_weight();
  auto base = fourier_of(PhysicalModel::dirac(), win);
  auto eps = fourier_of(PhysicalModel::gaussian(0.5), win);
  std::vector<cplx> s(win.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = base.value(i) + 1e-3 * eps.value(i);
  GridSpectrum pert(win, s, "perturbed");
  CHECK(slow_decrease_check(pert, lg).verdict == slow_decrease_check(base, lg).verdict);
}

TEST_CASE("spectrum csv round trip and shape checks") {
  FrequencyWindow win(32, 1.0 / 32);
  auto g = fourier_of(PhysicalModel::gaussian(), win, false);
  std::string path = "spectrum_roundtrip.csv";
  g.write_csv(path);
  auto back = GridSpectrum::read_csv(path, win);
  for (std::size_t i = 0; i < win.size(); i += 50) CHECK(std::abs(back.value(i) - g.value(i)) < 1e-15);
  std::remove(path.c_str());
  FrequencyWindow other(64, 1.0 / 16);
  CHECK_THROWS_AS(convolve(g, fourier_of(PhysicalModel::dirac(), other)), ShapeError);
}
