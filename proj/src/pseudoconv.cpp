#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <bit>
#include <numbers>

#include "convolab/fft.hpp"
#include "convolab/kernels.hpp"
#include "convolab/symbols.hpp"

namespace convolab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

BumpModel product_bump(const BumpModel& a, const BumpModel& b, const FrequencyWindow& dwin) {
  BumpModel m;
  m.tag = a.tag + "*" + b.tag;
  m.lo = std::max(a.lo, b.lo);
  m.hi = std::min(a.hi, b.hi);
  m.nonnegative = a.nonnegative && b.nonnegative;
  if (a.physical && b.physical) {
    auto fa = a.physical, fb = b.physical;
    m.physical = [fa, fb](double x) { return fa(x) * fb(x); };
    return m;
  }
  auto sa = a.samples(dwin), sb = b.samples(dwin);
  for (std::size_t k = 0; k < sa.size(); ++k) sa[k] *= sb[k];
  m.tabulated = spectrum_of_samples(sa, dwin, m.tag);
  return m;
}

bool interior(const FrequencyWindow& win, std::size_t i) { return std::abs(win.at(i)) <= win.radius() / 2; }

}  // namespace

// Simpson on each half line when the center index is even, trapezoid otherwise.
std::vector<double> quad_weights(const FrequencyWindow& win) {
  const std::size_t n = win.size(), c = win.center();
  const double h = win.step();
  std::vector<double> w(n, h);
  if (c % 2 == 0) {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = i < c ? i : i - c;
      double wt = (j == 0 || i == n - 1) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      if (i == c) wt = 2.0;
      w[i] = wt * h / 3;
    }
  } else {
    w.front() = w.back() = h / 2;
  }
  return w;
}

KernelModel::KernelModel(FrequencyWindow win, Entry entry, std::string provenance)
    : win_(std::move(win)), entry_(std::move(entry)), provenance_(std::move(provenance)) {}

KernelModel KernelModel::from_function(const FrequencyWindow& win, const std::function<cplx(double, double)>& a,
                                       std::string provenance) {
  auto w = win;
  return KernelModel(win, [w, a](std::size_t i, std::size_t j) { return a(w.at(i), w.at(j)); }, std::move(provenance));
}

void KernelModel::write_binary(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  static_assert(std::endian::native == std::endian::little, "kernel files assume a little-endian host");
  const std::uint64_t n = win_.size();
  const double r = win_.radius(), h = win_.step();
  out.write("CLKERN01", 8);
  out.write(reinterpret_cast<const char*>(&n), 8);
  out.write(reinterpret_cast<const char*>(&r), 8);
  out.write(reinterpret_cast<const char*>(&h), 8);
  std::vector<double> row(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      auto v = entry_(i, j);
      row[2 * j] = v.real();
      row[2 * j + 1] = v.imag();
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * 8));
  }
}

KernelModel KernelModel::read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  char magic[8];
  std::uint64_t n = 0;
  double r = 0, h = 0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&n), 8);
  in.read(reinterpret_cast<char*>(&r), 8);
  in.read(reinterpret_cast<char*>(&h), 8);
  if (!in || std::memcmp(magic, "CLKERN01", 8) != 0) throw ConfigError("'" + path + "' is not a kernel file");
  FrequencyWindow win(r, h);
  if (win.size() != n) throw ShapeError("kernel file: size does not match its window");
  auto data = std::make_shared<std::vector<cplx>>(n * n);
  in.read(reinterpret_cast<char*>(data->data()), static_cast<std::streamsize>(n * n * 16));
  if (!in) throw ShapeError("kernel file truncated");
  return KernelModel(
      win, [data, n](std::size_t i, std::size_t j) { return (*data)[i * n + j]; }, "file:" + path);
}

KernelModel kernel_of(const BumpModel& psi, const SymbolModel& p, const FrequencyWindow& win) {
  const auto dwin = win.doubled();
  const auto ps = psi.samples(dwin);
  const std::size_t n = win.size(), N2 = dwin.fft_size(), c = dwin.center();
  const double inv2pi = 1 / (2 * std::numbers::pi);
  std::string prov = "a_{psi p}:" + psi.tag + ":" + p.key;
  if (p.has_derivatives()) {
    auto F = std::make_shared<std::vector<std::vector<cplx>>>();
    auto G = std::make_shared<std::vector<std::vector<double>>>();
    for (const auto& t : p.terms()) {
      std::vector<double> xs(N2);
      for (std::size_t k = 0; k < N2; ++k) xs[k] = ps[k] == 0 ? 0.0 : ps[k] * eval(t.f, dwin.x_at(k));
      auto f = fft::forward_real(dwin, xs);
      for (auto& v : f) v *= inv2pi;
      F->push_back(std::move(f));
      G->push_back(kernels::tabulate(n, [&](std::size_t j) { return eval(t.g, win.at(j)); }));
    }
    return KernelModel(
        win,
        [F, G, c](std::size_t i, std::size_t j) {
          cplx s(0, 0);
          for (std::size_t k = 0; k < F->size(); ++k) s += (*G)[k][j] * (*F)[k][c + i - j];
          return s;
        },
        prov);
  }
  if (n > 4097) throw RepresentationError("kernel_of: table symbols need a window of at most 4097 points");
  auto M = std::make_shared<std::vector<cplx>>(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> xs(N2);
    for (std::size_t k = 0; k < N2; ++k) xs[k] = ps[k] == 0 ? 0.0 : ps[k] * p(dwin.x_at(k), win.at(j));
    auto f = fft::forward_real(dwin, xs);
    for (std::size_t i = 0; i < n; ++i) (*M)[i * n + j] = inv2pi * f[c + i - j];
  }
  return KernelModel(
      win, [M, n](std::size_t i, std::size_t j) { return (*M)[i * n + j]; }, prov);
}

BracketResult bracket(const KernelModel& a, double lambda, double Lambda, const Weight& w) {
  const auto& win = a.window();
  const std::size_t n = win.size();
  auto lw = kernels::tabulate(n, [&](std::size_t j) { return lambda * w(win.at(j)); });
  auto qw = quad_weights(win);
  std::vector<double> wt(n);
  for (std::size_t j = 0; j < n; ++j) wt[j] = qw[j] * std::exp(lw[j]);
  BracketResult r;
  r.rows = kernels::omp::row_integrals(n, wt, [&](std::size_t i, std::size_t j) { return std::abs(a(i, j)); });
  double best = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    if (!interior(win, i)) continue;
    double v = std::exp(-Lambda * w(win.at(i))) * r.rows[i];
    if (v > best) best = v, r.argmax = win.at(i);
    double edge = std::max(std::abs(a(i, 0)) * std::exp(lw[0]), std::abs(a(i, n - 1)) * std::exp(lw[n - 1]));
    if (edge * win.radius() > 1e-8 * r.rows[i]) r.lower_bound_only = true;
  }
  r.value = best;
  return r;
}

AppliedSpectrum apply_kernel(const KernelModel& a, const GridSpectrum& u) {
  const auto& win = a.window();
  if (!(u.window() == win)) throw ShapeError("apply: spectrum window differs from the kernel window");
  const std::size_t n = win.size();
  const auto& s = u.samples();
  auto qw = quad_weights(win);
  std::vector<cplx> out(n);
  std::vector<double> edge_ratio(n, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < n; ++i) {
    cplx acc(0, 0);
    double mass = 0;
    for (std::size_t j = 0; j < n; ++j) {
      cplx t = a(i, j) * s[j];
      acc += qw[j] * t;
      mass += qw[j] * std::abs(t);
    }
    out[i] = acc;
    double edge = std::max(std::abs(a(i, 0) * s[0]), std::abs(a(i, n - 1) * s[n - 1]));
    edge_ratio[i] = mass > 0 ? edge * win.radius() / mass : 0.0;
  }
  AppliedSpectrum r{GridSpectrum(win, std::move(out), "A_a(" + u.provenance() + ")"), false};
  for (std::size_t i = 0; i < n; ++i)
    if (interior(win, i) && edge_ratio[i] > 1e-8) r.low_accuracy = true;
  return r;
}

AppliedSpectrum apply_operator(const SymbolModel& p, const BumpModel& psi, const GridSpectrum& u) {
  return apply_kernel(kernel_of(psi, p, u.window()), u);
}

double weight_exp_integral(const Weight& w, double c) {
  if (!(c > 0)) return kInf;
  using boost::math::quadrature::gauss_kronrod;
  // r = e^t
  auto logf = [&](double t) { return t - c * w(std::exp(t)); };
  double total = 0;
  for (double a = -40; a < 700; a += 20) {
    double b = std::min(a + 20, 700.0);
    total += gauss_kronrod<double, 31>::integrate([&](double t) { return std::exp(logf(t)); }, a, b, 10, 1e-12);
    if (!std::isfinite(total)) return kInf;
  }
  double slope = (logf(700) - logf(690)) / 10;
  if (slope >= 0 || std::exp(logf(700)) / -slope > 1e-9 * total) return kInf;
  return 2 * total;
}

Lemma1Report lemma1_check(const SymbolModel& p, const BumpModel& psi, const BumpModel& psi1, double m, double lambda,
                          double Lambda, const Weight& w, const FrequencyWindow& win) {
  Lemma1Report rep;
  auto a = kernel_of(psi, p, win);
  const double c0 = std::abs(m + lambda);
  for (double d : {1.5, 2.0, 3.0, 4.0, 6.0}) {
    double I = weight_exp_integral(w, d);
    if (!std::isfinite(I)) continue;
    auto sn = symbol_seminorm(p, m, BeurlingFlavor{c0 + d, psi, w, w}, win);
    if (sn.tail_flag) continue;
    rep.Lambda1 = c0 + d;
    auto lhs = bracket(a, lambda, m + lambda, w);
    rep.lhs1 = lhs.value;
    rep.rhs1 = sn.value * I;
    rep.margin1 = rep.rhs1 - rep.lhs1;
    if (rep.margin1 < -1e-6 * std::max(rep.rhs1, 1e-300))
      rep.part1 = Verdict::refuted;
    else
      rep.part1 = lhs.lower_bound_only ? Verdict::inconclusive : Verdict::verified;
    break;
  }
  auto a2 = kernel_of(product_bump(psi1, psi, win.doubled()), p, win);
  auto l2 = bracket(a2, lambda, Lambda, w);
  auto b1 = bracket(a, lambda, Lambda, w);
  auto n1 = w_norm(psi1.spectrum(win), std::abs(Lambda), w);
  rep.lhs2 = l2.value;
  rep.rhs2 = n1.value * b1.value;
  rep.margin2 = rep.rhs2 - rep.lhs2;
  if (rep.margin2 < -1e-6 * std::max(rep.rhs2, 1e-300))
    rep.part2 = Verdict::refuted;
  else
    rep.part2 = l2.lower_bound_only || b1.lower_bound_only || n1.lower_bound_only ? Verdict::inconclusive
                                                                                  : Verdict::verified;
  rep.verdict = combine(rep.part1, rep.part2);
  return rep;
}

}  // namespace convolab
