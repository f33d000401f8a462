#include "convolab/mollifiers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "convolab/fft.hpp"
#include "convolab/kernels.hpp"

namespace convolab {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double num(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bump key: bad " + what + " '" + s + "'");
  }
}

std::vector<cplx> tabulate_complex(const FrequencyWindow& win, const std::function<cplx(double)>& f) {
  const std::size_t n = win.size();
  auto re = kernels::tabulate(n, [&](std::size_t i) { return f(win.at(i)).real(); });
  auto im = kernels::tabulate(n, [&](std::size_t i) { return f(win.at(i)).imag(); });
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {re[i], im[i]};
  return out;
}

std::vector<double> box_widths(double width, int K) {
  if (!(width > 0) || K < 3) throw DomainError("box product: need width > 0 and K >= 3");
  std::vector<double> a(K);
  double s = 0;
  for (int k = 0; k < K; ++k) s += a[k] = 1.0 / ((k + 1.0) * (k + 1.0));
  for (auto& v : a) v *= width / s;
  return a;
}

}  // namespace

GridSpectrum BumpModel::spectrum(const FrequencyWindow& win) const {
  if (fourier) {
    GridSpectrum g(win, tabulate_complex(win, fourier), tag);
    g.support_radius = std::max(std::abs(lo), std::abs(hi));
    return g;
  }
  if (tabulated) {
    if (!(tabulated->window() == win)) throw RepresentationError("bump '" + tag + "' is tabulated on another window");
    return *tabulated;
  }
  if (!physical) throw RepresentationError("bump '" + tag + "' has no representation");
  PhysicalModel m;
  m.tag = tag;
  m.density = physical;
  m.support_lo = lo;
  m.support_hi = hi;
  m.jumps = jumps;
  auto g = fourier_of(m, win, false);
  g.support_radius = std::max(std::abs(lo), std::abs(hi));
  return g;
}

std::vector<double> BumpModel::samples(const FrequencyWindow& win) const {
  std::vector<double> x(win.fft_size(), 0.0);
  if (physical) {
    for (std::size_t k = 0; k < x.size(); ++k) {
      double t = win.x_at(k);
      if (t >= lo && t <= hi) x[k] = physical(t);
    }
    return x;
  }
  if (lo < -win.box_half_width() || hi >= win.box_half_width())
    throw AliasingError("bump '" + tag + "' does not fit in the physical box");
  auto xs = fft::inverse(win, spectrum(win).samples());
  // outside the support only round-off is left, and symbols may amplify it
  for (std::size_t k = 0; k < x.size(); ++k) {
    double t = win.x_at(k);
    if (t >= lo && t <= hi) x[k] = xs[k].real();
  }
  return x;
}

double BumpModel::integral() const {
  if (fourier) return fourier(0.0).real();
  if (tabulated) return tabulated->value(tabulated->window().center()).real();
  throw RepresentationError("bump '" + tag + "': integral needs a transform");
}

BumpModel BumpModel::indicator(double a, double b) {
  if (!(b > a)) throw DomainError("indicator: need a < b");
  BumpModel m;
  m.tag = "indicator:" + std::to_string(a) + ":" + std::to_string(b);
  m.lo = a;
  m.hi = b;
  m.nonnegative = true;
  m.plateau = std::make_pair(a, b);
  m.physical = [](double) { return 1.0; };
  m.fourier = [a, b](double xi) {
    double c = (a + b) / 2, r = (b - a) / 2;
    return std::exp(cplx(0, -c * xi)) * (2 * r * fft::sinc(r * xi));
  };
  m.jumps = {a, b};
  return m;
}

BumpModel BumpModel::triangle(double d) {
  if (!(d > 0)) throw DomainError("triangle: need d > 0");
  BumpModel m;
  m.tag = "triangle:" + std::to_string(d);
  m.lo = -d;
  m.hi = d;
  m.nonnegative = true;
  m.physical = [d](double x) { return std::max(0.0, (d - std::abs(x)) / (d * d)); };
  m.fourier = [d](double xi) {
    double s = fft::sinc(d * xi / 2);
    return cplx(s * s, 0);
  };
  return m;
}

BumpModel BumpModel::box_product(double width, int K) {
  auto a = box_widths(width, K);
  BumpModel m;
  m.tag = "box-product:" + std::to_string(width);
  m.lo = -width / 2;
  m.hi = width / 2;
  m.nonnegative = true;
  m.fourier = [a](double xi) {
    double p = 1;
    for (double ak : a) p *= fft::sinc(ak * xi / 2);
    return cplx(p, 0);
  };
  return m;
}

BumpModel BumpModel::box_unit(double c, double width, int K) {
  if (!(c > width / 2)) throw DomainError("box unit: need c > width/2");
  auto psi = box_product(width, K);
  BumpModel m;
  m.tag = "box-unit:" + std::to_string(c) + ":" + std::to_string(width);
  m.lo = -c - width / 2;
  m.hi = c + width / 2;
  m.nonnegative = true;
  m.plateau = std::make_pair(-c + width / 2, c - width / 2);
  auto pf = psi.fourier;
  m.fourier = [pf, c](double xi) { return 2 * c * fft::sinc(c * xi) * pf(xi); };
  return m;
}

BumpModel BumpModel::gevrey_bump(double beta, double r) {
  if (!(beta > 0 && beta < 1) || !(r > 0)) throw DomainError("gevrey bump: need 0 < beta < 1, r > 0");
  const double k = beta / (1 - beta);
  BumpModel m;
  m.tag = "gevrey-bump:" + std::to_string(beta) + ":" + std::to_string(r);
  m.lo = -r;
  m.hi = r;
  m.nonnegative = true;
  m.physical = [k, r](double x) {
    double t = x / r, q = 1 - t * t;
    if (q <= 0) return 0.0;
    return std::exp(-std::pow(q, -k));
  };
  return m;
}

BumpModel BumpModel::from_key(const std::string& key) {
  auto p = split(key, ':');
  if (p.empty()) throw ConfigError("empty bump key");
  const auto& h = p[0];
  if (h == "indicator" && p.size() == 3) return indicator(num(p[1], "a"), num(p[2], "b"));
  if (h == "triangle" && p.size() == 2) return triangle(num(p[1], "d"));
  if (h == "box-product" && p.size() == 2) return box_product(num(p[1], "width"));
  if (h == "box-unit" && p.size() == 3) return box_unit(num(p[1], "c"), num(p[2], "width"));
  if (h == "gevrey-bump" && (p.size() == 2 || p.size() == 3))
    return gevrey_bump(num(p[1], "beta"), p.size() == 3 ? num(p[2], "r") : 1.0);
  throw ConfigError("unknown bump key '" + key + "'");
}

std::vector<std::string> BumpModel::catalog_keys() {
  return {"indicator:<a>:<b>", "triangle:<d>", "box-product:<width>", "box-unit:<c>:<width>",
          "gevrey-bump:<beta>[:<r>]"};
}

BumpModel make_autocorr_bump(const BumpModel& h, const std::optional<FrequencyWindow>& win) {
  BumpModel g;
  g.tag = "autocorr(" + h.tag + ")";
  g.lo = h.lo - h.hi;
  g.hi = h.hi - h.lo;
  g.nonnegative = h.nonnegative;
  if (h.fourier) {
    auto hf = h.fourier;
    g.fourier = [hf](double xi) { return cplx(std::norm(hf(xi)), 0); };
    return g;
  }
  if (!win) throw RepresentationError("autocorrelation of '" + h.tag + "' needs a window");
  auto s = h.spectrum(*win).samples();
  std::vector<cplx> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = cplx(std::norm(s[i]), 0);
  g.tabulated = GridSpectrum(*win, std::move(out), g.tag);
  return g;
}

UnitSequence ehrenpreis_units(const BumpModel& Phi, const BumpModel& phi, int N_max, const FrequencyWindow& win,
                              std::optional<std::pair<double, double>> outer) {
  if (N_max < 1) throw DomainError("units: N_max must be >= 1");
  if (!Phi.plateau || !Phi.fourier) throw PreconditionError("units: Phi needs a plateau and a closed-form transform");
  if (!phi.fourier || !phi.nonnegative) throw PreconditionError("units: phi must be nonnegative with a closed form");
  if (std::abs(phi.integral() - 1) > 1e-9) throw PreconditionError("units: phi must have unit integral");
  auto box = outer.value_or(std::make_pair(-win.box_half_width(), win.box_half_width()));
  // supp chi_N = supp Phi + supp phi for every N, so a violation shows at N = 1 already
  if (Phi.lo + phi.lo < box.first || Phi.hi + phi.hi > box.second) {
    std::ostringstream os;
    os << "units: supp Phi + supp phi = [" << Phi.lo + phi.lo << ", " << Phi.hi + phi.hi
       << "] leaves the outer interval at N = 1";
    throw PreconditionError(os.str());
  }
  UnitSequence seq;
  seq.Phi = Phi;
  seq.phi = phi;
  seq.N_max = N_max;
  seq.core = {Phi.plateau->first + phi.hi, Phi.plateau->second + phi.lo};
  if (!(seq.core.second > seq.core.first)) throw PreconditionError("units: empty core, phi too wide for the plateau");
  seq.members.push_back(Phi);
  for (int N = 1; N <= N_max; ++N) {
    BumpModel m;
    m.tag = "unit:" + std::to_string(N);
    m.lo = Phi.lo + phi.lo;
    m.hi = Phi.hi + phi.hi;
    m.nonnegative = Phi.nonnegative;
    m.plateau = seq.core;
    auto F = Phi.fourier, f = phi.fourier;
    m.fourier = [F, f, N](double xi) { return F(xi) * std::pow(f(xi / N), N); };
    seq.members.push_back(std::move(m));
  }
  for (const auto& m : seq.members) {
    auto xs = m.samples(win);
    for (std::size_t k = 0; k < xs.size(); ++k) {
      double x = win.x_at(k);
      if (x >= seq.core.first && x <= seq.core.second)
        seq.core_deviation = std::max(seq.core_deviation, std::abs(xs[k] - 1));
    }
  }
  return seq;
}

UnitBoundReport unit_derivative_bounds(const UnitSequence& seq, int alpha_max, const FrequencyWindow& win) {
  if (alpha_max < 1) throw DomainError("unit bounds: alpha_max must be >= 1");
  UnitBoundReport rep;
  rep.C_alpha.assign(alpha_max, 0.0);
  const std::size_t n = win.size();
  for (int N = 1; N <= seq.N_max; ++N) {
    auto s = seq.members[N].spectrum(win).samples();
    double peak = 0;
    for (const auto& v : s) peak = std::max(peak, std::abs(v));
    for (int a = 1; a <= std::min(alpha_max, N); ++a) {
      std::vector<cplx> d(n);
      double top = 0;
      for (std::size_t i = 0; i < n; ++i) {
        double xi = win.at(i);
        d[i] = std::pow(cplx(0, xi), a) * s[i];
        top = std::max(top, std::abs(d[i]));
      }
      double edge = std::max(std::abs(d.front()), std::abs(d[n - 2]));
      if (edge > 1e-8 * top) rep.noise_flag = true;
      auto xs = fft::inverse(win, d);
      double sup = 0;
      for (const auto& v : xs) sup = std::max(sup, std::abs(v.real()));
      rep.rows.push_back({a, N, sup, 0.0});
      rep.C_alpha[a - 1] = std::max(rep.C_alpha[a - 1], std::pow(sup, 1.0 / a) / N);
    }
  }
  rep.C = rep.C_alpha[0];
  for (auto& r : rep.rows) r.bound = std::pow(rep.C * r.N, r.alpha);
  for (double c : rep.C_alpha) rep.consistency = std::max(rep.consistency, c / rep.C);
  if (rep.noise_flag)
    rep.verdict = Verdict::inconclusive;
  else
    rep.verdict = rep.consistency <= 1.1 ? Verdict::verified : Verdict::refuted;
  return rep;
}

UnitNormReport unit_norm_bound(const UnitSequence& seq, double lambda, const Weight& w, const FrequencyWindow& win) {
  UnitNormReport rep;
  bool all = true;
  for (const auto& m : seq.members) {
    auto r = w_norm(m.spectrum(win), lambda, w);
    rep.tail_flag = rep.tail_flag || r.lower_bound_only;
    rep.member_norm.push_back(r.value);
  }
  rep.phi_norm = rep.member_norm.front();
  for (double v : rep.member_norm) all = all && v <= rep.phi_norm * (1 + 1e-9);
  if (!all)
    rep.verdict = Verdict::refuted;
  else
    rep.verdict = rep.tail_flag ? Verdict::inconclusive : Verdict::verified;
  return rep;
}

GridSpectrum multiply_spectrum(const PhysicalModel& v, const std::vector<double>& s, const FrequencyWindow& win,
                               const std::string& tag) {
  if (s.size() != win.fft_size()) throw ShapeError("multiply: sample count does not match window");
  auto xs = physical_samples(v, win);
  for (std::size_t k = 0; k < xs.size(); ++k) xs[k] *= s[k];
  auto out = fft::forward_real(win, xs);
  if (v.dirac_mass != 0) {
    double pos = (v.dirac_at - win.x_at(0)) / win.dx();
    auto k = static_cast<std::size_t>(std::llround(pos));
    if (std::abs(pos - static_cast<double>(k)) > 1e-9 || k >= s.size())
      throw RepresentationError("multiply: point mass is not on a grid node");
    double m = v.dirac_mass * s[k];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += m * std::exp(cplx(0, -v.dirac_at * win.at(i)));
  }
  return GridSpectrum(win, std::move(out), tag);
}

CutoffReport cutoff_lower_bound(const PhysicalModel& v, const BumpModel& chi, const BumpModel& phi, double lambda,
                                const Weight& w, const FrequencyWindow& win) {
  auto cs = chi.samples(win), ps = phi.samples(win);
  double pmax = 0, bad = 0;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    pmax = std::max(pmax, std::abs(ps[k]));
    bad = std::max(bad, std::abs(ps[k] * (cs[k] - 1)));
  }
  if (bad > 1e-9 * std::max(pmax, 1.0)) throw PreconditionError("cutoff: phi chi != phi on the grid");
  std::vector<double> rest(ps.size());
  for (std::size_t k = 0; k < ps.size(); ++k) rest[k] = 1 - ps[k];
  // same rule on both sides, so a kink in v does not show up as a margin
  auto vh = multiply_spectrum(v, std::vector<double>(cs.size(), 1.0), win, "v");
  auto cv = multiply_spectrum(v, cs, win, "chi v");
  auto rv = multiply_spectrum(v, rest, win, "(1-phi) v");
  CutoffReport rep;
  auto sr = sup_seminorm(rv, lambda, w);
  auto cn = w_norm(chi.spectrum(win), lambda, w);
  rep.sup_rest = sr.value;
  rep.chi_norm = cn.value;
  const std::size_t n = win.size();
  rep.margin.resize(n);
  double scale = 0;
  rep.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double a = std::abs(vh.value(i));
    scale = std::max(scale, a);
    double lower = a - rep.sup_rest * (1 + rep.chi_norm) * std::exp(-lambda * w(win.at(i)));
    rep.margin[i] = std::abs(cv.value(i)) - lower;
    rep.min_margin = std::min(rep.min_margin, rep.margin[i]);
  }
  if (rep.min_margin < -1e-9 * std::max(scale, 1.0))
    rep.verdict = Verdict::refuted;
  else
    rep.verdict = sr.edge_growth || cn.lower_bound_only ? Verdict::inconclusive : Verdict::verified;
  return rep;
}

}  // namespace convolab
