#include "convolab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "convolab/fft.hpp"
#include "convolab/kernels.hpp"

namespace convolab {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double num(const std::string& s, const std::string& what) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " from '" + s + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}
}  // namespace

PhysicalModel PhysicalModel::dirac(double mass, double at) {
  PhysicalModel m;
  m.tag = "delta";
  m.dirac_mass = mass;
  m.dirac_at = at;
  m.closed_form = [mass, at](double xi) { return mass * std::polar(1.0, -at * xi); };
  return m;
}

PhysicalModel PhysicalModel::indicator(double a, double b) {
  if (!(b > a)) throw DomainError("indicator: need a < b");
  PhysicalModel m;
  m.tag = "indicator";
  m.density = [a, b](double x) { return (x >= a && x <= b) ? 1.0 : 0.0; };
  m.support_lo = a;
  m.support_hi = b;
  m.jumps = {a, b};
  m.piecewise_linear = true;
  m.closed_form = [a, b](double xi) { return fft::segment_transform(a, b, 1, 1, xi); };
  return m;
}

PhysicalModel PhysicalModel::gaussian(double s) {
  if (!(s > 0)) throw DomainError("gaussian: width must be positive");
  PhysicalModel m;
  m.tag = "gaussian";
  m.density = [s](double x) { return std::exp(-x * x / (2 * s * s)); };
  m.support_lo = -kInf;
  m.support_hi = kInf;
  m.closed_form = [s](double xi) { return cplx(std::sqrt(2 * std::numbers::pi) * s * std::exp(-s * s * xi * xi / 2), 0); };
  return m;
}

PhysicalModel PhysicalModel::triangle(double d) {
  if (!(d > 0)) throw DomainError("triangle: half-width must be positive");
  PhysicalModel m;
  m.tag = "triangle";
  m.density = [d](double x) { return std::max(0.0, 1 - std::abs(x) / d); };
  m.support_lo = -d;
  m.support_hi = d;
  m.piecewise_linear = true;
  m.closed_form = [d](double xi) {
    double s = fft::sinc(d * xi / 2);
    return cplx(d * s * s, 0);
  };
  return m;
}

PhysicalModel PhysicalModel::from_key(const std::string& key) {
  auto parts = split(key, ':');
  if (parts.empty()) throw ConfigError("empty physical model key");
  const auto& h = parts[0];
  if (h == "delta" && parts.size() == 1) return dirac();
  if (h == "indicator" && parts.size() == 3) return indicator(num(parts[1], "a"), num(parts[2], "b"));
  if (h == "gaussian") return gaussian(parts.size() > 1 ? num(parts[1], "sigma") : 1.0);
  if (h == "triangle" && parts.size() == 2) return triangle(num(parts[1], "half-width"));
  if (h == "delta+gaussian")
    return dirac().combine(1.0, gaussian(parts.size() > 1 ? num(parts[1], "sigma") : 1.0), 1.0);
  throw ConfigError("unknown physical model key '" + key + "'");
}

std::vector<std::string> PhysicalModel::catalog_keys() {
  return {"delta", "indicator:<a>:<b>", "gaussian:<sigma>", "triangle:<d>", "delta+gaussian:<sigma>"};
}

PhysicalModel PhysicalModel::combine(double a, const PhysicalModel& o, double b) const {
  if (dirac_mass != 0 && o.dirac_mass != 0 && dirac_at != o.dirac_at)
    throw RepresentationError("combine: point masses at different locations");
  PhysicalModel m;
  m.tag = tag + "+" + o.tag;
  auto f = density, g = o.density;
  if (f || g)
    m.density = [f, g, a, b](double x) { return (f ? a * f(x) : 0.0) + (g ? b * g(x) : 0.0); };
  bool fd = static_cast<bool>(f), gd = static_cast<bool>(g);
  m.support_lo = fd && gd ? std::min(support_lo, o.support_lo) : (fd ? support_lo : o.support_lo);
  m.support_hi = fd && gd ? std::max(support_hi, o.support_hi) : (fd ? support_hi : o.support_hi);
  m.jumps = jumps;
  m.jumps.insert(m.jumps.end(), o.jumps.begin(), o.jumps.end());
  m.piecewise_linear = piecewise_linear || o.piecewise_linear;
  m.dirac_mass = a * dirac_mass + b * o.dirac_mass;
  m.dirac_at = dirac_mass != 0 ? dirac_at : o.dirac_at;
  if (closed_form && o.closed_form) {
    auto F = closed_form, G = o.closed_form;
    m.closed_form = [F, G, a, b](double xi) { return a * F(xi) + b * G(xi); };
  }
  return m;
}

PhysicalModel PhysicalModel::times(const std::function<double(double)>& g, const std::string& suffix) const {
  PhysicalModel m = *this;
  m.tag = tag + "*" + suffix;
  m.closed_form = nullptr;
  if (density) {
    auto f = density;
    m.density = [f, g](double x) { return f(x) * g(x); };
  }
  m.dirac_mass = dirac_mass * (dirac_mass != 0 ? g(dirac_at) : 0.0);
  return m;
}

GridSpectrum::GridSpectrum(FrequencyWindow win, std::vector<cplx> samples, std::string provenance)
    : win_(std::move(win)), samples_(std::move(samples)), provenance_(std::move(provenance)) {
  if (samples_.size() != win_.size()) throw ShapeError("spectrum: sample count does not match window");
}

GridSpectrum GridSpectrum::from_log_abs(FrequencyWindow win, std::vector<double> la, std::string provenance) {
  if (la.size() != win.size()) throw ShapeError("spectrum: sample count does not match window");
  GridSpectrum g;
  g.win_ = std::move(win);
  g.log_abs_ = std::move(la);
  g.provenance_ = std::move(provenance);
  return g;
}

cplx GridSpectrum::value(std::size_t i) const {
  if (!samples_.empty()) return samples_[i];
  return {std::exp(log_abs_[i]), 0.0};
}

double GridSpectrum::log_abs(std::size_t i) const {
  if (!log_abs_.empty()) return log_abs_[i];
  return std::log(std::abs(samples_[i]));
}

std::vector<double> GridSpectrum::log_abs_all() const {
  if (!log_abs_.empty()) return log_abs_;
  return kernels::tabulate(samples_.size(), [&](std::size_t i) { return std::log(std::abs(samples_[i])); });
}

const std::vector<cplx>& GridSpectrum::samples() const {
  if (samples_.empty()) throw RepresentationError("spectrum holds log-magnitudes only");
  return samples_;
}

void GridSpectrum::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out.precision(17);
  if (log_only()) {
    out << "xi,log_abs\n";
    for (std::size_t i = 0; i < size(); ++i) out << win_.at(i) << ',' << log_abs_[i] << '\n';
  } else {
    out << "xi,re,im\n";
    for (std::size_t i = 0; i < size(); ++i)
      out << win_.at(i) << ',' << samples_[i].real() << ',' << samples_[i].imag() << '\n';
  }
}

GridSpectrum GridSpectrum::read_csv(const std::string& path, const FrequencyWindow& win) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::string header, line;
  std::getline(in, header);
  bool log_rep = header.find("log_abs") != std::string::npos;
  std::vector<cplx> s;
  std::vector<double> la;
  while (std::getline(in, line)) {
    auto f = split(line, ',');
    if (log_rep && f.size() == 2)
      la.push_back(num(f[1], "log_abs"));
    else if (!log_rep && f.size() == 3)
      s.emplace_back(num(f[1], "re"), num(f[2], "im"));
    else
      throw ConfigError("malformed spectrum row in '" + path + "'");
  }
  if (log_rep) return from_log_abs(win, std::move(la), "csv:" + path);
  return GridSpectrum(win, std::move(s), "csv:" + path);
}

std::vector<double> physical_samples(const PhysicalModel& m, const FrequencyWindow& win) {
  std::vector<double> x(win.fft_size(), 0.0);
  if (!m.density) return x;
  for (std::size_t k = 0; k < x.size(); ++k) {
    double t = win.x_at(k);
    if (t >= m.support_lo && t <= m.support_hi) x[k] = m.density(t);
  }
  return x;
}

GridSpectrum spectrum_of_samples(const std::vector<double>& xs, const FrequencyWindow& win,
                                 const std::string& provenance) {
  return GridSpectrum(win, fft::forward_real(win, xs), provenance);
}

namespace {

void check_aliasing(const PhysicalModel& m, const FrequencyWindow& win, const std::vector<double>& xs) {
  const double box = win.box_half_width();
  if (std::isfinite(m.support_lo) && std::isfinite(m.support_hi)) {
    if (m.support_lo < -box || m.support_hi >= box)
      throw AliasingError("model support exceeds the physical box of the window");
    return;
  }
  double total = 0, edge = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    total += std::abs(xs[k]);
    if (std::abs(win.x_at(k)) > 0.9 * box) edge += std::abs(xs[k]);
  }
  if (total > 0 && edge > 1e-10 * total) throw AliasingError("model mass reaches the edge of the physical box");
}

}  // namespace

GridSpectrum fourier_of(const PhysicalModel& m, const FrequencyWindow& win, bool use_closed_form) {
  const std::size_t n = win.size();
  std::vector<cplx> out(n, cplx(0, 0));
  if (use_closed_form && m.closed_form) {
    auto re = kernels::tabulate(n, [&](std::size_t i) { return m.closed_form(win.at(i)).real(); });
    auto im = kernels::tabulate(n, [&](std::size_t i) { return m.closed_form(win.at(i)).imag(); });
    for (std::size_t i = 0; i < n; ++i) out[i] = {re[i], im[i]};
  } else if (m.density) {
    auto xs = physical_samples(m, win);
    check_aliasing(m, win, xs);
    out = fft::forward_real(win, xs);
    if (m.piecewise_linear || !m.jumps.empty()) {
      const double dx = win.dx();
      for (std::size_t i = 0; i < n; ++i) {
        double s = fft::sinc(win.at(i) * dx / 2);
        out[i] *= s * s;
      }
      // replace the linear interpolant across each jump by the exact one-sided pieces
      const double x0 = win.x_at(0);
      for (double J : m.jumps) {
        double eps = 1e-9 * std::max(1.0, std::abs(J));
        double fl = m.density(J - eps), fr = m.density(J + eps);
        double pos = (J - x0) / dx;
        auto k = static_cast<std::size_t>(std::floor(pos));
        bool on_node = std::abs(pos - std::round(pos)) < 1e-9;
        if (on_node) k = static_cast<std::size_t>(std::round(pos));
        auto xk = [&](std::size_t j) { return win.x_at(j); };
        for (std::size_t i = 0; i < n; ++i) {
          double xi = win.at(i);
          cplx corr;
          if (on_node) {
            corr = fft::segment_transform(xk(k - 1), xk(k), xs[k - 1], fl, xi) +
                   fft::segment_transform(xk(k), xk(k + 1), fr, xs[k + 1], xi) -
                   fft::segment_transform(xk(k - 1), xk(k), xs[k - 1], xs[k], xi) -
                   fft::segment_transform(xk(k), xk(k + 1), xs[k], xs[k + 1], xi);
          } else {
            corr = fft::segment_transform(xk(k), J, xs[k], fl, xi) +
                   fft::segment_transform(J, xk(k + 1), fr, xs[k + 1], xi) -
                   fft::segment_transform(xk(k), xk(k + 1), xs[k], xs[k + 1], xi);
          }
          out[i] += corr;
        }
      }
    }
  }
  if (!(use_closed_form && m.closed_form) && m.dirac_mass != 0)
    for (std::size_t i = 0; i < n; ++i) out[i] += m.dirac_mass * std::polar(1.0, -m.dirac_at * win.at(i));
  GridSpectrum g(win, std::move(out), "fourier:" + m.tag);
  if (std::isfinite(m.support_lo) && std::isfinite(m.support_hi))
    g.support_radius = std::max(std::abs(m.support_lo), std::abs(m.support_hi));
  if (m.dirac_mass != 0) g.support_radius = std::max(std::isfinite(g.support_radius) ? g.support_radius : 0.0, std::abs(m.dirac_at));
  return g;
}

NormResult w_norm(const GridSpectrum& phi, double lambda, const Weight& w) {
  if (lambda < 0) throw DomainError("w_norm: lambda must be nonnegative");
  const auto& win = phi.window();
  auto f = kernels::tabulate(phi.size(), [&](std::size_t i) {
    return std::exp(phi.log_abs(i) + lambda * w(win.at(i)));
  });
  NormResult r;
  // Simpson on each half line: radial weights have their only kink at 0.
  const std::size_t c = win.center();
  if (c % 2 == 0) {
    double s = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      std::size_t j = i < c ? i : i - c;
      double wt = (j == 0 || i == f.size() - 1) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      if (i == c) wt = 2.0;
      s += wt * f[i];
    }
    r.value = s * win.step() / 3;
  } else {
    r.value = kernels::omp::trapezoid(f, win.step());
  }
  double edge = std::max(f.front(), f.back());
  r.lower_bound_only = !(edge <= 1e-12 * r.value);
  return r;
}

SupResult sup_seminorm(const GridSpectrum& u, double lambda, const Weight& w) {
  const auto& win = u.window();
  auto f = kernels::tabulate(u.size(), [&](std::size_t i) { return u.log_abs(i) + lambda * w(win.at(i)); });
  double m = *std::max_element(f.begin(), f.end());
  SupResult r;
  r.value = std::exp(m);
  double best = kInf;
  for (std::size_t i = 0; i < f.size(); ++i)
    if (f[i] >= m - 1e-12 * (1 + std::abs(m)) && std::abs(win.at(i)) < best) {
      best = std::abs(win.at(i));
      r.argmax = win.at(i);
    }
  r.edge_growth = best >= (1 - 1.0 / 64) * win.radius();
  return r;
}

PwOrder pw_order(const GridSpectrum& u, const Weight& w) {
  const auto& win = u.window();
  const auto& lad = win.ladder();
  std::vector<double> env(lad.size(), -kInf), arg(lad.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    double xi = win.at(i);
    if (std::abs(xi) <= 1) continue;
    std::size_t k = scale_of(lad, xi);
    if (k >= lad.size() || (k > 0 && std::abs(xi) <= lad[k - 1])) continue;
    double v = u.log_abs(i);
    if (v > env[k]) env[k] = v, arg[k] = std::abs(xi);
  }
  std::vector<double> X, Y;
  for (std::size_t k = 0; k < lad.size(); ++k)
    if (std::isfinite(env[k])) X.push_back(w(arg[k])), Y.push_back(env[k]);
  PwOrder r;
  if (X.size() < 3) return r;
  bool monotone = true;
  for (std::size_t k = 1; k < Y.size(); ++k)
    if (Y[k] > Y[k - 1] + 1e-6 * (1 + std::abs(Y[k - 1]))) monotone = false;
  const double n = static_cast<double>(X.size());
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < X.size(); ++k) mx += X[k] / n, my += Y[k] / n;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < X.size(); ++k) sxx += (X[k] - mx) * (X[k] - mx), sxy += (X[k] - mx) * (Y[k] - my);
  if (!(sxx > 0)) return r;
  double slope = sxy / sxx;
  double res = 0;
  for (std::size_t k = 0; k < X.size(); ++k) {
    double e = Y[k] - (my + slope * (X[k] - mx));
    res += e * e;
  }
  double se = X.size() > 2 ? std::sqrt(res / (n - 2) / sxx) : 0.0;
  r.lambda = -slope;
  r.ci_low = r.lambda - 2 * se;
  r.ci_high = r.lambda + 2 * se;
  r.status = monotone ? Verdict::verified : Verdict::inconclusive;
  return r;
}

std::vector<double> slow_decrease_margins(const GridSpectrum& u, const Weight& w, double A) {
  if (!(A > 0)) throw DomainError("slow decrease: A must be positive");
  const auto& win = u.window();
  const std::size_t n = u.size();
  const double h = win.step();
  auto la = u.log_abs_all();
  auto wv = kernels::tabulate(n, [&](std::size_t i) { return w(win.at(i)); });
  std::vector<std::size_t> rad(n, kernels::npos);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(win.at(i)) <= 1) continue;
    auto k = static_cast<std::size_t>(std::floor(A * wv[i] / h + 1e-12));
    if (i < k || i + k >= n) continue;
    rad[i] = k;
  }
  auto bm = kernels::omp::ball_max(la, rad);
  const double logA = std::log(A);
  std::vector<double> out(n, kNaN);
  for (std::size_t i = 0; i < n; ++i)
    if (rad[i] != kernels::npos) out[i] = bm[i] + A * wv[i] + logA;
  return out;
}

SlowDecreaseReport slow_decrease_check(const GridSpectrum& u, const Weight& w, std::vector<double> ladder) {
  if (ladder.empty()) throw DomainError("slow decrease: empty ladder");
  std::sort(ladder.begin(), ladder.end());
  if (!(ladder.front() > 0)) throw DomainError("slow decrease: ladder values must be positive");
  const auto& win = u.window();
  const std::size_t n = u.size();
  double wmin = kInf;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(win.at(i)) > 1) wmin = std::min(wmin, w(win.at(i)));
  if (!(win.step() <= 0.1 * ladder.front() * wmin))
    throw PreconditionError("slow decrease: grid step exceeds a tenth of the smallest ball radius");

  SlowDecreaseReport rep;
  rep.ladder = ladder;
  const auto& lad = win.ladder();
  const double tol = -1e-9;
  std::vector<char> fail_all(n, 1);
  for (double A : ladder) {
    auto mg = slow_decrease_margins(u, w, A);
    std::vector<double> smin(lad.size() + 1, kInf);
    double mn = kInf;
    bool holds = true;
    std::size_t excl = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double v = mg[i];
      if (std::isnan(v)) {
        fail_all[i] = 0;
        if (std::abs(win.at(i)) > 1) ++excl;
        continue;
      }
      mn = std::min(mn, v);
      std::size_t k = scale_of(lad, win.at(i));
      smin[k] = std::min(smin[k], v);
      if (v < tol)
        holds = false;
      else
        fail_all[i] = 0;
    }
    for (auto& s : smin)
      if (!std::isfinite(s)) s = kNaN;
    rep.holds_at.push_back(holds);
    rep.min_margin.push_back(mn);
    rep.scale_min_margin.push_back(smin);
    rep.excluded = excl;
    if (holds && !rep.A_star) rep.A_star = A;
  }
  rep.curve_A = rep.A_star ? *rep.A_star : ladder.back();
  rep.margin_curve = slow_decrease_margins(u, w, rep.curve_A);

  if (rep.A_star) {
    rep.verdict = Verdict::verified;
    return rep;
  }
  // worst witness per (scale, sign), judged at the largest A
  const auto& last = rep.curve_A == ladder.back() ? rep.margin_curve : slow_decrease_margins(u, w, ladder.back());
  std::vector<double> best_val(2 * (lad.size() + 1), kInf), best_xi(2 * (lad.size() + 1), kNaN);
  std::vector<char> scale_has(lad.size() + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!fail_all[i]) continue;
    ++rep.witness_count;
    double xi = win.at(i);
    std::size_t k = scale_of(lad, xi);
    scale_has[k] = 1;
    std::size_t slot = 2 * k + (xi > 0 ? 1 : 0);
    if (last[i] < best_val[slot]) best_val[slot] = last[i], best_xi[slot] = xi;
  }
  for (double x : best_xi)
    if (!std::isnan(x)) rep.witnesses.push_back(x);
  std::sort(rep.witnesses.begin(), rep.witnesses.end());
  std::vector<double> seq;
  const auto& smin = rep.scale_min_margin.back();
  for (std::size_t k = 0; k < scale_has.size(); ++k)
    if (scale_has[k]) seq.push_back(smin[k]);
  bool worsening = seq.size() >= 2;
  for (std::size_t k = 1; k < seq.size(); ++k)
    if (!(seq[k] <= seq[k - 1] + 1e-9)) worsening = false;
  rep.verdict = worsening ? Verdict::refuted : Verdict::inconclusive;
  return rep;
}

GridSpectrum convolve(const GridSpectrum& a, const GridSpectrum& b) {
  if (!(a.window() == b.window())) throw ShapeError("convolve: windows differ");
  if (a.log_only() && b.log_only()) {
    auto la = a.log_abs_all(), lb = b.log_abs_all();
    for (std::size_t i = 0; i < la.size(); ++i) la[i] += lb[i];
    return GridSpectrum::from_log_abs(a.window(), std::move(la), a.provenance() + "*" + b.provenance());
  }
  std::vector<cplx> s(a.size());
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = a.value(i) * b.value(i);
  return GridSpectrum(a.window(), std::move(s), a.provenance() + "*" + b.provenance());
}

}  // namespace convolab
