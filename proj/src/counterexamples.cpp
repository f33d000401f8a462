#include "convolab/counterexamples.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "convolab/kernels.hpp"

namespace convolab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -kInf;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

// Radius beyond which the density underflows double range.
double underflow_reach(const EvenProfile& nu) {
  const double l0 = nu.log_density(0.0);
  double r = 1.0;
  while (nu.log_density(r) > l0 - 760 && r < 1e9) r *= 2;
  return r;
}

// int_lo^hi nu by adaptive Gauss-Kronrod on geometric pieces around 0.
double quad_mass(const EvenProfile& nu, double lo, double hi, double reach) {
  lo = std::max(lo, -reach);
  hi = std::min(hi, reach);
  if (!(lo < hi)) return 0;
  std::vector<double> cuts{lo, hi};
  for (double c = 1; c < reach; c *= 2)
    for (double sg : {-1.0, 1.0})
      if (sg * c > lo && sg * c < hi) cuts.push_back(sg * c);
  if (lo < 0 && hi > 0) cuts.push_back(0);
  std::sort(cuts.begin(), cuts.end());
  auto f = [&](double t) { return std::exp(nu.log_density(t)); };
  double total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cuts[i], cuts[i + 1], 10, 1e-13);
  return total;
}

// F(x_i - e) = int_{-inf}^{x_i - e} nu for every grid node x_i, by summing
// short-cell quadratures along the progression.
std::vector<double> shifted_prefix(const EvenProfile& nu, const FrequencyWindow& win, double e, double reach) {
  const std::size_t n = win.size();
  auto f = [&](double t) { return std::exp(nu.log_density(t)); };
  auto cell = [&](double a, double b) {
    a = std::max(a, -reach);
    b = std::min(b, reach);
    if (!(a < b)) return 0.0;
    // densities may have a cusp at 0
    if (a < 1 && b > -1) return quad_mass(nu, a, b, reach);
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 5, 1e-13);
  };
  std::vector<double> F(n);
  F[0] = quad_mass(nu, -kInf, win.at(0) - e, reach);
  for (std::size_t i = 1; i < n; ++i) F[i] = F[i - 1] + cell(win.at(i - 1) - e, win.at(i) - e);
  return F;
}

double union_middle(const EvenProfile& nu, const IntervalFamily& fam, double xi, double reach) {
  double m = 0;
  for (std::size_t j = 0; j < fam.size(); ++j) m += quad_mass(nu, xi - fam.hi(j), xi - fam.lo(j), reach);
  return m;
}

}  // namespace

IntervalFamily IntervalFamily::make(std::vector<double> xi, std::vector<double> d) {
  if (xi.size() != d.size()) throw ShapeError("interval family: centers and half-widths differ in length");
  IntervalFamily f{std::move(xi), std::move(d)};
  for (std::size_t j = 0; j < f.size(); ++j) {
    if (!(f.xi[j] > 0) || !(f.d[j] > 0))
      throw PreconditionError("interval family: centers and half-widths must be positive (j = " +
                              std::to_string(j) + ")");
    if (j == 0) continue;
    if (!(f.lo(j) - f.hi(j - 1) >= 2))
      throw PreconditionError("interval family: intervals " + std::to_string(j - 1) + " and " + std::to_string(j) +
                              " are closer than 2");
    if (!(f.d[j] / f.xi[j] < f.d[j - 1] / f.xi[j - 1]))
      throw PreconditionError("interval family: d_j/xi_j not strictly decreasing at j = " + std::to_string(j));
  }
  return f;
}

void IntervalFamily::check_inside(const FrequencyWindow& win) const {
  for (std::size_t j = 0; j < size(); ++j)
    if (hi(j) > win.radius())
      throw PreconditionError("interval family: interval " + std::to_string(j) + " leaves the window");
}

double distance_to_E(const IntervalFamily& fam, double xi) {
  for (std::size_t j = 0; j < fam.size(); ++j)
    if (xi > fam.lo(j) && xi < fam.hi(j)) return std::min(xi - fam.lo(j), fam.hi(j) - xi);
  return 0;
}

double distance_to_union(const IntervalFamily& fam, double xi) {
  double best = kInf;
  for (std::size_t j = 0; j < fam.size(); ++j) {
    if (xi >= fam.lo(j) && xi <= fam.hi(j)) return 0;
    best = std::min(best, xi < fam.lo(j) ? fam.lo(j) - xi : xi - fam.hi(j));
  }
  return best;
}

SandwichTerms sandwich_terms(const EvenProfile& nu, const IntervalFamily& fam, double xi, SandwichSide side) {
  const double reach = underflow_reach(nu);
  SandwichTerms t;
  double um = union_middle(nu, fam, xi, reach);
  if (side == SandwichSide::intervals) {
    t.r = distance_to_union(fam, xi);
    t.middle = um;
  } else {
    t.r = distance_to_E(fam, xi);
    t.middle = quad_mass(nu, -kInf, kInf, reach) - um;
  }
  if (std::isinf(t.r)) {  // empty family, intervals side
    t.lower = t.upper = 0;
    return t;
  }
  t.lower = std::exp(nu.log_mass(t.r, t.r + 1));
  t.upper = 2 * std::exp(nu.log_tail(t.r));
  return t;
}

SandwichReport sandwich_check(const EvenProfile& nu, const IntervalFamily& fam, const FrequencyWindow& win,
                              double tol) {
  for (std::size_t j = 0; j < fam.size(); ++j)
    if (!(fam.d[j] >= 1))
      throw PreconditionError("sandwich: interval " + std::to_string(j) + " is shorter than 2");
  if (!(std::abs(nu.log_density(1.3) - nu.log_density(-1.3)) < 1e-12))
    throw PreconditionError("sandwich: nu is not symmetric");
  const double reach = underflow_reach(nu);
  SandwichReport rep;
  rep.total = quad_mass(nu, -kInf, kInf, reach);
  const std::size_t n = win.size();
  std::vector<double> mid(n, 0.0);
  for (std::size_t j = 0; j < fam.size(); ++j) {
    // int_{xi - hi}^{xi - lo} nu
    auto up = shifted_prefix(nu, win, fam.lo(j), reach), down = shifted_prefix(nu, win, fam.hi(j), reach);
    for (std::size_t i = 0; i < n; ++i) mid[i] += std::max(0.0, up[i] - down[i]);
  }

  auto fill = [&](SandwichSideReport& s, bool intervals) {
    s.lower_margin.resize(n);
    s.upper_margin.resize(n);
    s.min_lower_margin = s.min_upper_margin = kInf;
    for (std::size_t i = 0; i < n; ++i) {
      double xi = win.at(i);
      double r = intervals ? distance_to_union(fam, xi) : distance_to_E(fam, xi);
      double m = intervals ? mid[i] : rep.total - mid[i];
      double lo = std::isinf(r) ? 0 : std::exp(nu.log_mass(r, r + 1));
      double up = std::isinf(r) ? 0 : 2 * std::exp(nu.log_tail(r));
      s.lower_margin[i] = m - lo;
      s.upper_margin[i] = up - m;
      if (s.lower_margin[i] < s.min_lower_margin) {
        s.min_lower_margin = s.lower_margin[i];
        s.argmin_lower = xi;
      }
      if (s.upper_margin[i] < s.min_upper_margin) {
        s.min_upper_margin = s.upper_margin[i];
        s.argmin_upper = xi;
      }
    }
  };
  fill(rep.intervals, true);
  fill(rep.complement, false);
  const double floor = -tol * rep.total;
  bool ok = rep.intervals.min_lower_margin >= floor && rep.intervals.min_upper_margin >= floor &&
            rep.complement.min_lower_margin >= floor && rep.complement.min_upper_margin >= floor;
  rep.verdict = ok ? Verdict::verified : Verdict::refuted;
  return rep;
}

MassModel MassModel::from_profile(std::shared_ptr<const EvenProfile> p) {
  MassModel m;
  m.tag = p->name();
  m.log_total = p->log_total();
  m.log_mass = [p](double lo, double hi) { return p->log_mass(lo, hi); };
  m.profile = std::move(p);
  return m;
}

MassModel MassModel::from_bump(const BumpModel& g, const FrequencyWindow& win) {
  auto spec = g.spectrum(win);
  const std::size_t n = win.size();
  std::vector<double> v(n);
  double top = 0;
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = spec.value(i).real();
    top = std::max(top, std::abs(v[i]));
  }
  for (std::size_t i = 0; i < n; ++i)
    if (v[i] < -1e-10 * top)
      throw PreconditionError("pseudo-measure: g^ negative at xi = " + fmt(win.at(i)) + " (value " + fmt(v[i]) +
                              ")");
  auto cum = std::make_shared<std::vector<double>>(n, 0.0);
  const double h = win.step();
  for (std::size_t i = 1; i < n; ++i) (*cum)[i] = (*cum)[i - 1] + 0.5 * h * (v[i - 1] + v[i]);
  const double R = win.radius();
  auto C = [cum, h, R](double t) {
    if (t <= -R) return 0.0;
    if (t >= R) return cum->back();
    double u = (t + R) / h;
    std::size_t i = std::min(static_cast<std::size_t>(u), cum->size() - 2);
    double f = u - static_cast<double>(i);
    return (*cum)[i] + f * ((*cum)[i + 1] - (*cum)[i]);
  };
  MassModel m;
  m.tag = g.tag + " (window table)";
  m.log_total = std::log(cum->back());
  m.log_mass = [C](double lo, double hi) {
    double v = C(hi) - C(lo);
    return v > 0 ? std::log(v) : kNegInf;
  };
  return m;
}

double log_conv_with_E(const MassModel& m, const IntervalFamily& fam, double xi) {
  if (fam.size() == 0) return m.log_total;
  // E = (-inf, lo_0) u (hi_j, lo_{j+1}) u (hi_J, inf); xi - (a, b) = (xi - b, xi - a)
  double acc = m.log_mass(xi - fam.lo(0), kInf);
  for (std::size_t j = 0; j + 1 < fam.size(); ++j)
    acc = logsumexp(acc, m.log_mass(xi - fam.lo(j + 1), xi - fam.hi(j)));
  return logsumexp(acc, m.log_mass(-kInf, xi - fam.hi(fam.size() - 1)));
}

PseudoMeasure build_pseudomeasure(const MassModel& g, const IntervalFamily& fam, const FrequencyWindow& win) {
  fam.check_inside(win);
  auto la = kernels::tabulate(win.size(), [&](std::size_t i) { return log_conv_with_E(g, fam, win.at(i)); });
  PseudoMeasure pm{fam, g, GridSpectrum::from_log_abs(win, std::move(la), "(" + g.tag + ") * chi_E")};
  return pm;
}

PseudoMeasure build_pseudomeasure(const BumpModel& g, const IntervalFamily& fam, const FrequencyWindow& win) {
  return build_pseudomeasure(MassModel::from_bump(g, win), fam, win);
}

LemmaBoundsReport verify_bounds(const PseudoMeasure& pm, const EvenProfile& f_hat, const FrequencyWindow& win,
                                double tol) {
  if (!pm.g.profile) throw PreconditionError("verify_bounds: g^ must be given as an even profile");
  if (!(pm.u_hat.window() == win)) throw ShapeError("verify_bounds: window differs from the pseudo-measure's");
  const auto& fam = pm.fam;
  const EvenProfile& g = *pm.g.profile;
  double x_need = win.radius() + (fam.size() ? fam.hi(fam.size() - 1) : 0.0) + 8;
  // f^ nonincreasing on [0, x_need]
  {
    double prev = f_hat.log_density(0.0);
    for (double t = win.step(); t <= x_need; t += win.step()) {
      double cur = f_hat.log_density(t);
      if (cur > prev + 1e-12)
        throw PreconditionError("verify_bounds: f^ increases at t = " + fmt(t));
      prev = cur;
    }
  }
  LemmaBoundsReport rep;
  const std::size_t n = win.size();
  // (eq1)
  rep.eq1_margin.assign(fam.size(), kInf);
  for (std::size_t j = 0; j < fam.size(); ++j) {
    double rhs = std::log(2.0) + g.log_tail(fam.d[j] / 2);
    std::size_t i0 = win.index_of(fam.xi[j] - fam.d[j] / 2), i1 = win.index_of(fam.xi[j] + fam.d[j] / 2);
    for (std::size_t i = i0; i <= i1; ++i) {
      if (std::abs(win.at(i) - fam.xi[j]) > fam.d[j] / 2) continue;
      rep.eq1_margin[j] = std::min(rep.eq1_margin[j], -std::expm1(pm.u_hat.log_abs(i) - rhs));
    }
  }
  // (eq2)
  auto q = convolve_profiles(f_hat, g, x_need, "f^ * g^");
  auto fg = MassModel::from_profile(q);
  auto lfu = kernels::tabulate(n, [&](std::size_t i) { return log_conv_with_E(fg, fam, win.at(i)); });
  const double lmass = g.log_mass(-1.0, 0.0);
  rep.eq2_margin_min = kInf;
  for (std::size_t i = 0; i < n; ++i) {
    double xi = win.at(i);
    double rhs = lmass + f_hat.log_density(distance_to_E(fam, xi) + 2);
    double m = -std::expm1(rhs - lfu[i]);
    if (m < rep.eq2_margin_min) {
      rep.eq2_margin_min = m;
      rep.eq2_argmin = xi;
    }
  }
  rep.fu_hat = GridSpectrum::from_log_abs(win, std::move(lfu), "(f^ * g^) * chi_E");
  bool ok = rep.eq2_margin_min >= -tol;
  for (double m : rep.eq1_margin) ok = ok && m >= -tol;
  rep.verdict = ok ? Verdict::verified : Verdict::refuted;
  return rep;
}

DjSolution solve_dj(const Weight& phi_tilde, const Weight& w, const std::vector<double>& xi) {
  DjSolution sol;
  sol.c_fit = kInf;
  for (double x : xi) {
    if (!(x > 0)) throw DomainError("solve_dj: centers must be positive");
    auto ball_min = [&](double d) {
      if (w.monotone()) return w(x - d);
      double m = std::min(w(x - d), w(x + d));
      const int k = 2000;
      for (int i = 1; i < k; ++i) m = std::min(m, w(x - d + 2 * d * i / k));
      return m;
    };
    auto F = [&](double d) { return phi_tilde(d) - ball_min(d); };
    double lo = 1e-12 * x, hi = x / 2;
    double flo = F(lo), fhi = F(hi);
    if (!(flo < 0 && fhi > 0))
      throw SolveError("solve_dj: no sign change on (0, xi/2] for xi = " + fmt(x) + " (F(0+) = " + fmt(flo) +
                       ", F(xi/2) = " + fmt(fhi) + ")");
    auto tolf = [](double a, double b) { return std::abs(b - a) <= 1e-14 * std::max(1.0, std::abs(a)); };
    auto br = boost::math::tools::bisect(F, lo, hi, tolf);
    double d = 0.5 * (br.first + br.second);
    double rhs = ball_min(d);
    sol.d.push_back(d);
    sol.residual.push_back(std::abs(phi_tilde(d) - rhs) / (1 + std::abs(rhs)));
    sol.c_fit = std::min(sol.c_fit, phi_tilde(d) / w(x));
  }
  sol.ratio_decreasing = true;
  for (std::size_t j = 1; j < xi.size(); ++j)
    if (!(sol.d[j] / xi[j] < sol.d[j - 1] / xi[j - 1])) sol.ratio_decreasing = false;
  if (xi.empty()) sol.c_fit = 0;
  return sol;
}

std::vector<double> default_centers(double xi_max, double xi0, double ratio) {
  std::vector<double> out;
  for (double x = xi0; x <= xi_max; x *= ratio) out.push_back(x);
  return out;
}

namespace {

// Slow-decrease witnesses of u^ near each xi_j: points failing for every A.
void interval_scan(const GridSpectrum& u, const Weight& w, const std::vector<double>& A_ladder,
                   const IntervalFamily& fam, CounterexampleReport& rep) {
  const auto& win = u.window();
  std::vector<std::vector<double>> mg;
  for (double A : A_ladder) mg.push_back(slow_decrease_margins(u, w, A));
  for (std::size_t j = 0; j < fam.size(); ++j) {
    bool wit = false;
    double worst = kInf;
    std::size_t i0 = win.index_of(fam.xi[j] - fam.d[j] / 2), i1 = win.index_of(fam.xi[j] + fam.d[j] / 2);
    for (std::size_t i = i0; i <= i1; ++i) {
      if (std::abs(win.at(i) - fam.xi[j]) > fam.d[j] / 2) continue;
      bool all_fail = true;
      for (const auto& m : mg)
        if (std::isnan(m[i]) || m[i] >= -1e-9) all_fail = false;
      wit = wit || all_fail;
      if (!std::isnan(mg.back()[i])) worst = std::min(worst, mg.back()[i]);
    }
    rep.witness_near.push_back(wit);
    rep.interval_margin.push_back(worst);
  }
}

void thin_curves(const PseudoMeasure& pm, const GridSpectrum& fu, CounterexampleReport& rep) {
  const auto& win = pm.u_hat.window();
  const std::size_t n = win.size();
  const std::size_t stride = std::max<std::size_t>(1, n / 4096);
  for (std::size_t i = win.center(); i < n; i += stride) {
    rep.curve_xi.push_back(win.at(i));
    rep.curve_log_u.push_back(pm.u_hat.log_abs(i));
    rep.curve_log_fu.push_back(fu.log_abs(i));
    rep.curve_r.push_back(pm.r(win.at(i)));
  }
}

bool increasing(const std::vector<double>& v) {
  for (std::size_t j = 1; j < v.size(); ++j)
    if (!(v[j] > v[j - 1])) return false;
  return true;
}
bool decreasing(const std::vector<double>& v) {
  for (std::size_t j = 1; j < v.size(); ++j)
    if (!(v[j] < v[j - 1])) return false;
  return true;
}

// e^{-phi(|t|)} for a nondecreasing phi that is affine beyond `knee`; tails are
// tabulated below the knee and exact above it.
class AffineTailProfile final : public EvenProfile {
 public:
  AffineTailProfile(Weight phi, double knee) : phi_(std::move(phi)), knee_(knee) {
    slope_ = (phi_(2 * knee_) - phi_(knee_)) / knee_;
    if (!(slope_ > 0)) throw PreconditionError("f^ = e^{-phi~}: phi~ is not increasing beyond the window");
    table_ = TabulatedProfile::from_log_density([this](double t) { return log_density(t); }, knee_,
                                                "e^{-" + phi_.key() + "}");
  }
  double log_density(double t) const override { return -phi_(t); }
  double log_upper_tail(double x) const override {
    if (x >= knee_) return -phi_(x) - std::log(slope_);
    return table_->log_upper_tail(x);
  }
  std::string name() const override { return "e^{-" + phi_.key() + "}"; }

 private:
  Weight phi_;
  double knee_, slope_;
  std::shared_ptr<TabulatedProfile> table_;
};

}  // namespace

CounterexampleReport gevrey_counterexample(double a, double r, double s, const std::vector<double>& xi,
                                           const FrequencyWindow& win) {
  if (!(r > 0 && r < 1 && s > 0 && s < 1 && a > 0 && a <= 1))
    throw DomainError("gevrey counterexample: need 0 < r, s < 1 and 0 < a <= 1");
  if (!(a < r / s))
    throw PreconditionError("gevrey counterexample: hypothesis a < r/s fails (a = " + fmt(a) +
                            ", r/s = " + fmt(r / s) + ")");
  if (xi.empty()) throw PreconditionError("gevrey counterexample: no centers xi_j");
  CounterexampleReport rep;
  rep.kind = "gevrey";
  rep.a = a;
  rep.r = r;
  rep.s = s;
  rep.alpha = 0.5 * (std::max(a, r) + r / s);
  rep.beta = 0.5 * (rep.alpha * s / r + 1);
  rep.w_key = Weight::gevrey(s).key();
  rep.phi_key = Weight::gevrey(r).key();
  rep.xi = xi;
  for (double x : xi) rep.d.push_back(std::pow(x, r / rep.alpha));
  auto fam = IntervalFamily::make(rep.xi, rep.d);
  fam.check_inside(win);
  rep.trend_exponent = r * rep.beta / rep.alpha - s;
  for (std::size_t j = 0; j < xi.size(); ++j)
    rep.trend_ratio.push_back(std::pow(rep.d[j] / 2, rep.beta) / std::pow(xi[j], s));
  rep.notes.push_back("g^ modeled as e^{-|t|^beta}, the decay type of a nonnegative Gevrey-1/beta autocorrelation");

  auto g = std::make_shared<StretchedExpProfile>(rep.beta);
  StretchedExpProfile f(rep.alpha);
  auto pm = build_pseudomeasure(MassModel::from_profile(g), fam, win);
  auto vb = verify_bounds(pm, f, win);
  rep.eq1_margins = vb.eq1_margin;
  rep.eq2_margin_min = vb.eq2_margin_min;

  rep.A_ladder_u = {0.2, 0.4};
  rep.A_ladder_fu = {0.5, 1, 2, 4, 8};
  const Weight ws = Weight::gevrey(s), wr = Weight::gevrey(r);
  rep.w_s = slow_decrease_check(pm.u_hat, ws, rep.A_ladder_u).verdict;
  rep.w_r = slow_decrease_check(vb.fu_hat, wr, rep.A_ladder_fu).verdict;
  interval_scan(pm.u_hat, ws, rep.A_ladder_u, fam, rep);

  rep.lower_log_const = kInf;
  for (std::size_t i = 0; i < win.size(); ++i) {
    double x = std::abs(win.at(i));
    if (x < 1) continue;
    rep.lower_log_const = std::min(rep.lower_log_const, vb.fu_hat.log_abs(i) + std::pow(2.0, r) * std::pow(x, r));
  }
  thin_curves(pm, vb.fu_hat, rep);

  if (vb.verdict == Verdict::refuted) {
    rep.verdict = Verdict::refuted;
  } else {
    bool all_wit = std::all_of(rep.witness_near.begin(), rep.witness_near.end(), [](bool b) { return b; });
    bool ok = rep.trend_exponent > 0 && increasing(rep.trend_ratio) && decreasing(rep.interval_margin) && all_wit &&
              rep.w_s == Verdict::refuted && rep.w_r == Verdict::verified;
    rep.verdict = ok ? Verdict::verified : Verdict::inconclusive;
  }
  return rep;
}

CounterexampleReport general_counterexample(const Weight& w, const Weight& phi, const std::vector<double>& xi,
                                            const FrequencyWindow& win) {
  if (xi.empty()) throw PreconditionError("general counterexample: no centers xi_j");
  CounterexampleReport rep;
  rep.kind = "general";
  rep.w_key = w.key();
  rep.phi_key = phi.key();
  rep.xi = xi;
  const Weight phi_t = concave_majorant(phi.plus(w), win, true);
  const Weight gamma = concave_majorant(phi_t, win, true);
  auto dj = solve_dj(phi_t, w, xi);
  rep.d = dj.d;
  rep.dj_residual = dj.residual;
  rep.c_fit = dj.c_fit;
  // M-tilde asks for every rho_j = o(xi_j); test d_j and sqrt(xi_j).
  std::vector<double> rho_sqrt;
  for (double x : xi) rho_sqrt.push_back(std::sqrt(x));
  auto mt = in_M_tilde(w, xi, rep.d);
  auto mt2 = in_M_tilde(w, xi, rho_sqrt);
  for (const auto* m : {&mt, &mt2})
    if (m->verdict == Verdict::refuted) {
      std::string wit = m->witnesses.empty() ? "" : " (first witness j = " + std::to_string(m->witnesses.front()) + ")";
      throw PreconditionError("general counterexample: w fails the M-tilde condition on the centers" + wit);
    }
  if (!dj.ratio_decreasing) rep.notes.push_back("d_j/xi_j not decreasing on these centers");
  auto fam = IntervalFamily::make(rep.xi, rep.d);
  fam.check_inside(win);
  for (std::size_t j = 0; j < xi.size(); ++j) {
    rep.gamma_ratio.push_back(w(xi[j]) / gamma(rep.d[j]));
    rep.trend_ratio.push_back(gamma(rep.d[j]) / w(xi[j]));
  }

  rep.beta = 0.95;
  rep.notes.push_back("g^ modeled as e^{-|t|^0.95}; gamma-norms of g checked on the window");
  auto g = std::make_shared<StretchedExpProfile>(rep.beta);
  // log int e^{-|t|^beta + lambda gamma} over the window; tail must be negligible
  bool g_tail = false;
  for (double lam : {1.0, 2.0, 4.0}) {
    double acc = kNegInf, edge = 0, top = kNegInf;
    const std::size_t n = win.half();
    for (std::size_t k = 0; k <= n; ++k) {
      double t = k * win.step();
      double v = g->log_density(t) + lam * gamma(t);
      acc = logsumexp(acc, v + std::log(win.step() * (k == 0 ? 1.0 : 2.0)));
      top = std::max(top, v);
      edge = v;
    }
    rep.g_norm_log.push_back(acc);
    g_tail = g_tail || edge > top - 40;
  }
  AffineTailProfile f(phi_t, win.radius());
  auto pm = build_pseudomeasure(MassModel::from_profile(g), fam, win);
  auto vb = verify_bounds(pm, f, win);
  rep.eq1_margins = vb.eq1_margin;
  rep.eq2_margin_min = vb.eq2_margin_min;

  rep.A_ladder_u = {0.25, 0.5};
  rep.A_ladder_fu = {0.5, 1, 2, 4, 8};
  rep.w_s = slow_decrease_check(pm.u_hat, w, rep.A_ladder_u).verdict;
  rep.w_r = slow_decrease_check(vb.fu_hat, w, rep.A_ladder_fu).verdict;
  interval_scan(pm.u_hat, w, rep.A_ladder_u, fam, rep);
  thin_curves(pm, vb.fu_hat, rep);

  if (vb.verdict == Verdict::refuted) {
    rep.verdict = Verdict::refuted;
  } else {
    bool ok = !g_tail && decreasing(rep.gamma_ratio) && rep.w_s == Verdict::refuted &&
              rep.w_r == Verdict::verified && mt.verdict == Verdict::verified &&
              mt2.verdict == Verdict::verified;
    rep.verdict = ok ? Verdict::verified : Verdict::inconclusive;
  }
  if (g_tail) rep.notes.push_back("gamma-norm of g not resolved on the window");
  return rep;
}

}  // namespace convolab
