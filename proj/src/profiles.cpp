#include "convolab/profiles.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <sstream>

#include "convolab/core.hpp"
#include "convolab/kernels.hpp"

namespace convolab {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

double log_upper_gamma(double a, double z) {
  if (!(a > 0) || z < 0) throw DomainError("log_upper_gamma: need a > 0 and z >= 0");
  if (z == 0) return std::lgamma(a);
  if (z < a + 1) return std::log(boost::math::gamma_q(a, z)) + std::lgamma(a);
  // Lentz continued fraction for Gamma(a,z) e^z z^-a.
  const double tiny = 1e-300;
  double b = z + 1 - a, c = 1 / tiny, d = 1 / b, h = d;
  for (int i = 1; i < 10000; ++i) {
    double an = -i * (i - a);
    b += 2;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1) < 1e-16) break;
  }
  return -z + a * std::log(z) + std::log(h);
}

double EvenProfile::log_total() const { return std::log(2.0) + log_upper_tail(0.0); }

double EvenProfile::log_tail(double x) const {
  if (x == std::numeric_limits<double>::infinity()) return kNegInf;
  if (x == -std::numeric_limits<double>::infinity()) return log_total();
  if (x >= 0) return log_upper_tail(x);
  double lt = log_total();
  return lt + log1mexp(log_upper_tail(-x) - lt);
}

double EvenProfile::log_mass(double lo, double hi) const {
  if (!(lo < hi)) return kNegInf;
  if (lo >= 0) {
    double a = log_tail(lo), b = log_tail(hi);
    if (b == kNegInf) return a;
    if (a == kNegInf) return kNegInf;
    return a + log1mexp(std::min(b - a, -1e-300));
  }
  if (hi <= 0) return log_mass(-hi, -lo);
  return logsumexp(log_mass(0.0, -lo), log_mass(0.0, hi));
}

StretchedExpProfile::StretchedExpProfile(double beta, double c) : beta_(beta), c_(c) {
  if (!(beta > 0) || !(c > 0)) throw DomainError("stretched-exp profile: need beta > 0, c > 0");
  log_prefactor_ = -std::log(c) / beta - std::log(beta);
}

double StretchedExpProfile::log_density(double t) const { return -c_ * std::pow(std::abs(t), beta_); }

double StretchedExpProfile::log_upper_tail(double x) const {
  if (x == std::numeric_limits<double>::infinity()) return kNegInf;
  return log_prefactor_ + log_upper_gamma(1.0 / beta_, c_ * std::pow(x, beta_));
}

std::string StretchedExpProfile::name() const {
  std::ostringstream os;
  os << "stretched-exp(beta=" << beta_ << ",c=" << c_ << ")";
  return os.str();
}

std::vector<double> TabulatedProfile::graded_grid(double x_max, double knee, double h0, double ratio) {
  std::vector<double> x{0.0};
  // geometric refinement toward the origin, where densities may have a cusp
  for (double t = 1e-7; t < h0; t *= 1.5) x.push_back(t);
  for (double t = h0; t < std::min(knee, x_max); t += h0) x.push_back(t);
  double t = std::min(knee, x_max);
  while (t < x_max) {
    x.push_back(t);
    t *= ratio;
  }
  x.push_back(x_max);
  return x;
}

TabulatedProfile::TabulatedProfile(std::vector<double> x, std::vector<double> log_tail,
                                   std::vector<double> log_density,
                                   std::function<double(double)> exact_density, std::string name)
    : x_(std::move(x)), lt_(std::move(log_tail)), ld_(std::move(log_density)),
      exact_density_(std::move(exact_density)), name_(std::move(name)) {
  if (x_.size() < 2 || lt_.size() != x_.size() || ld_.size() != x_.size())
    throw ShapeError("tabulated profile: inconsistent table");
}

std::shared_ptr<TabulatedProfile> TabulatedProfile::from_profile(const EvenProfile& p, double x_max,
                                                                 std::function<double(double)> exact) {
  auto x = graded_grid(x_max);
  auto lt = kernels::tabulate(x.size(), [&](std::size_t i) { return p.log_upper_tail(x[i]); });
  auto ld = kernels::tabulate(x.size(), [&](std::size_t i) { return p.log_density(x[i]); });
  return std::make_shared<TabulatedProfile>(std::move(x), std::move(lt), std::move(ld), std::move(exact),
                                            "tabulated:" + p.name());
}

std::shared_ptr<TabulatedProfile> TabulatedProfile::from_log_density(std::function<double(double)> ld_fn,
                                                                     double x_max, std::string name) {
  auto x = graded_grid(x_max);
  const std::size_t n = x.size();
  std::vector<double> ld(n);
  for (std::size_t i = 0; i < n; ++i) ld[i] = ld_fn(x[i]);
  // log of the integral over each cell
  auto cell = kernels::tabulate(n - 1, [&](std::size_t i) {
    double a = x[i], b = x[i + 1];
    double m = std::max({ld[i], ld[i + 1], ld_fn(0.5 * (a + b))});
    if (m == kNegInf) return kNegInf;
    auto f = [&](double t) { return std::exp(ld_fn(t) - m); };
    double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0);
    return v > 0 ? m + std::log(v) : kNegInf;
  });
  std::vector<double> lt(n);
  double d = std::max(1e-6, 1e-6 * x_max);
  double slope = (ld_fn(x_max) - ld_fn(x_max - d)) / d;
  if (!(slope < 0)) throw RepresentationError("tabulated profile: density not decaying at x_max");
  lt[n - 1] = ld[n - 1] - std::log(-slope);
  for (std::size_t i = n - 1; i-- > 0;) lt[i] = logsumexp(lt[i + 1], cell[i]);
  return std::make_shared<TabulatedProfile>(std::move(x), std::move(lt), std::move(ld), std::move(ld_fn),
                                            std::move(name));
}

double TabulatedProfile::log_density(double t) const {
  t = std::abs(t);
  if (exact_density_) return exact_density_(t);
  if (t > x_.back()) throw RepresentationError("tabulated profile: density beyond table");
  auto it = std::upper_bound(x_.begin(), x_.end(), t);
  std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - x_.begin()), x_.size() - 1) - 1;
  double u = (t - x_[i]) / (x_[i + 1] - x_[i]);
  return ld_[i] + u * (ld_[i + 1] - ld_[i]);
}

double TabulatedProfile::log_upper_tail(double x) const {
  if (x == std::numeric_limits<double>::infinity()) return kNegInf;
  if (x < 0) throw DomainError("tabulated profile: upper tail needs x >= 0");
  if (x > x_.back()) throw RepresentationError("tabulated profile: tail beyond table");
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - x_.begin()), x_.size() - 1) - 1;
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double m0 = -std::exp(ld_[i] - lt_[i]);
  const double m1 = -std::exp(ld_[i + 1] - lt_[i + 1]);
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * lt_[i] + (t3 - 2 * t2 + t) * h * m0 + (-2 * t3 + 3 * t2) * lt_[i + 1] +
         (t3 - t2) * h * m1;
}

namespace {

// log integral of exp(L(s)) over the real line, where L has kinks at 0 and x
// and decays away from them. Finds the dominant region by a graded scan,
// then integrates it with adaptive Gauss-Kronrod.
double log_integral_two_kinks(const std::function<double(double)>& L, double x, double reach) {
  std::vector<double> pts{0.0, x};
  for (double e = 1e-4; e < reach; e *= 1.5)
    for (double c : {0.0, x})
      for (double sgn : {-1.0, 1.0}) pts.push_back(c + sgn * e);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::vector<double> lv(pts.size());
  double m = kNegInf;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    lv[i] = L(pts[i]);
    m = std::max(m, lv[i]);
  }
  if (m == kNegInf) return kNegInf;
  std::size_t lo = pts.size(), hi = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (lv[i] > m - 60) {
      lo = std::min(lo, i);
      hi = std::max(hi, i);
    }
  lo = lo > 0 ? lo - 1 : 0;
  hi = std::min(hi + 1, pts.size() - 1);
  std::vector<double> cuts{pts[lo]};
  for (double k : {std::min(0.0, x), std::max(0.0, x)})
    if (k > pts[lo] && k < pts[hi]) cuts.push_back(k);
  cuts.push_back(pts[hi]);
  auto f = [&](double s) { return std::exp(L(s) - m); };
  double total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    double err = 0;
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cuts[i], cuts[i + 1], 12,
                                                                           1e-12, &err);
  }
  return total > 0 ? m + std::log(total) : kNegInf;
}

double reach_of(const EvenProfile& p) {
  double l0 = p.log_density(0.0);
  double r = 1.0;
  while (p.log_density(r) > l0 - 80 && r < 1e12) r *= 2;
  return r;
}

}  // namespace

std::shared_ptr<TabulatedProfile> convolve_profiles(const EvenProfile& f, const EvenProfile& g,
                                                    double x_max, std::string name) {
  auto x = TabulatedProfile::graded_grid(x_max);
  const double reach = std::max(reach_of(f), reach_of(g));
  auto ld = kernels::tabulate(x.size(), [&](std::size_t i) {
    double xi = x[i];
    return log_integral_two_kinks([&](double s) { return g.log_density(s) + f.log_density(xi - s); }, xi,
                                  reach);
  });
  auto lt = kernels::tabulate(x.size(), [&](std::size_t i) {
    double xi = x[i];
    return log_integral_two_kinks([&](double s) { return g.log_density(s) + f.log_tail(xi - s); }, xi,
                                  reach);
  });
  return std::make_shared<TabulatedProfile>(std::move(x), std::move(lt), std::move(ld), nullptr,
                                            std::move(name));
}

}  // namespace convolab
