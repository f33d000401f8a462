#include "convolab/weights.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "convolab/kernels.hpp"

namespace convolab {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " from '" + s + "'");
  }
}

// Radial sample points 0, s, 2s, ... up to `upto`, at most ~max_pts of them.
std::vector<double> radial_grid(double step, double upto, std::size_t max_pts) {
  auto n = static_cast<std::size_t>(std::floor(upto / step + 1e-9));
  std::size_t stride = std::max<std::size_t>(1, n / max_pts);
  std::vector<double> r;
  for (std::size_t i = 0; i <= n; i += stride) r.push_back(static_cast<double>(i) * step);
  if (r.back() < upto - 1e-9 * upto) r.push_back(upto);
  return r;
}

}  // namespace

Weight::Weight(std::string key, Profile profile, bool monotone, bool subadditive)
    : key_(std::move(key)), profile_(std::move(profile)), monotone_(monotone), subadditive_(subadditive) {}

Weight Weight::log_weight() {
  return Weight("log", [](double r) { return std::log1p(r); }, true, true);
}

Weight Weight::gevrey(double a) {
  if (!(a > 0 && a < 1)) throw DomainError("gevrey weight: exponent must lie in (0,1)");
  return Weight("gevrey:" + fmt(a), [a](double r) { return std::pow(r, a); }, true, true);
}

Weight Weight::affine_log(double b) {
  if (!(b > 0)) throw DomainError("affine-log weight: slope must be positive");
  return Weight("affine-log:" + fmt(b), [b](double r) { return b * std::log1p(r); }, true, true);
}

Weight Weight::power_log(double p) {
  if (!(p >= 1)) throw DomainError("power-log weight: power must be >= 1");
  // Subadditivity of log(1+r)^p fails for p > 1 near the origin; not claimed.
  return Weight("power-log:" + fmt(p), [p](double r) { return std::pow(std::log1p(r), p); }, true, p == 1);
}

Weight Weight::sampled(std::vector<double> r, std::vector<double> v, std::string key, bool extrapolate) {
  if (r.size() < 2 || r.size() != v.size()) throw ShapeError("sampled weight: need matching tables of size >= 2");
  for (std::size_t i = 1; i < r.size(); ++i)
    if (!(r[i] > r[i - 1])) throw DomainError("sampled weight: nodes must increase");
  if (r.front() != 0.0) throw DomainError("sampled weight: first node must be 0");
  bool mono = std::is_sorted(v.begin(), v.end());
  auto rr = std::make_shared<std::vector<double>>(std::move(r));
  auto vv = std::make_shared<std::vector<double>>(std::move(v));
  auto prof = [rr, vv, extrapolate](double x) {
    const auto& R = *rr;
    const auto& V = *vv;
    if (x > R.back()) {
      if (!extrapolate) throw RepresentationError("sampled weight evaluated beyond its table");
      std::size_t n = R.size();
      double s = (V[n - 1] - V[n - 2]) / (R[n - 1] - R[n - 2]);
      return V[n - 1] + s * (x - R[n - 1]);
    }
    auto it = std::upper_bound(R.begin(), R.end(), x);
    std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - R.begin()), R.size() - 1) - 1;
    double u = (x - R[i]) / (R[i + 1] - R[i]);
    return V[i] + u * (V[i + 1] - V[i]);
  };
  return Weight(std::move(key), prof, mono, false);
}

Weight Weight::sampled_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sampled weight table '" + path + "'");
  std::vector<double> r, v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("sampled weight: expected 'r,value' rows");
    try {
      r.push_back(std::stod(line.substr(0, comma)));
      v.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      if (r.empty()) continue;  // header row
      throw ConfigError("sampled weight: malformed row '" + line + "'");
    }
  }
  return sampled(std::move(r), std::move(v), "sampled:" + path);
}

Weight Weight::from_key(const std::string& key) {
  auto colon = key.find(':');
  std::string head = key.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : key.substr(colon + 1);
  if (head == "log") return log_weight();
  if (head == "gevrey") return gevrey(parse_double(arg, "gevrey exponent"));
  if (head == "affine-log") return affine_log(parse_double(arg, "affine-log slope"));
  if (head == "power-log") return power_log(parse_double(arg, "power-log power"));
  if (head == "sampled") return sampled_csv(arg);
  throw ConfigError("unknown weight key '" + key + "'");
}

std::vector<std::string> Weight::catalog_keys() {
  return {"log", "gevrey:<a>", "affine-log:<b>", "power-log:<p>", "sampled:<csv>"};
}

Weight Weight::scaled(double s) const {
  auto p = profile_;
  return Weight(fmt(s) + "*" + key_, [p, s](double r) { return s * p(r); }, monotone_ && s >= 0,
                subadditive_ && s >= 0);
}

Weight Weight::plus(const Weight& o) const {
  auto p = profile_, q = o.profile_;
  return Weight(key_ + "+" + o.key_, [p, q](double r) { return p(r) + q(r); }, monotone_ && o.monotone_,
                subadditive_ && o.subadditive_);
}

Weight Weight::compose_after(const std::function<double(double)>& g, const std::string& tag) const {
  auto p = profile_;
  return Weight(tag + "(" + key_ + ")", [p, g](double r) { return g(p(r)); }, false, false);
}

std::vector<double> Weight::sample(double step, std::size_t n) const {
  return kernels::tabulate(n + 1, [&](std::size_t i) { return profile_(static_cast<double>(i) * step); });
}

MembershipReport check_membership(const Weight& w, const FrequencyWindow& win) {
  MembershipReport rep;
  const double R = win.radius();
  auto r = radial_grid(win.step(), 2 * R, 200000);
  auto v = kernels::tabulate(r.size(), [&](std::size_t i) { return w(r[i]); });

  rep.normalization = std::abs(w(0.0)) <= 1e-12;
  if (!rep.normalization) rep.witnesses.push_back(0.0);

  rep.nonnegative = true;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (v[i] < -1e-12) {
      rep.nonnegative = false;
      rep.witnesses.push_back(r[i]);
      break;
    }

  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> uni(-R, R), lg(std::log(1e-3), std::log(R));
  std::bernoulli_distribution coin(0.5);
  rep.subadditive = true;
  std::vector<double> lgrid;
  for (int i = 0; i < 120; ++i) lgrid.push_back(1e-3 * std::pow(R / 1e-3, i / 119.0));
  for (std::size_t i = 0; i < lgrid.size() && rep.subadditive; ++i)
    for (std::size_t j = i; j < lgrid.size(); ++j) {
      double a = lgrid[i], b = lgrid[j];
      double wa = w(a), wb = w(b), wab = w(a + b);
      if (wab > wa + wb + 1e-12 * (1 + std::abs(wa) + std::abs(wb))) {
        rep.subadditive = false;
        rep.witnesses.push_back(a);
        rep.witnesses.push_back(b);
        break;
      }
    }
  for (int k = 0; k < 12000 && rep.subadditive; ++k) {
    double a, b;
    if (k < 10000) {
      a = uni(rng);
      b = uni(rng);
    } else {
      a = std::exp(lg(rng)) * (coin(rng) ? 1 : -1);
      b = std::exp(lg(rng)) * (coin(rng) ? 1 : -1);
    }
    double wa = w(a), wb = w(b), wab = w(a + b);
    if (wab > wa + wb + 1e-12 * (1 + std::abs(wa) + std::abs(wb))) {
      rep.subadditive = false;
      rep.witnesses.push_back(a);
      rep.witnesses.push_back(b);
    }
  }

  // Least-squares fit of w against log(1 + r), then the largest a that works.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] <= 0) continue;
    double x = std::log1p(r[i]);
    sx += x, sy += v[i], sxx += x * x, sxy += x * v[i];
    ++n;
  }
  double var = sxx - sx * sx / static_cast<double>(n);
  rep.fit_b = var > 0 ? (sxy - sx * sy / static_cast<double>(n)) / var : 0.0;
  rep.fit_a = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.size(); ++i) rep.fit_a = std::min(rep.fit_a, v[i] - rep.fit_b * std::log1p(r[i]));
  rep.log_lower_bound = rep.fit_b > 0 && std::isfinite(rep.fit_a);

  // Integral condition: dyadic increments of int_0^R w/(1+r^2) must shrink.
  auto f = [&](double x) { return w(x) / (1 + x * x); };
  const auto& lad = win.ladder();
  double acc = 0, prev = 0;
  std::vector<double> inc;
  for (double Rk : lad) {
    double err = 0;
    double piece = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, prev, Rk, 15, 1e-12, &err);
    acc += piece;
    rep.integral_ladder.push_back(acc);
    if (prev > 0) inc.push_back(piece);
    prev = Rk;
  }
  std::size_t m = inc.size();
  if (m >= 3) {
    std::size_t start = m / 2 >= 3 ? m - m / 2 : m - 3;
    double ax = 0, ay = 0, axx = 0, axy = 0;
    std::size_t cnt = 0;
    bool positive = true;
    for (std::size_t k = start; k < m; ++k) {
      if (!(inc[k] > 0)) {
        positive = false;
        break;
      }
      double x = std::log(lad[k + 1]), y = std::log(inc[k]);
      ax += x, ay += y, axx += x * x, axy += x * y;
      ++cnt;
    }
    if (positive && cnt >= 2) {
      double c = static_cast<double>(cnt);
      rep.tail_slope = (axy - ax * ay / c) / (axx - ax * ax / c);
      rep.integral_bound = rep.tail_slope < -0.05;
    }
  }
  return rep;
}

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::dominates: return "dominates";
    case Relation::strictly_dominates: return "strictly-dominates";
    case Relation::equivalent: return "equivalent";
    case Relation::fails: return "fails";
    case Relation::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

DominationVerdict compare_samples(const std::vector<double>& r, const std::vector<double>& w2,
                                  const std::vector<double>& w1, const std::vector<double>& ladder,
                                  CompareMode mode) {
  DominationVerdict out;
  const std::size_t nsc = ladder.size() + 1;
  std::vector<double> qmin(nsc, std::numeric_limits<double>::infinity());
  std::vector<double> qarg(nsc, 0.0);
  double B = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < 1.0 || w1[i] <= 0) continue;
    double q = w2[i] / w1[i];
    std::size_t k = scale_of(ladder, r[i]);
    if (q < qmin[k]) qmin[k] = q, qarg[k] = r[i];
    B = std::min(B, q);
  }
  std::vector<std::size_t> used;
  for (std::size_t k = 0; k < ladder.size(); ++k)
    if (std::isfinite(qmin[k])) {
      used.push_back(k);
      out.scale_ratio.push_back(qmin[k]);
    }
  if (used.size() < 4 || !std::isfinite(B)) return out;  // too few scales for a trend

  const auto& q = out.scale_ratio;
  const std::size_t m = q.size();
  const std::size_t start = std::min(m - 3, m - m / 2 - 1);
  bool down = true, up = true;
  for (std::size_t k = start; k + 1 < m; ++k) {
    if (!(q[k + 1] < 0.999 * q[k])) down = false;
    if (!(q[k + 1] > 1.001 * q[k])) up = false;
  }
  down = down && q[start] >= 1.1 * q[m - 1];
  up = up && q[m - 1] >= 1.1 * q[start];

  if (B <= 0 || down) {
    out.relation = Relation::fails;
    out.witnesses.push_back(qarg[used.back()]);
    return out;
  }
  out.B = B;
  double A = std::numeric_limits<double>::infinity();
  double argA = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    double d = w2[i] - B * w1[i];
    if (d < A) A = d, argA = r[i];
  }
  out.A = A;
  out.witnesses = {argA, qarg[used.back()]};
  out.relation = (mode == CompareMode::strictly_dominates && up) ? Relation::strictly_dominates
                                                                 : Relation::dominates;
  return out;
}

DominationVerdict compare(const Weight& w2, const Weight& w1, CompareMode mode, const FrequencyWindow& win) {
  auto r = radial_grid(win.step(), win.radius(), 100000);
  auto v2 = kernels::tabulate(r.size(), [&](std::size_t i) { return w2(r[i]); });
  auto v1 = kernels::tabulate(r.size(), [&](std::size_t i) { return w1(r[i]); });
  if (mode != CompareMode::equivalent) return compare_samples(r, v2, v1, win.ladder(), mode);
  auto a = compare_samples(r, v2, v1, win.ladder(), CompareMode::dominates);
  auto b = compare_samples(r, v1, v2, win.ladder(), CompareMode::dominates);
  if (a.relation == Relation::fails || b.relation == Relation::fails) {
    auto& bad = a.relation == Relation::fails ? a : b;
    bad.relation = Relation::fails;
    return bad;
  }
  if (a.relation == Relation::inconclusive || b.relation == Relation::inconclusive) {
    a.relation = Relation::inconclusive;
    return a;
  }
  a.relation = Relation::equivalent;
  return a;
}

SlowVariationReport is_slowly_varying(const Weight& w, const std::function<double(double)>& delta,
                                      const FrequencyWindow& win) {
  const double R = win.radius(), h = win.step();
  auto r = radial_grid(h, R, 20000);
  double prev = std::numeric_limits<double>::infinity();
  for (double x : r) {
    if (x < 1) continue;
    double d = delta(x);
    if (!(d > 0)) throw PreconditionError("slow variation: delta must be positive");
    double q = d / x;
    if (q > prev * (1 + 1e-12)) throw PreconditionError("slow variation: delta(xi)/|xi| must decrease");
    prev = q;
  }
  const double reach = R + delta(R);
  auto nfine = static_cast<std::size_t>(std::ceil(reach / h)) + 1;
  auto fine = w.sample(h, nfine - 1);
  std::vector<double> neg(fine.size());
  for (std::size_t i = 0; i < fine.size(); ++i) neg[i] = -fine[i];
  kernels::MaxTree tmax(fine), tmin(neg);
  std::vector<double> lo(r.size()), hi(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    double d = delta(r[i]);
    double a = std::max(0.0, r[i] - d), b = r[i] + d;
    auto ia = static_cast<std::size_t>(std::ceil(a / h - 1e-9));
    auto ib = std::min(fine.size() - 1, static_cast<std::size_t>(std::floor(b / h + 1e-9)));
    ib = std::max(ia, ib);
    hi[i] = std::max({tmax.query(ia, ib), w(a), w(b)});
    lo[i] = std::min({-tmin.query(ia, ib), w(a), w(b)});
  }
  SlowVariationReport rep;
  rep.inner = compare_samples(r, lo, hi, win.ladder(), CompareMode::dominates);
  rep.verdict = rep.inner.relation == Relation::dominates ? Verdict::verified
                : rep.inner.relation == Relation::fails    ? Verdict::refuted
                                                           : Verdict::inconclusive;
  return rep;
}

MTildeReport in_M_tilde(const Weight& w, const std::vector<double>& xi, const std::vector<double>& rho) {
  if (xi.size() != rho.size() || xi.empty()) throw ShapeError("M-tilde: sequences must match");
  for (std::size_t j = 0; j < xi.size(); ++j)
    if (!(rho[j] > 0) || !(xi[j] > 0)) throw PreconditionError("M-tilde: need positive xi_j and rho_j");
  for (std::size_t j = 1; j < xi.size(); ++j)
    if (!(rho[j] / xi[j] < rho[j - 1] / xi[j - 1]))
      throw PreconditionError("M-tilde: rho_j/xi_j must be strictly decreasing");
  MTildeReport rep;
  for (std::size_t j = 0; j < xi.size(); ++j) {
    double m = std::numeric_limits<double>::infinity();
    for (int k = -1000; k <= 1000; ++k) m = std::min(m, w(xi[j] + rho[j] * k / 1000.0));
    double base = w(xi[j]);
    double q = base > 0 ? m / base : (m >= 0 ? 1.0 : 0.0);
    rep.ratio.push_back(q);
    if (q <= 1e-12) rep.witnesses.push_back(j);
  }
  rep.c = *std::min_element(rep.ratio.begin(), rep.ratio.end());
  if (!rep.witnesses.empty()) {
    rep.verdict = Verdict::refuted;
    return rep;
  }
  const auto& q = rep.ratio;
  std::size_t n = q.size();
  if (n >= 3 && q[n - 1] < q[n - 2] && q[n - 2] < q[n - 3] && q[n - 1] < 0.5 * q[n - 3])
    rep.verdict = Verdict::inconclusive;
  else
    rep.verdict = Verdict::verified;
  return rep;
}

namespace {

// Upper hull of (x_i, y_i), x increasing; returns vertex indices.
std::vector<std::size_t> upper_hull(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<std::size_t> h;
  for (std::size_t i = 0; i < x.size(); ++i) {
    while (h.size() >= 2) {
      std::size_t a = h[h.size() - 2], b = h.back();
      double cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
      if (cross >= 0)
        h.pop_back();
      else
        break;
    }
    h.push_back(i);
  }
  return h;
}

std::pair<std::vector<double>, std::vector<double>> monotone_hull(const std::vector<double>& x,
                                                                  const std::vector<double>& y) {
  auto h = upper_hull(x, y);
  std::vector<double> hx, hy;
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t i : h) {
    if (y[i] <= top) {  // past the peak: flat continuation
      hx.push_back(x.back());
      hy.push_back(top);
      break;
    }
    hx.push_back(x[i]);
    hy.push_back(y[i]);
    top = y[i];
  }
  if (hx.size() == 1) {
    hx.push_back(x.back());
    hy.push_back(hy[0]);
  }
  return {hx, hy};
}

}  // namespace

Weight concave_majorant(const Weight& w, const FrequencyWindow& win, bool strict) {
  const double h = win.step();
  const std::size_t n = win.half();
  std::vector<double> x(n + 1);
  for (std::size_t i = 0; i <= n; ++i) x[i] = static_cast<double>(i) * h;
  auto y = w.sample(h, n);
  auto [hx, hy] = monotone_hull(x, y);
  std::string tag = strict ? "strict-majorant(" : "majorant(";
  if (!strict) return Weight::sampled(hx, hy, tag + w.key() + ")", true);
  auto env = Weight::sampled(hx, hy, "env", true);
  for (std::size_t i = 0; i <= n; ++i) y[i] = env(x[i]) * std::sqrt(1 + std::log1p(x[i]));
  auto [sx, sy] = monotone_hull(x, y);
  return Weight::sampled(sx, sy, tag + w.key() + ")", true);
}

}  // namespace convolab
