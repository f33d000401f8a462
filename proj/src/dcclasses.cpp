#include "convolab/dcclasses.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "convolab/kernels.hpp"

namespace convolab {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

DCSequence::DCSequence(std::string key, std::function<double(int)> fn, bool log_convex)
    : key_(std::move(key)), fn_(std::move(fn)), log_convex_(log_convex) {}

DCSequence DCSequence::analytic() {
  return DCSequence("analytic", [](int k) { return static_cast<double>(k); }, true);
}

DCSequence DCSequence::gevrey(double sigma) {
  if (!(sigma >= 1)) throw DomainError("gevrey sequence: sigma must be >= 1");
  std::ostringstream os;
  os << "gevrey:" << sigma;
  return DCSequence(os.str(), [sigma](int k) { return std::pow(static_cast<double>(k), sigma); }, true);
}

DCSequence DCSequence::table(std::vector<double> L, std::string key) {
  if (L.size() < 2) throw DomainError("dc table: need at least L_0 and L_1");
  if (L[0] != 1.0) throw DomainError("dc table: L_0 must equal 1");
  auto t = std::make_shared<std::vector<double>>(std::move(L));
  bool convex = true;
  for (std::size_t k = 2; k < t->size(); ++k) {
    auto g = [&](std::size_t j) { return static_cast<double>(j) * std::log((*t)[j]); };
    if (g(k) - g(k - 1) < g(k - 1) - g(k - 2) - 1e-12) convex = false;
  }
  DCSequence s(std::move(key), [t](int k) { return (*t)[static_cast<std::size_t>(k)]; }, convex);
  s.max_index_ = static_cast<int>(t->size()) - 1;
  return s;
}

DCSequence DCSequence::from_key(const std::string& key) {
  auto colon = key.find(':');
  std::string head = key.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : key.substr(colon + 1);
  if (head == "analytic") return analytic();
  if (head == "gevrey") {
    try {
      return gevrey(std::stod(arg));
    } catch (const std::invalid_argument&) {
      throw ConfigError("dc key: bad gevrey order '" + arg + "'");
    }
  }
  if (head == "table") {
    std::ifstream in(arg);
    if (!in) throw ConfigError("dc key: cannot open '" + arg + "'");
    std::vector<double> L;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      auto comma = line.find(',');
      try {
        L.push_back(std::stod(comma == std::string::npos ? line : line.substr(comma + 1)));
      } catch (const std::exception&) {
        if (!L.empty()) throw ConfigError("dc table: malformed row '" + line + "'");
      }
    }
    return table(std::move(L), key);
  }
  throw ConfigError("unknown dc sequence key '" + key + "'");
}

double DCSequence::operator()(int k) const {
  if (k < 0) throw DomainError("dc sequence: negative index");
  if (k == 0) return 1.0;
  if (k > max_index_) throw RepresentationError("dc sequence: index beyond table");
  return fn_(k);
}

DCValidation validate(const DCSequence& L, int k_check) {
  DCValidation v;
  k_check = std::min(k_check, L.max_index());
  double C = std::numeric_limits<double>::infinity();
  for (int k = 0; k < k_check; ++k) {
    double a = L(k), b = L(k + 1);
    if (b < a) {
      v.reason = "not nondecreasing at k=" + std::to_string(k);
      return v;
    }
    if (b < k + 1) {
      v.reason = "L_k < k at k=" + std::to_string(k + 1);
      return v;
    }
    C = std::min(C, b / a);
  }
  v.ok = true;
  v.C = C;
  return v;
}

namespace {

double term(const DCSequence& L, int k, double logt) {
  return k == 0 ? 0.0 : k * (logt - L.log_at(k));
}

}  // namespace

int q_L_argmax(const DCSequence& L, double t) {
  if (!(t > 0)) throw DomainError("q_L: t must be positive");
  const double logt = std::log(t);
  if (L.log_convex_moments()) {
    // increments term(k) - term(k-1) decrease in k; find the last positive one
    auto inc = [&](int k) { return term(L, k, logt) - term(L, k - 1, logt); };
    if (inc(1) <= 0) return 0;
    long hi = 2;
    while (inc(static_cast<int>(std::min<long>(hi, L.max_index()))) > 0) {
      if (hi >= L.max_index()) throw RepresentationError("q_L: table too short for t");
      hi *= 2;
    }
    hi = std::min<long>(hi, L.max_index());
    long lo = 1;  // inc(lo) > 0, inc(hi) <= 0
    while (hi - lo > 1) {
      long mid = (lo + hi) / 2;
      if (inc(static_cast<int>(mid)) > 0)
        lo = mid;
      else
        hi = mid;
    }
    return static_cast<int>(lo);
  }
  int best = 0;
  double bv = 0;
  for (int k = 1;; ++k) {
    if (k > L.max_index()) throw RepresentationError("q_L: table too short for t");
    if (L(k) >= t) break;
    double v = term(L, k, logt);
    if (v > bv) bv = v, best = k;
  }
  return best;
}

double q_L(const DCSequence& L, double t) {
  int k = q_L_argmax(L, t);
  return term(L, k, std::log(t));
}

DCSeminormResult dc_seminorm(const SmoothFn& f, const DCSequence& L, double r, double K_lo, double K_hi,
                             int alpha_max, int x_points) {
  if (!(r > 0)) throw DomainError("dc seminorm: r must be positive");
  if (!(K_hi >= K_lo)) throw DomainError("dc seminorm: empty compact");
  DCSeminormResult res;
  const auto na = static_cast<std::size_t>(alpha_max) + 1;
  res.per_order.assign(na, kNegInf);
  for (int i = 0; i < x_points; ++i) {
    double x = x_points == 1 ? K_lo : K_lo + (K_hi - K_lo) * i / (x_points - 1);
    Jet j = f(Jet::variable(na - 1, x));
    for (std::size_t a = 0; a < na; ++a) {
      double c = j.coeff(a);
      if (c == 0) continue;
      double v = j.log_abs_derivative(a) + static_cast<double>(a) * (std::log(r) - L.log_at(static_cast<int>(a)));
      res.per_order[a] = std::max(res.per_order[a], v);
    }
  }
  auto it = std::max_element(res.per_order.begin(), res.per_order.end());
  res.log_value = *it;
  auto arg = static_cast<std::size_t>(it - res.per_order.begin());
  std::size_t q3 = 3 * (na - 1) / 4;
  res.growing = na > 4 && arg >= q3 && res.per_order[na - 1] >= res.per_order[q3];
  return res;
}

std::string_view to_string(Trend t) {
  switch (t) {
    case Trend::convergent: return "convergent";
    case Trend::divergent: return "divergent";
    case Trend::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

QuasiAnalyticReport quasianalytic_test(const DCSequence& L, double t_max) {
  if (!(t_max >= 1e3)) throw PreconditionError("quasianalytic test: t_max must be at least 1e3");
  QuasiAnalyticReport rep;
  auto mmax = static_cast<int>(std::floor(std::log2(t_max)));
  double acc = 0;
  std::vector<double> inc;
  for (int m = 1; m <= mmax; ++m) {
    // Simpson in s = log t on [log 2^(m-1), log 2^m]
    const int n = 64;
    double a = (m - 1) * std::log(2.0), b = m * std::log(2.0), h = (b - a) / n;
    double s = 0;
    for (int i = 0; i <= n; ++i) {
      double x = a + i * h;
      double v = q_L(L, std::exp(x)) * std::exp(-x);
      s += v * (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2));
    }
    double piece = s * h / 3;
    acc += piece;
    inc.push_back(piece);
    rep.T.push_back(std::exp2(m));
    rep.partial.push_back(acc);
  }
  for (std::size_t k = 1; k < inc.size(); ++k)
    rep.increment_ratio.push_back(inc[k - 1] > 0 ? inc[k] / inc[k - 1] : std::numeric_limits<double>::quiet_NaN());
  const auto& q = rep.increment_ratio;
  std::size_t n = q.size();
  if (n < 3) return rep;
  std::size_t start = n - std::max<std::size_t>(3, n / 2);
  double mean = 0;
  bool all_small = true, finite = true;
  for (std::size_t k = start; k < n; ++k) {
    if (!std::isfinite(q[k])) finite = false;
    mean += q[k];
    if (q[k] > 0.85) all_small = false;
  }
  mean /= static_cast<double>(n - start);
  if (!finite) return rep;
  if (mean >= 0.9)
    rep.trend = Trend::divergent;
  else if (all_small)
    rep.trend = Trend::convergent;
  return rep;
}

StarCertificate star_condition(const DCSequence& L, const Weight& w, const Weight& wprime, double b,
                               const FrequencyWindow& win, double grid_refine) {
  if (!(b > 0)) throw DomainError("star condition: b must be positive");
  const double R = win.radius();
  const double h = win.step() / grid_refine;
  auto n = static_cast<std::size_t>(std::floor(R / h));
  std::size_t stride = std::max<std::size_t>(1, n / static_cast<std::size_t>(20000 * grid_refine));
  std::vector<double> xi;
  for (std::size_t i = 1; i <= n; i += stride) xi.push_back(static_cast<double>(i) * h);
  auto wv = kernels::tabulate(xi.size(), [&](std::size_t i) { return b * w(xi[i]); });
  auto wp = kernels::tabulate(xi.size(), [&](std::size_t i) { return wprime(xi[i]); });

  StarCertificate cert;
  std::vector<double> ladder;
  for (double a = 1.0 / 16; a <= 1024 * (1 + 1e-12); a *= 1.05) ladder.push_back(a);

  auto last_violation = [&](double a) {
    auto v = kernels::tabulate(xi.size(), [&](std::size_t i) {
      double t = a * wp[i];
      double q = t > 0 ? q_L(L, t) : 0.0;
      return q < wv[i] - 1e-12 * (1 + wv[i]) ? xi[i] : 0.0;
    });
    return *std::max_element(v.begin(), v.end());
  };
  // R(a) is nonincreasing in a since q_L is nondecreasing: bisect the ladder.
  const double limit = R / 4;
  std::size_t lo = 0, hi = ladder.size() - 1;
  double r_hi = last_violation(ladder[hi]);
  cert.a_ladder.push_back(ladder[hi]);
  cert.last_violation.push_back(r_hi);
  if (r_hi > limit) {
    for (std::size_t i = 0; i < xi.size(); ++i) {
      double t = ladder[hi] * wp[i];
      double q = t > 0 ? q_L(L, t) : 0.0;
      if (q < wv[i] && xi[i] > R / 2) cert.witnesses.push_back(xi[i]);
    }
    cert.verdict = r_hi >= 0.9 * R ? Verdict::refuted : Verdict::inconclusive;
    return cert;
  }
  double r_lo = last_violation(ladder[lo]);
  cert.a_ladder.push_back(ladder[lo]);
  cert.last_violation.push_back(r_lo);
  if (r_lo <= limit) {
    hi = lo;
    r_hi = r_lo;
  }
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    double rm = last_violation(ladder[mid]);
    cert.a_ladder.push_back(ladder[mid]);
    cert.last_violation.push_back(rm);
    if (rm <= limit)
      hi = mid, r_hi = rm;
    else
      lo = mid;
  }
  cert.verdict = Verdict::verified;
  cert.a = ladder[hi];
  cert.R = r_hi;
  return cert;
}

}  // namespace convolab
