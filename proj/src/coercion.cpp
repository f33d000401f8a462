#include "convolab/coercion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "convolab/kernels.hpp"

namespace convolab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// tail sums below this fraction of the row mass are treated as zero
constexpr double kZeroFloor = 1e-13;

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Interior rows |xi| <= radius/2 as a window of their own.
struct Interior {
  FrequencyWindow win;
  std::size_t offset = 0;  // full index of interior index 0
  std::size_t size() const { return win.size(); }
};

Interior interior_of(const FrequencyWindow& win) {
  if (win.half() % 2 != 0) throw PreconditionError("coercion: window half-size must be even");
  if (win.half() / 2 < 1024)
    throw PreconditionError("coercion: interior window needs at least 1024 points per side (radius " +
                            num(win.radius()) + ", step " + num(win.step()) + ")");
  return {FrequencyWindow(win.radius() / 2, win.step()), win.half() / 2};
}

// Per dyadic scale of `in`, max of v (NaN for scales without points).
std::vector<double> scale_max(const FrequencyWindow& in, const std::vector<double>& v) {
  const auto& lad = in.ladder();
  std::vector<double> m(lad.size() + 1, kNaN);
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::size_t k = scale_of(lad, in.at(i));
    if (std::isnan(m[k]) || v[i] > m[k]) m[k] = v[i];
  }
  std::vector<double> out;
  for (double x : m)
    if (!std::isnan(x)) out.push_back(x);
  return out;
}

// Over the last `count` transitions of s: every step is at most `max_step`
// (a step into -inf always passes).
bool last_steps_within(const std::vector<double>& s, double max_step, std::size_t count = 3) {
  if (s.size() < count + 1) return false;
  for (std::size_t k = s.size() - count; k < s.size(); ++k) {
    if (s[k] == -kInf) continue;
    if (s[k - 1] == -kInf) return false;
    if (s[k] - s[k - 1] > max_step) return false;
  }
  return true;
}

struct MemberScan {
  std::vector<std::vector<double>> bracket_rows;  // per lambda, interior rows
  std::vector<std::vector<double>> tail;          // per rho: sum over far eta of |a| e^{lambda0 w}
  std::vector<std::vector<double>> far_f;         // per rho: sum over far eta of |a f|
  std::vector<double> mass;                       // sum of |a| e^{lambda0 w}
  std::vector<cplx> apply;                        // A_a f
  bool low_accuracy = false;
};

MemberScan scan_member(const KernelModel& a, const std::vector<cplx>& f, const Interior& I,
                       const std::vector<double>& qw, const std::vector<std::vector<double>>& lam_wt,
                       const std::vector<double>& tail_wt, const std::vector<double>& radii_base,
                       const std::vector<double>& rho_ladder) {
  const auto& win = a.window();
  const std::size_t n = win.size(), ni = I.size(), nl = lam_wt.size(), nr = rho_ladder.size();
  MemberScan s;
  s.bracket_rows.assign(nl, std::vector<double>(ni, 0.0));
  s.tail.assign(nr, std::vector<double>(ni, 0.0));
  s.far_f.assign(nr, std::vector<double>(ni, 0.0));
  s.mass.assign(ni, 0.0);
  s.apply.assign(ni, cplx(0, 0));
  std::vector<char> edge(ni, 0);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < ni; ++i) {
    const std::size_t ii = I.offset + i;
    std::vector<double> br(nl, 0.0), tl(nr, 0.0), ff(nr, 0.0);
    std::vector<double> rad(nr);
    for (std::size_t k = 0; k < nr; ++k) rad[k] = rho_ladder[k] * radii_base[i];
    double mass = 0, fmass = 0;
    cplx acc(0, 0);
    for (std::size_t j = 0; j < n; ++j) {
      cplx aij = a(ii, j);
      double abs_a = std::abs(aij);
      if (abs_a == 0) continue;
      double qa = qw[j] * abs_a;
      for (std::size_t l = 0; l < nl; ++l) br[l] += qa * lam_wt[l][j];
      double t = qa * tail_wt[j];
      double af = qa * std::abs(f[j]);
      mass += t;
      fmass += af;
      acc += qw[j] * aij * f[j];
      double dist = std::abs(static_cast<double>(j) - static_cast<double>(ii)) * win.step();
      for (std::size_t k = 0; k < nr; ++k)
        if (dist > rad[k]) tl[k] += t, ff[k] += af;
    }
    for (std::size_t l = 0; l < nl; ++l) s.bracket_rows[l][i] = br[l];
    for (std::size_t k = 0; k < nr; ++k) s.tail[k][i] = tl[k], s.far_f[k][i] = ff[k];
    s.mass[i] = mass;
    s.apply[i] = acc;
    double e = std::max(std::abs(a(ii, 0) * f[0]), std::abs(a(ii, n - 1) * f[n - 1]));
    if (fmass > 0 && e * win.radius() > 1e-8 * fmass) edge[i] = 1;
  }
  s.low_accuracy = std::any_of(edge.begin(), edge.end(), [](char c) { return c != 0; });
  return s;
}

struct FamilyScan {
  Interior I;
  std::vector<MemberScan> members;
  std::vector<double> w_in, wp_in;  // w and w' on interior rows
};

FamilyScan scan_family(const KernelFamily& G, const GridSpectrum& f, const Weight& w, const Weight& w_prime,
                       double lambda0, const std::vector<double>& lambda_ladder,
                       const std::vector<double>& rho_ladder) {
  if (G.size() == 0) throw PreconditionError("coercion: empty kernel family");
  const auto& win = G.members.front().window();
  for (const auto& m : G.members)
    if (!(m.window() == win)) throw ShapeError("coercion: family members live on different windows");
  if (!(f.window() == win)) throw ShapeError("coercion: spectrum window differs from the kernel window");
  FamilyScan fs{interior_of(win), {}, {}, {}};
  const std::size_t n = win.size();
  auto qw = quad_weights(win);
  auto w_full = kernels::tabulate(n, [&](std::size_t j) { return w(win.at(j)); });
  std::vector<std::vector<double>> lam_wt(lambda_ladder.size(), std::vector<double>(n));
  for (std::size_t l = 0; l < lambda_ladder.size(); ++l)
    for (std::size_t j = 0; j < n; ++j) lam_wt[l][j] = std::exp(lambda_ladder[l] * w_full[j]);
  std::vector<double> tail_wt(n);
  for (std::size_t j = 0; j < n; ++j) tail_wt[j] = std::exp(lambda0 * w_full[j]);
  std::vector<cplx> fv(n);
  for (std::size_t j = 0; j < n; ++j) fv[j] = f.value(j);
  const std::size_t ni = fs.I.size();
  fs.w_in.resize(ni);
  fs.wp_in.resize(ni);
  for (std::size_t i = 0; i < ni; ++i) {
    fs.w_in[i] = w_full[fs.I.offset + i];
    fs.wp_in[i] = w_prime(fs.I.win.at(i));
  }
  for (const auto& m : G.members)
    fs.members.push_back(scan_member(m, fv, fs.I, qw, lam_wt, tail_wt, fs.wp_in, rho_ladder));
  return fs;
}

// log of inf over members of |A_a f| on interior rows
std::vector<double> log_inf_apply(const FamilyScan& fs) {
  std::vector<double> out(fs.I.size(), kInf);
  for (const auto& m : fs.members)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(out[i], std::log(std::abs(m.apply[i])));
  return out;
}

GridSpectrum restrict_to(const GridSpectrum& f, const Interior& I) {
  std::vector<double> la(I.size());
  for (std::size_t i = 0; i < la.size(); ++i) la[i] = f.log_abs(I.offset + i);
  return GridSpectrum::from_log_abs(I.win, std::move(la), f.provenance() + "|interior");
}

void thin_curves(CoercionReport& rep, const FrequencyWindow& in, const std::vector<double>& log_inf,
                 const GridSpectrum& f_in) {
  const std::size_t n = in.size();
  const std::size_t stride = std::max<std::size_t>(1, n / 1024);
  for (std::size_t i = 0; i < n; i += stride) {
    rep.curve_xi.push_back(in.at(i));
    rep.curve_log_inf.push_back(log_inf[i]);
    rep.curve_log_f.push_back(f_in.log_abs(i));
  }
}

// Kernel-family verdicts on a finished scan; fills every step and the conclusion.
void assemble(CoercionReport& rep, const FamilyScan& fs, const GridSpectrum& f, const Weight& w,
              const Weight& w_prime, const std::vector<double>& lambda_ladder, const std::vector<double>& rho_ladder,
              const std::vector<double>& A_ladder) {
  const auto& in = fs.I.win;
  const std::size_t ni = fs.I.size();
  for (const auto& m : fs.members) rep.low_accuracy = rep.low_accuracy || m.low_accuracy;

  // STEP 1: for each lambda, some Lambda keeps e^{-Lambda w} [row] from growing across scales.
  static const double kLambdaOffsets[] = {-2, -1, 0, 1, 2, 3, 4, 6, 8};
  rep.family_bounded = Verdict::verified;
  for (std::size_t l = 0; l < lambda_ladder.size(); ++l) {
    BoundednessRow row{lambda_ladder[l], std::nullopt, 0};
    for (double off : kLambdaOffsets) {
      double Lam = lambda_ladder[l] + off;
      bool ok = true;
      double sup = 0;
      for (const auto& m : fs.members) {
        std::vector<double> v(ni);
        for (std::size_t i = 0; i < ni; ++i) {
          v[i] = std::log(m.bracket_rows[l][i]) - Lam * fs.w_in[i];
          sup = std::max(sup, std::exp(v[i]));
        }
        if (!last_steps_within(scale_max(in, v), std::log(1.1))) ok = false;
      }
      row.sup_bracket = sup;
      if (ok) {
        row.Lambda = Lam;
        break;
      }
    }
    if (!row.Lambda) rep.family_bounded = Verdict::inconclusive;
    rep.bounded_rows.push_back(row);
  }

  // STEP 2: inf over the family of |A_a f| is w-slowly decreasing.
  auto log_inf = log_inf_apply(fs);
  auto inf_spec = GridSpectrum::from_log_abs(in, log_inf, "inf|A f|");
  auto sd_inf = slow_decrease_check(inf_spec, w, A_ladder);
  rep.inf_slow_decrease = sd_inf.verdict;
  rep.A_star_inf = sd_inf.A_star;

  // STEP 3: tail integral is o(e^{-lambda w}) for some rho per lambda.
  rep.tail_estimate = Verdict::verified;
  std::size_t rho_main = rho_ladder.size() - 1;
  std::size_t rho_used = 0;
  for (double lam : lambda_ladder) {
    TailRow row{lam, std::nullopt, {}};
    for (std::size_t k = 0; k < rho_ladder.size(); ++k) {
      std::vector<double> v(ni);
      for (std::size_t i = 0; i < ni; ++i) {
        double T = kInf, M = 0;
        for (const auto& m : fs.members)
          if (m.tail[k][i] < T) T = m.tail[k][i], M = m.mass[i];
        v[i] = (T <= kZeroFloor * M) ? -kInf : std::log(T) + lam * fs.w_in[i];
      }
      row.scale_max = scale_max(in, v);
      if (last_steps_within(row.scale_max, -std::log(2.0))) {
        row.rho = rho_ladder[k];
        rho_used = std::max(rho_used, k);
        break;
      }
    }
    if (!row.rho) rep.tail_estimate = Verdict::refuted;
    rep.tail_rows.push_back(std::move(row));
  }
  if (rep.tail_estimate == Verdict::verified) rho_main = rho_used;

  // Main estimate: inf|A f| <= C e^{C w} (sup_ball |f| + far part), smallest C.
  const double rho = rho_ladder[rho_main];
  const auto& win = f.window();
  std::vector<double> R(ni);
  for (std::size_t i = 0; i < ni; ++i) {
    const std::size_t ii = fs.I.offset + i;
    double rad = rho * fs.wp_in[i];
    auto span = static_cast<std::size_t>(std::floor(rad / win.step()));
    std::size_t lo = ii > span ? ii - span : 0, hi = std::min(win.size() - 1, ii + span);
    double ball = 0;
    for (std::size_t j = lo; j <= hi; ++j) ball = std::max(ball, std::abs(f.value(j)));
    double far = kInf;
    for (const auto& m : fs.members) far = std::min(far, m.far_f[rho_main][i]);
    R[i] = log_inf[i] - std::log(ball + far);
  }
  auto slack = [&](double C) {
    double s = kInf;
    for (std::size_t i = 0; i < ni; ++i)
      if (std::isfinite(R[i])) s = std::min(s, std::log(C) + C * fs.w_in[i] - R[i]);
    return s;
  };
  double lo = 1e-9, hi = 1e9;
  if (slack(lo) >= 0) {
    rep.C_main = lo;
  } else if (slack(hi) < 0) {
    rep.C_main = kInf;
    rep.notes.push_back("main estimate: no C up to 1e9");
  } else {
    for (int it = 0; it < 200 && hi / lo > 1 + 1e-10; ++it) {
      double mid = std::sqrt(lo * hi);
      (slack(mid) >= 0 ? hi : lo) = mid;
    }
    rep.C_main = hi;
  }

  // Conclusion: w'-slow decrease of f, only when every step passed.
  auto f_in = restrict_to(f, fs.I);
  auto sd_f = slow_decrease_check(f_in, w_prime, A_ladder);
  rep.A_star_f = sd_f.A_star;
  bool steps_ok = rep.family_bounded == Verdict::verified && rep.inf_slow_decrease == Verdict::verified &&
                  rep.tail_estimate == Verdict::verified;
  if (steps_ok) {
    rep.conclusion = sd_f.verdict;
  } else {
    rep.conclusion = Verdict::inconclusive;
    rep.notes.push_back("conclusion withheld: a step did not pass (measured f verdict " +
                        std::string(to_string(sd_f.verdict)) + ")");
  }
  thin_curves(rep, in, log_inf, f_in);
}

}  // namespace

KernelFamily KernelFamily::single(KernelModel a, std::string label) {
  KernelFamily G;
  G.members.push_back(std::move(a));
  G.labels.push_back(std::move(label));
  return G;
}

KernelFamily KernelFamily::units(const UnitSequence& seq, const SymbolModel& p, const FrequencyWindow& win) {
  KernelFamily G;
  for (std::size_t N = 0; N < seq.members.size(); ++N) {
    G.members.push_back(kernel_of(seq.members[N], p, win));
    G.labels.push_back("chi_" + std::to_string(N));
  }
  return G;
}

CoercionReport lemma2_scan(const KernelFamily& G, const GridSpectrum& f, const Weight& w, const Weight& w_prime,
                           double lambda0, const std::vector<double>& lambda_ladder,
                           const std::vector<double>& rho_ladder, const std::vector<double>& A_ladder) {
  if (lambda_ladder.empty() || rho_ladder.empty()) throw PreconditionError("lemma2: empty ladder");
  if (!std::is_sorted(rho_ladder.begin(), rho_ladder.end())) throw PreconditionError("lemma2: rho ladder must increase");
  CoercionReport rep;
  rep.kind = "lemma2";
  rep.w_key = w.key();
  rep.w_prime_key = w_prime.key();
  rep.u_tag = f.provenance();
  rep.lambda0 = lambda0;
  auto fs = scan_family(G, f, w, w_prime, lambda0, lambda_ladder, rho_ladder);
  assemble(rep, fs, f, w, w_prime, lambda_ladder, rho_ladder, A_ladder);
  return rep;
}

namespace {

// STEP 3 exponent: smallest m + d with int e^{-d w} finite.
double step3_lambda0(const Weight& w, double m) {
  for (double d : {1.5, 2.0, 3.0, 4.0, 6.0})
    if (std::isfinite(weight_exp_integral(w, d))) return m + d;
  throw PreconditionError("coercion: int e^{-d w} diverges for every d up to 6");
}

void check_plateau(const BumpModel& psi, double lo, double hi, const char* what) {
  if (!psi.plateau) throw PreconditionError(std::string("coercion: psi has no known plateau; needs psi = 1 on ") + what);
  if (psi.plateau->first > lo || psi.plateau->second < hi)
    throw PreconditionError("coercion: psi plateau [" + num(psi.plateau->first) + ", " + num(psi.plateau->second) +
                            "] does not cover " + what + " [" + num(lo) + ", " + num(hi) + "]");
}

double bracket_value(const MemberScan& m, std::size_t l, double Lambda, const std::vector<double>& w_in) {
  double best = 0;
  for (std::size_t i = 0; i < w_in.size(); ++i) best = std::max(best, m.bracket_rows[l][i] * std::exp(-Lambda * w_in[i]));
  return best;
}

}  // namespace

CoercionReport coercion_experiment(const CoercionKind& kind, const SymbolModel& p, const BumpModel& psi,
                                   const PhysicalModel& u, const Weight& w, const Weight& w_prime,
                                   const FrequencyWindow& win, const CoercionOptions& opt) {
  const double lam3 = step3_lambda0(w, opt.m);
  auto u_hat = fourier_of(u, win);
  auto a_psi = kernel_of(psi, p, win);
  const bool star = std::holds_alternative<StarKind>(kind);

  // hypothesis: v^ = A_psi u^ is w-slowly decreasing
  auto single = KernelFamily::single(a_psi, "psi");
  auto fs_psi = scan_family(single, u_hat, w, w_prime, -lam3, opt.lambda_ladder, opt.rho_ladder);
  auto log_v = log_inf_apply(fs_psi);
  auto v_in = GridSpectrum::from_log_abs(fs_psi.I.win, log_v, "A_psi u^");
  auto sd_v = slow_decrease_check(v_in, w, opt.A_ladder);
  if (sd_v.verdict == Verdict::refuted)
    throw PreconditionError("coercion: p(x,D)u is not w-slowly decreasing on the window (no A on the ladder)");

  CoercionReport rep;
  std::vector<std::string> notes;
  rep.A_star_v = sd_v.A_star;
  if (sd_v.verdict == Verdict::inconclusive) notes.push_back("hypothesis on p(x,D)u inconclusive on the window");

  if (star) {
    const auto& sk = std::get<StarKind>(kind);
    std::vector<double> theory;
    for (double lam : opt.lambda_ladder) {
      double b = lam + lam3 - opt.m + 1;
      auto cert = star_condition(sk.L, w, w_prime, b, win);
      if (cert.verdict != Verdict::verified)
        throw PreconditionError("star condition fails for " + sk.L.key() + " at b = " + num(b) + " (verdict " +
                                std::string(to_string(cert.verdict)) + ")");
      theory.push_back(cert.a / sk.r);
    }
    check_plateau(psi, opt.Phi.lo + opt.phi.lo, opt.Phi.hi + opt.phi.hi, "the unit supports");
    auto seq = ehrenpreis_units(opt.Phi, opt.phi, opt.N_max, win);
    auto G = KernelFamily::units(seq, p, win);
    auto fs = scan_family(G, u_hat, w, w_prime, -lam3, opt.lambda_ladder, opt.rho_ladder);
    rep = CoercionReport{};
    rep.kind = "star";
    rep.theory_rho = theory;
    rep.lambda0 = -lam3;
    assemble(rep, fs, u_hat, w, w_prime, opt.lambda_ladder, opt.rho_ladder, opt.A_ladder);

    // STEP 1 bound: [a_N]_{lambda, lambda+m} <= (2 pi)^{-1} ||Phi||_{lambda+m} [a_psi]_{lambda, lambda+m}
    double worst = 0;
    auto Phi_hat = opt.Phi.spectrum(win);
    for (std::size_t l = 0; l < opt.lambda_ladder.size(); ++l) {
      double Lam = opt.lambda_ladder[l] + opt.m;
      double rhs = w_norm(Phi_hat, Lam, w).value / (2 * M_PI) * bracket_value(fs_psi.members[0], l, Lam, fs_psi.w_in);
      for (const auto& m : fs.members) worst = std::max(worst, bracket_value(m, l, Lam, fs.w_in) / rhs);
    }
    rep.step1_max_ratio = worst;
    if (worst > 1 + 1e-3) {
      rep.family_bounded = Verdict::refuted;
      rep.conclusion = Verdict::inconclusive;
      rep.notes.push_back("unit brackets exceed the Phi bound (ratio " + num(worst) + ")");
    }

    // how far inf_N |A_N u^| sits below |v^|, weighted by e^{w}
    std::vector<double> dev(fs.I.size());
    auto log_inf = log_inf_apply(fs);
    for (std::size_t i = 0; i < dev.size(); ++i) {
      double d = std::exp(log_v[i]) - std::exp(log_inf[i]);
      dev[i] = d > 0 ? std::log(d) + fs.w_in[i] : -kInf;
    }
    auto sm = scale_max(fs.I.win, dev);
    rep.residual_decay = sm.empty() ? -kInf : sm.back();
    rep.assumptions.push_back("psi = 1 near the w-singular support of p(x,D)u (taken from the configuration)");
  } else {
    const auto& dk = std::get<DoubleStarKind>(kind);
    const auto& gamma = dk.gamma;
    double prev = gamma(0.0);
    for (int k = 1; k <= 4096; ++k) {
      double t = win.radius() * 4 * k / 4096.0, g = gamma(t);
      if (g < prev - 1e-12 * std::abs(prev)) throw PreconditionError("double-star condition: Gamma must be nondecreasing");
      prev = g;
    }
    auto composed = w_prime.compose_after([gamma](double t) { return gamma(t); }, gamma.key());
    auto dom = compare(composed, w, CompareMode::dominates, win);
    if (dom.relation != Relation::dominates && dom.relation != Relation::strictly_dominates &&
        dom.relation != Relation::equivalent)
      throw PreconditionError("double-star condition fails: " + gamma.key() + " o " + w_prime.key() + " does not dominate " +
                              w.key() + " (" + std::string(to_string(dom.relation)) + ")");
    rep = CoercionReport{};
    rep.kind = "double_star";
    rep.gamma_domination_B = dom.B;
    rep.lambda0 = -lam3;
    assemble(rep, fs_psi, u_hat, w, w_prime, opt.lambda_ladder, opt.rho_ladder, opt.A_ladder);
    rep.assumptions.push_back("p(., xi) in the Beurling class of " + gamma.key() + " (taken from the configuration)");
    rep.assumptions.push_back("psi = 1 near the w-singular support of p(x,D)u (taken from the configuration)");
  }
  rep.A_star_v = sd_v.A_star;
  rep.notes.insert(rep.notes.begin(), notes.begin(), notes.end());
  rep.w_key = w.key();
  rep.w_prime_key = w_prime.key();
  rep.p_key = p.key;
  rep.psi_tag = psi.tag;
  rep.u_tag = u.tag;
  return rep;
}

GevreyRelation gevrey_relation(double a, double r, double s) {
  if (!(a > 0 && a <= 1) || !(r > 0 && r < 1) || !(s > 0 && s < 1))
    throw DomainError("gevrey map: need 0 < a <= 1 and 0 < r, s < 1");
  // a s >= r and a < r/s are complementary for s > 0; a s = r up to rounding
  // is put on the coercive side.
  const double delta = a * s - r;
  const bool boundary = std::abs(delta) <= 1e-12 * std::max(1.0, r);
  GevreyRelation g;
  g.coercive_claim = delta >= 0 || boundary;
  g.counterexample_exists = !boundary && a < r / s;
  g.gap = !g.coercive_claim && !g.counterexample_exists;
  if (boundary) g.note = "boundary a s = r: coercive side";
  else if (g.gap) g.note = "neither statement applies";
  return g;
}

}  // namespace convolab
