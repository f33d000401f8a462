#include "convolab/scenarios.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "convolab/functions.hpp"

namespace convolab {

namespace {

using report::Json;

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& s, const std::string& key) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' is not a number: '" + s + "'");
  }
  if (pos != s.size()) throw ConfigError("config: '" + key + "' is not a number: '" + s + "'");
  return v;
}

}  // namespace

ScenarioConfig ScenarioConfig::parse(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ScenarioConfig c;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError("config: key '" + section + "' outside a section");
    for (const auto& [key, val] : body) c.set(section + "." + key + "=" + val.data());
  }
  if (c.name.empty()) throw ConfigError("config: [scenario] name is missing");
  return c;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

void ScenarioConfig::set(const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("config: expected section.key=value, got '" + assignment + "'");
  std::string key = trim(assignment.substr(0, eq)), val = trim(assignment.substr(eq + 1));
  if (key.find('.') == std::string::npos) throw ConfigError("config: key '" + key + "' needs a section");
  if (key == "scenario.name") {
    name = val;
  } else if (key == "scenario.output") {
    output_dir = val;
  } else if (key == "scenario.seed") {
    double s = parse_double(val, key);
    if (s < 0 || s != std::floor(s)) throw ConfigError("config: seed must be a nonnegative integer");
    seed = static_cast<std::uint64_t>(s);
  } else if (key.rfind("scenario.", 0) == 0) {
    throw ConfigError("config: unknown key '" + key + "'");
  } else {
    params[key] = val;
  }
}

std::string ScenarioConfig::get(const std::string& key, const std::string& fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

double ScenarioConfig::get_double(const std::string& key, double fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : parse_double(it->second, key);
}

int ScenarioConfig::get_int(const std::string& key, int fallback) const {
  double v = get_double(key, fallback);
  if (v != std::floor(v)) throw ConfigError("config: '" + key + "' must be an integer");
  return static_cast<int>(v);
}

std::vector<double> ScenarioConfig::get_list(const std::string& key, const std::vector<double>& fallback) const {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  std::vector<double> out;
  for (const auto& s : split_list(it->second)) out.push_back(parse_double(s, key));
  return out;
}

std::vector<std::string> ScenarioConfig::get_strings(const std::string& key,
                                                     const std::vector<std::string>& fallback) const {
  auto it = params.find(key);
  return it == params.end() ? fallback : split_list(it->second);
}

int exit_code_for(const std::vector<CheckOutcome>& checks) {
  bool inconclusive = false;
  for (const auto& c : checks) {
    if (c.actual == Verdict::inconclusive) {
      inconclusive = true;
      continue;
    }
    if (c.actual != c.expected) return exit_mismatch;
  }
  return inconclusive ? exit_inconclusive : exit_ok;
}

namespace {

// Everything one scenario produces.
struct Run {
  explicit Run(const ScenarioConfig& c) : cfg(c) {}
  const ScenarioConfig& cfg;
  Json result = Json::object();
  std::vector<CheckOutcome> checks;
  std::vector<std::string> anchors;
  std::vector<std::pair<std::string, report::CsvTable>> curves;
  std::optional<double> min_margin;
  // keys actually read, echoed into the report
  mutable std::map<std::string, std::string> used;

  void check(std::string name, Verdict actual, Verdict expected = Verdict::verified) {
    checks.push_back({std::move(name), expected, actual});
  }
  void margin(double m) {
    if (std::isfinite(m)) min_margin = min_margin ? std::min(*min_margin, m) : m;
  }
  void anchor(std::string a) {
    if (std::find(anchors.begin(), anchors.end(), a) == anchors.end()) anchors.push_back(std::move(a));
  }
  std::string str(const std::string& key, const std::string& fallback) const {
    auto v = cfg.get(key, fallback);
    used[key] = v;
    return v;
  }
  double dbl(const std::string& key, double fallback) const {
    double v = cfg.get_double(key, fallback);
    used[key] = report::csv_number(v);
    return v;
  }
  int integer(const std::string& key, int fallback) const {
    int v = cfg.get_int(key, fallback);
    used[key] = std::to_string(v);
    return v;
  }
  std::vector<double> list(const std::string& key, const std::vector<double>& fallback) const {
    auto v = cfg.get_list(key, fallback);
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + report::csv_number(v[i]);
    used[key] = s;
    return v;
  }
  std::vector<std::string> strings(const std::string& key, const std::vector<std::string>& fallback) const {
    auto v = cfg.get_strings(key, fallback);
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    used[key] = s;
    return v;
  }
  Verdict expect(const std::string& key, Verdict fallback) const {
    auto s = str(key, std::string(to_string(fallback)));
    try {
      return verdict_from_string(s);
    } catch (const std::exception&) {
      throw ConfigError("config: '" + key + "' must be verified, refuted or inconclusive");
    }
  }
  FrequencyWindow window(double radius, double step) const {
    double R = dbl("window.radius", radius), h = dbl("window.step", step);
    try {
      return FrequencyWindow(R, h);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
};

// thinned copy of a curve for CSV output
std::vector<std::size_t> thin_indices(std::size_t n, std::size_t target = 4096) {
  std::vector<std::size_t> idx;
  std::size_t stride = std::max<std::size_t>(1, n / target);
  for (std::size_t i = 0; i < n; i += stride) idx.push_back(i);
  return idx;
}

}  // namespace

namespace {

Verdict from_bool(bool ok) { return ok ? Verdict::verified : Verdict::refuted; }

std::string verdict_str(Verdict v) { return std::string(to_string(v)); }

// ---- weights-check ----
void weights_check(Run& r) {
  auto win = r.window(1e4, 1e4 / 4096);
  Json rows = Json::array();
  auto delta = [](double xi) { return std::abs(xi) / std::log(2 + std::abs(xi)); };
  for (const auto& key : r.strings("weights.keys", {"log", "gevrey:0.5", "affine-log:2"})) {
    auto w = Weight::from_key(key);
    auto m = check_membership(w, win);
    auto refl = compare(w, w, CompareMode::dominates, win);
    Json j{{"key", key}, {"membership", report::to_json(m)}, {"reflexive", report::to_json(refl)}};
    r.check("membership:" + key, from_bool(m.passed()));
    r.check("reflexive:" + key, from_bool(refl.relation == Relation::dominates || refl.relation == Relation::equivalent));
    if (w.monotone()) {
      auto sv = is_slowly_varying(w, delta, win);
      j["slow_variation"] = report::to_json(sv);
      r.check("slow-variation:" + key, sv.verdict);
    }
    rows.push_back(j);
  }
  r.result["weights"] = rows;
  r.anchor("weight-class");
  r.anchor("weight-domination");
  r.anchor("slow-variation");
}

// ---- slowdec-scan ----
GridSpectrum spectrum_from_key(const std::string& key, const FrequencyWindow& win) {
  auto parts = split_list(key, ':');
  if (key == "one") return GridSpectrum(win, std::vector<cplx>(win.size(), cplx(1, 0)), "one");
  if (!parts.empty() && parts[0] == "stretched-exp" && (parts.size() == 2 || parts.size() == 3)) {
    double beta = parse_double(parts[1], key), c = parts.size() == 3 ? parse_double(parts[2], key) : 1.0;
    if (!(beta > 0) || !(c > 0)) throw ConfigError("spectrum: stretched-exp needs beta, c > 0");
    std::vector<double> la(win.size());
    for (std::size_t i = 0; i < la.size(); ++i) la[i] = -c * std::pow(std::abs(win.at(i)), beta);
    return GridSpectrum::from_log_abs(win, std::move(la), key);
  }
  if (key.rfind("physical:", 0) == 0) return fourier_of(PhysicalModel::from_key(key.substr(9)), win);
  throw ConfigError("unknown spectrum key '" + key + "'");
}

void slowdec_scan(Run& r) {
  auto win = r.window(1024, 1.0 / 32);
  auto key = r.str("slowdec.spectrum", "one");
  auto w = Weight::from_key(r.str("slowdec.weight", "log"));
  auto A = r.list("slowdec.A_ladder", {0.5, 1, 2, 4, 8});
  auto expected = r.expect("slowdec.expect", Verdict::verified);
  auto u = spectrum_from_key(key, win);
  auto rep = slow_decrease_check(u, w, A);
  Json j = report::to_json(rep);
  // per-scale minima at the largest A. Small scales always pass easily, so
  // worsening is read from the peak on: nonincreasing and negative at the end.
  const auto& last = rep.scale_min_margin.back();
  std::vector<double> trend;
  for (double m : last)
    if (!std::isnan(m)) trend.push_back(m);
  auto peak = std::max_element(trend.begin(), trend.end());
  bool worsening = trend.size() >= 2 && trend.back() < 0 && peak + 1 < trend.end();
  for (auto it = peak; worsening && it + 1 < trend.end(); ++it) worsening = it[1] <= it[0];
  j["scale_trend"] = report::nums(trend);
  j["monotone_worsening"] = worsening;
  r.result["slow_decrease"] = j;
  r.check("slow-decrease", rep.verdict, expected);
  if (expected == Verdict::refuted) r.check("monotone-worsening", from_bool(worsening));
  double best = -std::numeric_limits<double>::infinity();
  for (double m : rep.min_margin) best = std::max(best, m);
  r.margin(best);
  auto idx = thin_indices(win.size());
  std::vector<double> xi, mg;
  for (auto i : idx) xi.push_back(win.at(i)), mg.push_back(rep.margin_curve[i]);
  r.curves.emplace_back("margin.csv", report::columns_table({"xi", "margin"}, {xi, mg}));
  r.anchor("slow-decrease");
  r.anchor("invertibility-criterion");
}

// ---- units-bounds ----
void units_bounds(Run& r) {
  auto win = r.window(4096, 0.5);
  auto Phi = BumpModel::from_key(r.str("units.Phi", "box-unit:1:1"));
  auto phi = BumpModel::from_key(r.str("units.phi", "triangle:0.25"));
  int N_max = r.integer("units.N_max", 6);
  int alpha_max = r.integer("units.alpha_max", 3);
  auto lambdas = r.list("units.lambdas", {0.5, 1, 2});
  auto weights = r.strings("units.weights", {"log", "gevrey:0.3"});
  auto seq = ehrenpreis_units(Phi, phi, N_max, win);
  Json norms = Json::array();
  for (const auto& wk : weights) {
    auto w = Weight::from_key(wk);
    for (double lam : lambdas) {
      auto nb = unit_norm_bound(seq, lam, w, win);
      norms.push_back({{"weight", wk}, {"lambda", report::num(lam)}, {"report", report::to_json(nb)}});
      r.check("norm:" + wk + ":" + report::csv_number(lam), nb.verdict);
      for (double v : nb.member_norm) r.margin(1 - v / nb.phi_norm);
    }
  }
  auto db = unit_derivative_bounds(seq, alpha_max, win);
  r.result["core"] = report::nums({seq.core.first, seq.core.second});
  r.result["core_deviation"] = report::num(seq.core_deviation);
  r.result["norms"] = norms;
  r.result["derivatives"] = report::to_json(db);
  r.check("derivative-bounds", db.verdict);
  report::CsvTable t;
  t.header = {"alpha", "N", "sup", "bound"};
  for (const auto& row : db.rows)
    t.add_row({std::to_string(row.alpha), std::to_string(row.N), report::csv_number(row.sup),
               report::csv_number(row.bound)});
  r.curves.emplace_back("derivatives.csv", t);
  r.anchor("unit-sequence");
  r.anchor("unit-norm-bound");
  r.anchor("unit-derivative-bound");
}

// ---- lemma1 ----
void lemma1(Run& r) {
  auto win = r.window(128, 1.0 / 8);
  auto psi = BumpModel::from_key(r.str("lemma1.psi", "box-product:8"));
  auto psi1 = BumpModel::from_key(r.str("lemma1.psi1", "box-unit:6:4"));
  auto w = Weight::from_key(r.str("lemma1.weight", "log"));
  auto lambdas = r.list("lemma1.lambdas", {0, 1});
  // "key@m" entries separated by ';' since polynomial keys contain commas
  auto cases = split_list(r.str("lemma1.symbols", "sep:one:one@0;sep:exp:bracket:1@1;sep:cos:japanese:1@1"), ';');
  Json rows = Json::array();
  for (const auto& c : cases) {
    auto at = c.rfind('@');
    if (at == std::string::npos) throw ConfigError("lemma1: symbol entry '" + c + "' needs @order");
    auto key = c.substr(0, at);
    double m = parse_double(c.substr(at + 1), "lemma1.symbols");
    auto p = SymbolModel::from_key(key);
    for (double lam : lambdas) {
      auto rep = lemma1_check(p, psi, psi1, m, lam, m + lam, w, win);
      rows.push_back({{"symbol", key}, {"m", report::num(m)}, {"lambda", report::num(lam)},
                      {"report", report::to_json(rep)}});
      r.check("lemma1:" + key + ":" + report::csv_number(lam), rep.verdict);
      if (rep.rhs1 > 0) r.margin(rep.margin1 / rep.rhs1);
      if (rep.rhs2 > 0) r.margin(rep.margin2 / rep.rhs2);
    }
  }
  r.result["cases"] = rows;
  r.anchor("kernel-bracket-bound");
  r.anchor("cutoff-product-bound");
}

// ---- prop1-sum ----
void prop1_sum(Run& r) {
  auto win = r.window(128, 1.0 / 8);
  int J = r.integer("prop1.J", 8);
  int alpha_max = r.integer("prop1.alpha_max", 3);
  auto chi = smooth_from_key(r.str("prop1.chi", "cutoff"));
  double K_lo = r.dbl("prop1.K_lo", 0), K_hi = r.dbl("prop1.K_hi", 1), R = r.dbl("prop1.R", 1);
  std::vector<SymbolModel> ps;
  for (int j = 0; j <= J; ++j) ps.push_back(SymbolModel::from_key("sep:one:bracket:" + std::to_string(-j)));
  auto s1 = asymptotic_sum(ps, chi, alpha_max, K_lo, K_hi, R, win);
  auto s2 = asymptotic_sum(ps, chi, alpha_max, K_lo, K_hi, R, win, 2);
  r.result["sum"] = report::to_json(s1);
  r.result["refined"] = report::to_json(s2);
  r.check("certificate", s1.verdict);
  r.check("certificate:refined-grid", s2.verdict);
  report::CsvTable t;
  t.header = {"j", "m_j", "eps"};
  for (const auto& term : s1.terms)
    t.add_row({std::to_string(term.j), report::csv_number(term.m_j), report::csv_number(term.eps)});
  r.curves.emplace_back("terms.csv", t);
  r.anchor("asymptotic-sum");
}

// ---- sandwich ----
std::shared_ptr<const EvenProfile> profile_from_key(const std::string& key) {
  if (key == "gaussian") return std::make_shared<StretchedExpProfile>(2.0, 0.5);
  if (key == "laplace") return std::make_shared<StretchedExpProfile>(1.0, 1.0);
  auto parts = split_list(key, ':');
  if (parts.size() == 3 && parts[0] == "stretched-exp")
    return std::make_shared<StretchedExpProfile>(parse_double(parts[1], key), parse_double(parts[2], key));
  throw ConfigError("unknown profile key '" + key + "'");
}

// J intervals spread over (0, 0.9 radius), half-widths growing like sqrt(xi)
IntervalFamily spread_family(int J, double radius) {
  if (J < 1) throw ConfigError("sandwich: J must be positive");
  std::vector<double> xi, d;
  for (int j = 1; j <= J; ++j) {
    double x = 0.9 * radius * std::pow(static_cast<double>(j) / J, 1.3);
    xi.push_back(x);
    d.push_back(1 + 0.5 * std::sqrt(x));
  }
  return IntervalFamily::make(xi, d);
}

void sandwich(Run& r) {
  auto win = r.window(1000, 1.0 / 16);
  auto profiles = r.strings("sandwich.profiles", {"gaussian", "laplace"});
  auto Js = r.list("sandwich.J", {2, 5, 8});
  double tol = r.dbl("sandwich.tol", 1e-8);
  Json rows = Json::array();
  for (const auto& pk : profiles) {
    auto nu = profile_from_key(pk);
    for (double Jd : Js) {
      int J = static_cast<int>(Jd);
      auto fam = spread_family(J, win.radius());
      fam.check_inside(win);
      auto rep = sandwich_check(*nu, fam, win, tol);
      rows.push_back({{"profile", pk}, {"J", J}, {"xi", report::nums(fam.xi)}, {"d", report::nums(fam.d)},
                      {"report", report::to_json(rep)}});
      r.check("sandwich:" + pk + ":J" + std::to_string(J), rep.verdict);
      for (const auto* side : {&rep.intervals, &rep.complement}) {
        r.margin(side->min_lower_margin / rep.total);
        r.margin(side->min_upper_margin / rep.total);
      }
    }
  }
  r.result["cases"] = rows;
  r.anchor("sandwich-bound");
}

// ---- counterexamples ----
std::vector<double> centers(Run& r, const FrequencyWindow& win) {
  // 100 * 4^j up to 1e5, kept clear of the window edge
  return r.list("cx.centers", default_centers(std::min(1e5, 0.8 * win.radius())));
}

void counterexample_common(Run& r, const CounterexampleReport& rep) {
  r.result["counterexample"] = report::to_json(rep);
  r.check("counterexample", rep.verdict);
  r.check("u-slow-decrease", rep.w_s, Verdict::refuted);
  r.check("fu-slow-decrease", rep.w_r);
  for (double m : rep.eq1_margins) r.margin(m);
  r.margin(rep.eq2_margin_min);
  r.curves.emplace_back("curves.csv", report::columns_table({"xi", "log_u", "log_fu", "r"},
                                                            {rep.curve_xi, rep.curve_log_u, rep.curve_log_fu,
                                                             rep.curve_r}));
  r.anchor("interval-family");
  r.anchor("sandwich-bound");
  r.anchor("pseudo-measure-bounds");
  r.anchor("slow-decrease");
}

void counterexample_gevrey(Run& r) {
  auto win = r.window(32768, 1.0 / 64);
  double a = r.dbl("cx.a", 0.6), rr = r.dbl("cx.r", 0.5), s = r.dbl("cx.s", 0.7);
  auto rep = gevrey_counterexample(a, rr, s, centers(r, win), win);
  counterexample_common(r, rep);
  r.anchor("gevrey-counterexample");
}

void counterexample_general(Run& r) {
  auto win = r.window(32768, 1.0 / 64);
  auto w = Weight::from_key(r.str("cx.w", "log"));
  auto phi = Weight::from_key(r.str("cx.phi", "gevrey:0.3"));
  auto rep = general_counterexample(w, phi, centers(r, win), win);
  counterexample_common(r, rep);
  r.anchor("general-counterexample");
}

// ---- coercion ----
CoercionOptions coercion_options(Run& r) {
  CoercionOptions o;
  o.m = r.dbl("co.m", o.m);
  o.N_max = r.integer("co.N_max", o.N_max);
  o.lambda_ladder = r.list("co.lambda_ladder", o.lambda_ladder);
  o.rho_ladder = r.list("co.rho_ladder", o.rho_ladder);
  o.A_ladder = r.list("co.A_ladder", o.A_ladder);
  o.Phi = BumpModel::from_key(r.str("co.Phi", "box-unit:2:1"));
  o.phi = BumpModel::from_key(r.str("co.phi", "triangle:0.5"));
  return o;
}

void coercion_common(Run& r, const CoercionReport& rep, Verdict expected) {
  r.result["coercion"] = report::to_json(rep);
  r.check("family-bounded", rep.family_bounded);
  r.check("inf-slow-decrease", rep.inf_slow_decrease);
  r.check("tail-estimate", rep.tail_estimate);
  r.check("conclusion", rep.conclusion, expected);
  r.curves.emplace_back("curves.csv", report::columns_table({"xi", "log_inf", "log_f"},
                                                            {rep.curve_xi, rep.curve_log_inf, rep.curve_log_f}));
  r.anchor("kernel-family-lemma");
  r.anchor("coercion-conclusion");
}

void coercion_star(Run& r) {
  auto win = r.window(128, 1.0 / 16);
  StarKind k{DCSequence::from_key(r.str("co.L", "analytic")), r.dbl("co.r", 1)};
  auto p = SymbolModel::from_key(r.str("co.symbol", "sep:exp:one"));
  auto psi = BumpModel::from_key(r.str("co.psi", "box-unit:4:1"));
  auto u = PhysicalModel::from_key(r.str("co.u", "delta+gaussian:1"));
  auto w = Weight::from_key(r.str("co.w", "log"));
  auto wp = Weight::from_key(r.str("co.w_prime", "log"));
  auto expected = r.expect("co.expect", Verdict::verified);
  auto opt = coercion_options(r);
  auto rep = coercion_experiment(k, p, psi, u, w, wp, win, opt);
  coercion_common(r, rep, expected);
  r.check("unit-bracket-bound", from_bool(rep.step1_max_ratio <= 1 + 1e-3));
  r.anchor("condition-star");
  r.anchor("unit-sequence");
}

void coercion_doublestar(Run& r) {
  auto win = r.window(128, 1.0 / 16);
  DoubleStarKind k{Weight::from_key(r.str("co.gamma", "gevrey:0.5"))};
  auto p = SymbolModel::from_key(r.str("co.symbol", "sep:gbump:0.75:one"));
  auto psi = BumpModel::from_key(r.str("co.psi", "box-unit:4:1"));
  auto u = PhysicalModel::from_key(r.str("co.u", "delta+gaussian:1"));
  auto w = Weight::from_key(r.str("co.w", "log"));
  auto wp = Weight::from_key(r.str("co.w_prime", "gevrey:0.5"));
  auto expected = r.expect("co.expect", Verdict::verified);
  auto rep = coercion_experiment(k, p, psi, u, w, wp, win, coercion_options(r));
  coercion_common(r, rep, expected);
  r.anchor("condition-double-star");
}

// ---- gevrey-map ----
struct Triple {
  int ia, ir, is;  // multiples of the grid step
};

// Symbol for the coercive side: analytic in x for a = 1, a Gevrey bump of
// order between a and 1 otherwise.
CoercionReport gevrey_coercive_run(double a, double r, double s, const FrequencyWindow& win) {
  auto u = PhysicalModel::from_key("delta+gaussian:1");
  auto psi = BumpModel::box_unit(4, 1);
  if (a >= 1) return coercion_experiment(StarKind{}, SymbolModel::from_key("sep:exp:one"), psi, u, Weight::gevrey(r),
                                         Weight::gevrey(s), win);
  auto p = SymbolModel::from_key("sep:gbump:" + report::csv_number((a + 1) / 2) + ":one");
  return coercion_experiment(DoubleStarKind{Weight::gevrey(a)}, p, psi, u, Weight::gevrey(r), Weight::gevrey(s), win);
}

// number of cells of a unit grid; 1/step must be a whole number
int grid_count(double step, const std::string& key) {
  if (!(step > 0 && step <= 0.5)) throw ConfigError("gevrey-map: " + key + " must lie in (0, 0.5]");
  int n = static_cast<int>(std::lround(1 / step));
  if (std::abs(n * step - 1) > 1e-9) throw ConfigError("gevrey-map: 1/" + key + " must be an integer");
  return n;
}

void gevrey_map(Run& r) {
  int n = grid_count(r.dbl("map.step", 0.05), "map.step");
  const double dn = n;
  report::CsvTable grid;
  grid.header = {"a", "r", "s", "coercive_claim", "counterexample_exists", "gap"};
  std::size_t both = 0, gaps = 0, coercive = 0, counter = 0;
  for (int ia = 1; ia <= n; ++ia)
    for (int ir = 1; ir < n; ++ir)
      for (int is = 1; is < n; ++is) {
        auto g = gevrey_relation(ia / dn, ir / dn, is / dn);
        both += g.coercive_claim && g.counterexample_exists;
        gaps += g.gap;
        coercive += g.coercive_claim;
        counter += g.counterexample_exists;
        grid.add_row({report::csv_number(ia / dn), report::csv_number(ir / dn), report::csv_number(is / dn),
                      g.coercive_claim ? "1" : "0", g.counterexample_exists ? "1" : "0", g.gap ? "1" : "0"});
      }
  r.result["grid"] = {{"step", report::num(1 / dn)}, {"points", grid.rows.size()}, {"coercive", coercive},
                      {"counterexample", counter}, {"overlap", both}, {"gap", gaps}};
  r.check("disjoint", from_bool(both == 0));
  r.curves.emplace_back("region_map.csv", grid);
  r.anchor("gevrey-multiplier");
  r.anchor("gevrey-counterexample");

  int points = r.integer("map.points", 0);
  if (points <= 0) return;
  int m = grid_count(r.dbl("map.sample_step", 0.1), "map.sample_step");
  const double dm = m;
  FrequencyWindow co_win(r.dbl("map.co_radius", 128), r.dbl("map.co_step", 1.0 / 16));
  FrequencyWindow cx_win(r.dbl("map.cx_radius", 32768), r.dbl("map.cx_step", 1.0 / 64));
  std::vector<Triple> co, cx;
  for (int ia = 1; ia <= m; ++ia)
    for (int ir = 1; ir < m; ++ir)
      for (int is = 1; is < m; ++is) {
        auto g = gevrey_relation(ia / dm, ir / dm, is / dm);
        (g.coercive_claim ? co : cx).push_back({ia, ir, is});
      }
  // Fisher-Yates with the raw engine output, so the order does not depend on
  // the standard library's distributions
  std::mt19937_64 rng(r.cfg.seed);
  auto shuffle = [&](std::vector<Triple>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
  };
  shuffle(co);
  shuffle(cx);
  auto label = [&](const Triple& t) {
    return report::csv_number(t.ia / dm) + "," + report::csv_number(t.ir / dm) + "," +
           report::csv_number(t.is / dm);
  };
  Json samples = Json::array();
  int done = 0;
  for (const auto& t : co) {
    if (done == points) break;
    double a = t.ia / dm, rr = t.ir / dm, s = t.is / dm;
    Json j{{"a", report::num(a)}, {"r", report::num(rr)}, {"s", report::num(s)}, {"region", "coercive"}};
    try {
      auto rep = gevrey_coercive_run(a, rr, s, co_win);
      j["conclusion"] = verdict_str(rep.conclusion);
      j["kind"] = rep.kind;
      r.check("coercive:" + label(t), rep.conclusion);
    } catch (const PreconditionError& e) {
      j["error"] = e.what();
      r.check("coercive:" + label(t), Verdict::inconclusive);
    }
    samples.push_back(j);
    ++done;
  }
  done = 0;
  Json skipped = Json::array();
  for (const auto& t : cx) {
    if (done == points) break;
    double a = t.ia / dm, rr = t.ir / dm, s = t.is / dm;
    CounterexampleReport rep;
    try {
      rep = gevrey_counterexample(a, rr, s, default_centers(cx_win.radius() / 2), cx_win);
    } catch (const PreconditionError& e) {
      // default centers too tight for this triple
      skipped.push_back({{"a", report::num(a)}, {"r", report::num(rr)}, {"s", report::num(s)}, {"reason", e.what()}});
      continue;
    }
    Json j{{"a", report::num(a)}, {"r", report::num(rr)}, {"s", report::num(s)}, {"region", "counterexample"},
           {"verdict", verdict_str(rep.verdict)}, {"trend_exponent", report::num(rep.trend_exponent)}};
    r.check("counterexample:" + label(t), rep.verdict);
    // the coercion side must refuse to run here
    bool refused = false;
    try {
      gevrey_coercive_run(a, rr, s, co_win);
    } catch (const PreconditionError&) {
      refused = true;
    }
    j["coercion_refused"] = refused;
    r.check("no-coercion-claim:" + label(t), from_bool(refused));
    samples.push_back(j);
    ++done;
  }
  r.result["samples"] = samples;
  r.result["skipped"] = skipped;
  r.anchor("condition-double-star");
  r.anchor("condition-star");
}

using ScenarioFn = std::function<void(Run&)>;

const std::vector<std::pair<std::string, ScenarioFn>>& scenario_table() {
  static const std::vector<std::pair<std::string, ScenarioFn>> t = {
      {"weights-check", weights_check},
      {"slowdec-scan", slowdec_scan},
      {"units-bounds", units_bounds},
      {"lemma1", lemma1},
      {"prop1-sum", prop1_sum},
      {"sandwich", sandwich},
      {"counterexample-gevrey", counterexample_gevrey},
      {"counterexample-general", counterexample_general},
      {"coercion-star", coercion_star},
      {"coercion-doublestar", coercion_doublestar},
      {"gevrey-map", gevrey_map},
  };
  return t;
}

std::string utc_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string status_of(int code) {
  switch (code) {
    case exit_ok: return "ok";
    case exit_mismatch: return "mismatch";
    case exit_inconclusive: return "inconclusive";
    case exit_precondition: return "precondition";
    default: return "error";
  }
}

}  // namespace

std::vector<std::string> scenario_names() {
  std::vector<std::string> n;
  for (const auto& [name, fn] : scenario_table()) n.push_back(name);
  return n;
}

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  namespace fs = std::filesystem;
  ScenarioResult res;
  const auto& table = scenario_table();
  auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == cfg.name; });
  if (it == table.end()) {
    res.exit_code = exit_config;
    res.diagnostic = "unknown scenario '" + cfg.name + "'";
    return res;
  }
  const auto t0 = std::chrono::steady_clock::now();
  Run run(cfg);
  std::optional<Json> error;
  try {
    it->second(run);
    res.exit_code = exit_code_for(run.checks);
  } catch (const ConfigError& e) {
    res.exit_code = exit_config;
    res.diagnostic = e.what();
  } catch (const DomainError& e) {
    res.exit_code = exit_config;
    res.diagnostic = e.what();
  } catch (const PreconditionError& e) {
    res.exit_code = exit_precondition;
    error = Json{{"type", "precondition"}, {"message", e.what()}};
  } catch (const SolveError& e) {
    res.exit_code = exit_precondition;
    error = Json{{"type", "solve"}, {"message", e.what()}};
  } catch (const Error& e) {
    // aliasing, representation and shape failures are numerical limits of the window
    res.exit_code = exit_precondition;
    error = Json{{"type", "numerical"}, {"message", e.what()}};
  }
  if (res.exit_code == exit_config) return res;
  if (error) res.diagnostic = (*error)["message"].get<std::string>();
  res.checks = run.checks;
  const double runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path dir = fs::path(cfg.output_dir) / cfg.name;
  Json j;
  j["schema"] = "convolab.report/1";
  j["scenario"] = cfg.name;
  j["seed"] = cfg.seed;
  Json params = Json::object();
  for (const auto& [k, v] : run.used) params[k] = v;
  j["parameters"] = params;
  j["status"] = status_of(res.exit_code);
  j["exit_code"] = res.exit_code;
  Json checks = Json::array();
  for (const auto& c : run.checks)
    checks.push_back({{"name", c.name}, {"expected", verdict_str(c.expected)}, {"actual", verdict_str(c.actual)}});
  j["checks"] = checks;
  j["min_margin"] = report::opt(run.min_margin);
  j["result"] = run.result;
  if (error) j["error"] = *error;
  Json files = Json::array();
  for (const auto& [name, table_] : run.curves) {
    report::write_atomic((dir / name).string(), table_.str());
    files.push_back(name);
  }
  j["curves"] = files;
  j["manifest"] = "manifest.json";
  j["timestamp"] = {{"utc", utc_now()}, {"runtime_s", runtime}};
  res.report_path = (dir / "report.json").string();
  report::write_atomic(res.report_path, report::dump(j));

  Json anchors = Json::array();
  for (const auto& a : run.anchors) anchors.push_back(a);
  Json mf{{"scenario", cfg.name}, {"anchors", anchors}, {"report", "report.json"}, {"curves", files}};
  report::write_atomic((dir / "manifest.json").string(), report::dump(mf));
  return res;
}

DigestResult report_digest(const std::vector<std::string>& paths) {
  struct Row {
    std::string scenario, path;
    std::vector<std::string> cells;
    int code;
  };
  std::vector<Row> rows;
  std::vector<std::pair<std::string, std::string>> errors;
  for (const auto& p : paths) {
    try {
      std::ifstream in(p);
      if (!in) throw std::runtime_error("cannot read");
      auto j = Json::parse(in);
      auto scenario = j.at("scenario").get<std::string>();
      int code = j.at("exit_code").get<int>();
      std::string verdicts;
      for (const auto& c : j.at("checks")) {
        if (!verdicts.empty()) verdicts += ';';
        verdicts += c.at("name").get<std::string>() + "=" + c.at("actual").get<std::string>();
      }
      auto num_cell = [](const Json& v) {
        if (v.is_null()) return std::string();
        if (v.is_string()) return v.get<std::string>();
        return report::csv_number(v.get<double>());
      };
      std::string runtime;
      if (j.contains("timestamp") && j["timestamp"].contains("runtime_s")) runtime = num_cell(j["timestamp"]["runtime_s"]);
      rows.push_back({scenario, p,
                      {scenario, j.at("status").get<std::string>(), std::to_string(code), verdicts,
                       num_cell(j.value("min_margin", Json())), runtime, p},
                      code});
    } catch (const std::exception& e) {
      errors.emplace_back(p, e.what());
    }
  }
  std::sort(rows.begin(), rows.end(),
            [](const Row& a, const Row& b) { return std::tie(a.scenario, a.path) < std::tie(b.scenario, b.path); });
  report::CsvTable t;
  t.header = {"scenario", "status", "exit_code", "verdicts", "min_margin", "runtime_s", "path"};
  DigestResult d;
  bool mismatch = false, inconclusive = false, precondition = false;
  for (auto& r : rows) {
    mismatch = mismatch || r.code == exit_mismatch;
    inconclusive = inconclusive || r.code == exit_inconclusive;
    precondition = precondition || r.code == exit_precondition;
    t.add_row(std::move(r.cells));
  }
  d.csv = t.str();
  if (!errors.empty()) {
    report::CsvTable e;
    e.header = {"errors", "message"};
    for (auto& [p, m] : errors) e.add_row({p, m});
    d.csv += "\n" + e.str();
  }
  d.exit_code = !errors.empty() || precondition ? exit_precondition
                : mismatch                      ? exit_mismatch
                : inconclusive                  ? exit_inconclusive
                                                : exit_ok;
  return d;
}

std::string catalog_text() {
  std::ostringstream os;
  auto section = [&](const char* title, const std::vector<std::string>& keys) {
    os << title << ":\n";
    for (const auto& k : keys) os << "  " << k << "\n";
  };
  section("weights", Weight::catalog_keys());
  section("dc sequences", {"analytic", "gevrey:<sigma>", "table:<csv>"});
  section("symbols", SymbolModel::catalog_keys());
  section("smooth functions (symbol factors)", smooth_catalog_keys());
  section("bumps", BumpModel::catalog_keys());
  section("physical models", PhysicalModel::catalog_keys());
  section("spectra (slowdec-scan)", {"one", "stretched-exp:<beta>[:<c>]", "physical:<model key>"});
  section("profiles (sandwich)", {"gaussian", "laplace", "stretched-exp:<beta>:<c>"});
  section("scenarios", scenario_names());
  return os.str();
}

}  // namespace convolab
