#include "convolab/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

namespace convolab::report {

Json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json nums(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

Json opt(const std::optional<double>& v) { return v ? num(*v) : Json(nullptr); }

Json verdict(Verdict v) { return std::string(to_string(v)); }

namespace {

Json strings(const std::vector<std::string>& v) {
  Json a = Json::array();
  for (const auto& s : v) a.push_back(s);
  return a;
}

}  // namespace

Json to_json(const SlowDecreaseReport& r) {
  Json j;
  j["verdict"] = verdict(r.verdict);
  j["A_star"] = opt(r.A_star);
  j["ladder"] = nums(r.ladder);
  Json h = Json::array();
  for (bool b : r.holds_at) h.push_back(b);
  j["holds_at"] = h;
  j["min_margin"] = nums(r.min_margin);
  Json s = Json::array();
  for (const auto& v : r.scale_min_margin) s.push_back(nums(v));
  j["scale_min_margin"] = s;
  j["witnesses"] = nums(r.witnesses);
  j["witness_count"] = r.witness_count;
  j["excluded"] = r.excluded;
  j["curve_A"] = num(r.curve_A);
  return j;
}

Json to_json(const MembershipReport& r) {
  Json j;
  j["passed"] = r.passed();
  j["normalization"] = r.normalization;
  j["nonnegative"] = r.nonnegative;
  j["subadditive"] = r.subadditive;
  j["log_lower_bound"] = r.log_lower_bound;
  j["integral_bound"] = r.integral_bound;
  j["fit_a"] = num(r.fit_a);
  j["fit_b"] = num(r.fit_b);
  j["tail_slope"] = num(r.tail_slope);
  j["integral_ladder"] = nums(r.integral_ladder);
  j["witnesses"] = nums(r.witnesses);
  return j;
}

Json to_json(const DominationVerdict& r) {
  Json j;
  j["relation"] = std::string(to_string(r.relation));
  j["A"] = num(r.A);
  j["B"] = num(r.B);
  j["scale_ratio"] = nums(r.scale_ratio);
  j["witnesses"] = nums(r.witnesses);
  return j;
}

Json to_json(const SlowVariationReport& r) {
  Json j;
  j["verdict"] = verdict(r.verdict);
  j["inner"] = to_json(r.inner);
  return j;
}

Json to_json(const UnitNormReport& r) {
  Json j;
  j["verdict"] = verdict(r.verdict);
  j["phi_norm"] = num(r.phi_norm);
  j["member_norm"] = nums(r.member_norm);
  j["tail_flag"] = r.tail_flag;
  return j;
}

Json to_json(const UnitBoundReport& r) {
  Json j;
  j["verdict"] = verdict(r.verdict);
  j["C"] = num(r.C);
  j["C_alpha"] = nums(r.C_alpha);
  j["consistency"] = num(r.consistency);
  j["noise_flag"] = r.noise_flag;
  Json rows = Json::array();
  for (const auto& x : r.rows) rows.push_back({{"alpha", x.alpha}, {"N", x.N}, {"sup", num(x.sup)}, {"bound", num(x.bound)}});
  j["rows"] = rows;
  return j;
}

Json to_json(const Lemma1Report& r) {
  Json j;
  j["verdict"] = verdict(r.verdict);
  j["Lambda1"] = opt(r.Lambda1);
  j["part1"] = {{"verdict", verdict(r.part1)}, {"lhs", num(r.lhs1)}, {"rhs", num(r.rhs1)}, {"margin", num(r.margin1)}};
  j["part2"] = {{"verdict", verdict(r.part2)}, {"lhs", num(r.lhs2)}, {"rhs", num(r.rhs2)}, {"margin", num(r.margin2)}};
  return j;
}

Json to_json(const AsymptoticSum& r) {
  Json j;
  j["verdict"] = verdict(r.verdict);
  j["m0"] = num(r.m0);
  j["j0"] = r.j0;
  Json terms = Json::array();
  for (const auto& t : r.terms)
    terms.push_back({{"j", t.j}, {"m_j", num(t.m_j)}, {"eps", num(t.eps)}, {"C_alpha", nums(t.C_alpha)},
                     {"measured", nums(t.measured)}});
  j["terms"] = terms;
  return j;
}

Json to_json(const SandwichReport& r) {
  auto side = [](const SandwichSideReport& s) {
    return Json{{"min_lower_margin", num(s.min_lower_margin)}, {"argmin_lower", num(s.argmin_lower)},
                {"min_upper_margin", num(s.min_upper_margin)}, {"argmin_upper", num(s.argmin_upper)}};
  };
  Json j;
  j["verdict"] = verdict(r.verdict);
  j["total"] = num(r.total);
  j["intervals"] = side(r.intervals);
  j["complement"] = side(r.complement);
  return j;
}

Json to_json(const StarCertificate& r) {
  Json j;
  j["verdict"] = verdict(r.verdict);
  j["a"] = num(r.a);
  j["R"] = num(r.R);
  j["witnesses"] = nums(r.witnesses);
  j["a_ladder"] = nums(r.a_ladder);
  j["last_violation"] = nums(r.last_violation);
  return j;
}

Json to_json(const CounterexampleReport& r) {
  Json j;
  j["kind"] = r.kind;
  j["verdict"] = verdict(r.verdict);
  if (r.kind == "gevrey") {
    j["a"] = num(r.a);
    j["r"] = num(r.r);
    j["s"] = num(r.s);
    j["alpha"] = num(r.alpha);
    j["beta"] = num(r.beta);
    j["trend_exponent"] = num(r.trend_exponent);
    j["lower_log_const"] = num(r.lower_log_const);
  } else {
    j["w_key"] = r.w_key;
    j["phi_key"] = r.phi_key;
    j["c_fit"] = num(r.c_fit);
    j["dj_residual"] = nums(r.dj_residual);
    j["gamma_ratio"] = nums(r.gamma_ratio);
    j["g_norm_log"] = nums(r.g_norm_log);
  }
  j["xi"] = nums(r.xi);
  j["d"] = nums(r.d);
  j["eq1_margins"] = nums(r.eq1_margins);
  j["eq2_margin_min"] = num(r.eq2_margin_min);
  j["trend_ratio"] = nums(r.trend_ratio);
  j["interval_margin"] = nums(r.interval_margin);
  Json wn = Json::array();
  for (bool b : r.witness_near) wn.push_back(b);
  j["witness_near"] = wn;
  j["w_r"] = verdict(r.w_r);
  j["w_s"] = verdict(r.w_s);
  j["A_ladder_fu"] = nums(r.A_ladder_fu);
  j["A_ladder_u"] = nums(r.A_ladder_u);
  j["notes"] = strings(r.notes);
  return j;
}

Json to_json(const CoercionReport& r) {
  Json j;
  j["kind"] = r.kind;
  j["w_key"] = r.w_key;
  j["w_prime_key"] = r.w_prime_key;
  j["p_key"] = r.p_key;
  j["psi_tag"] = r.psi_tag;
  j["u_tag"] = r.u_tag;
  j["assumptions"] = strings(r.assumptions);
  j["family_bounded"] = verdict(r.family_bounded);
  j["inf_slow_decrease"] = verdict(r.inf_slow_decrease);
  j["tail_estimate"] = verdict(r.tail_estimate);
  j["conclusion"] = verdict(r.conclusion);
  j["lambda0"] = num(r.lambda0);
  Json b = Json::array();
  for (const auto& x : r.bounded_rows)
    b.push_back({{"lambda", num(x.lambda)}, {"Lambda", opt(x.Lambda)}, {"sup_bracket", num(x.sup_bracket)}});
  j["bounded_rows"] = b;
  Json t = Json::array();
  for (const auto& x : r.tail_rows)
    t.push_back({{"lambda", num(x.lambda)}, {"rho", opt(x.rho)}, {"scale_max", nums(x.scale_max)}});
  j["tail_rows"] = t;
  j["C_main"] = num(r.C_main);
  j["A_star_inf"] = opt(r.A_star_inf);
  j["A_star_f"] = opt(r.A_star_f);
  j["A_star_v"] = opt(r.A_star_v);
  j["low_accuracy"] = r.low_accuracy;
  if (r.kind == "star") {
    j["step1_max_ratio"] = num(r.step1_max_ratio);
    j["theory_rho"] = nums(r.theory_rho);
    j["residual_decay"] = num(r.residual_decay);
  }
  if (r.kind == "double_star") j["gamma_domination_B"] = num(r.gamma_domination_B);
  j["notes"] = strings(r.notes);
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot rename " + tmp.string() + " to " + path + ": " + ec.message());
  }
}

void CsvTable::add_row(std::vector<std::string> r) {
  if (r.size() != header.size()) throw ShapeError("csv: row width differs from the header");
  rows.push_back(std::move(r));
}

std::string CsvTable::str() const {
  std::string s;
  auto line = [&](const std::vector<std::string>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ',';
      s += csv_escape(v[i]);
    }
    s += '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return s;
}

CsvTable columns_table(const std::vector<std::string>& header, const std::vector<std::vector<double>>& cols) {
  if (header.size() != cols.size()) throw ShapeError("csv: header and column counts differ");
  CsvTable t;
  t.header = header;
  const std::size_t n = cols.empty() ? 0 : cols.front().size();
  for (const auto& c : cols)
    if (c.size() != n) throw ShapeError("csv: columns of different lengths");
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> r;
    for (const auto& c : cols) r.push_back(csv_number(c[i]));
    t.rows.push_back(std::move(r));
  }
  return t;
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace convolab::report
