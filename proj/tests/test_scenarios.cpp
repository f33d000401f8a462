#include <filesystem>
#include <fstream>
#include <sstream>

#include "convolab/scenarios.hpp"
#include "doctest.h"

using namespace convolab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("convolab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void put(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

std::string fake_report(const std::string& scenario, int code, const std::string& status) {
  return "{\"scenario\":\"" + scenario + "\",\"status\":\"" + status + "\",\"exit_code\":" + std::to_string(code) +
         ",\"checks\":[{\"name\":\"x\",\"expected\":\"verified\",\"actual\":\"verified\"}],\"min_margin\":0.5}";
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string l;
  while (std::getline(ss, l)) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("config: parsing and overrides") {
  auto c = ScenarioConfig::parse("[scenario]\nname = sandwich\nseed = 7\noutput = somewhere\n[sandwich]\nJ = 2, 3\n");
  CHECK(c.name == "sandwich");
  CHECK(c.seed == 7);
  CHECK(c.output_dir == "somewhere");
  CHECK(c.get_list("sandwich.J", {}) == std::vector<double>{2, 3});
  CHECK(c.get_double("sandwich.tol", 0.25) == 0.25);
  c.set("window.radius=512");
  CHECK(c.get_int("window.radius", 0) == 512);
  c.set("scenario.seed=9");
  CHECK(c.seed == 9);
}

TEST_CASE("config: malformed input is a config error") {
  CHECK_THROWS_AS(ScenarioConfig::parse("[sandwich]\nJ = 2\n"), ConfigError);  // no name
  CHECK_THROWS_AS(ScenarioConfig::parse("name = x\n"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::parse("[scenario\nname = x\n"), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::parse("[scenario]\nname = x\ncolour = red\n"), ConfigError);
  ScenarioConfig c;
  CHECK_THROWS_AS(c.set("noequals"), ConfigError);
  CHECK_THROWS_AS(c.set("nosection=1"), ConfigError);
  CHECK_THROWS_AS(c.set("scenario.seed=-1"), ConfigError);
  CHECK_THROWS_AS(c.set("scenario.seed=1.5"), ConfigError);
  c.set("a.b=1x");
  CHECK_THROWS_AS(c.get_double("a.b", 0), ConfigError);
  c.set("a.c=2.5");
  CHECK_THROWS_AS(c.get_int("a.c", 0), ConfigError);
  CHECK_THROWS_AS(ScenarioConfig::load("/nonexistent/config.ini"), ConfigError);
}

TEST_CASE("exit codes from check outcomes") {
  using V = Verdict;
  CHECK(exit_code_for({}) == 0);
  CHECK(exit_code_for({{"a", V::verified, V::verified}, {"b", V::refuted, V::refuted}}) == 0);
  CHECK(exit_code_for({{"a", V::verified, V::inconclusive}}) == 3);
  CHECK(exit_code_for({{"a", V::verified, V::inconclusive}, {"b", V::verified, V::refuted}}) == 2);
  CHECK(exit_code_for({{"a", V::refuted, V::verified}}) == 2);
}

TEST_CASE("csv formatting") {
  CHECK(report::csv_number(0.1) == "0.1");
  CHECK(report::csv_number(-2) == "-2");
  CHECK(report::csv_number(1e-300) == "1e-300");
  CHECK(report::csv_number(1.0 / 0.0) == "inf");
  CHECK(std::stod(report::csv_number(1.0 / 3)) == 1.0 / 3);
  CHECK(report::csv_escape("a,b") == "\"a,b\"");
  CHECK(report::csv_escape("say \"x\"") == "\"say \"\"x\"\"\"");
  auto t = report::columns_table({"x", "y"}, {{1, 2}, {0.5, -0.25}});
  CHECK(t.str() == "x,y\n1,0.5\n2,-0.25\n");
  CHECK_THROWS_AS(report::columns_table({"x"}, {{1}, {2}}), ShapeError);
  report::CsvTable u;
  u.header = {"a"};
  CHECK_THROWS_AS(u.add_row({"1", "2"}), ShapeError);
}

TEST_CASE("json numbers keep non-finite values as strings") {
  CHECK(report::num(1.0 / 0.0) == "inf");
  CHECK(report::num(-1.0 / 0.0) == "-inf");
  CHECK(report::num(0.0 / 0.0) == "nan");
  CHECK(report::num(2.5) == 2.5);
  CHECK(report::opt(std::nullopt).is_null());
}

TEST_CASE("atomic write replaces the file and leaves no temporaries") {
  auto dir = scratch("atomic");
  auto p = dir / "sub" / "f.txt";
  report::write_atomic(p.string(), "one");
  report::write_atomic(p.string(), "two");
  CHECK(slurp(p) == "two");
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir / "sub")) (void)e, ++files;
  CHECK(files == 1);
}

TEST_CASE("digest: ordering, exit precedence and malformed reports") {
  auto dir = scratch("digest");
  CHECK(report_digest({}).exit_code == 0);
  CHECK(lines(report_digest({}).csv).size() == 1);

  put(dir / "b.json", fake_report("slowdec-scan", 0, "ok"));
  put(dir / "a.json", fake_report("weights-check", 0, "ok"));
  auto d = report_digest({(dir / "a.json").string(), (dir / "b.json").string()});
  CHECK(d.exit_code == 0);
  auto l = lines(d.csv);
  REQUIRE(l.size() == 3);
  CHECK(l[0] == "scenario,status,exit_code,verdicts,min_margin,runtime_s,path");
  CHECK(l[1].rfind("slowdec-scan,ok,0,x=verified,0.5,", 0) == 0);
  CHECK(l[2].rfind("weights-check,", 0) == 0);

  put(dir / "c.json", fake_report("lemma1", 3, "inconclusive"));
  CHECK(report_digest({(dir / "a.json").string(), (dir / "c.json").string()}).exit_code == 3);
  put(dir / "d.json", fake_report("lemma1", 2, "mismatch"));
  CHECK(report_digest({(dir / "c.json").string(), (dir / "d.json").string()}).exit_code == 2);

  put(dir / "bad.json", "{not json");
  d = report_digest({(dir / "a.json").string(), (dir / "bad.json").string(), (dir / "d.json").string()});
  CHECK(d.exit_code == 65);
  CHECK(d.csv.find("errors,message") != std::string::npos);
  CHECK(report_digest({(dir / "missing.json").string()}).exit_code == 65);
}

TEST_CASE("scenario: unknown name and bad parameters give 64 without a report") {
  auto dir = scratch("bad");
  ScenarioConfig c;
  c.name = "no-such-scenario";
  c.output_dir = dir.string();
  auto r = run_scenario(c);
  CHECK(r.exit_code == 64);
  CHECK(r.report_path.empty());
  c.name = "slowdec-scan";
  c.set("slowdec.spectrum=mystery");
  r = run_scenario(c);
  CHECK(r.exit_code == 64);
  CHECK_FALSE(r.diagnostic.empty());
  c.set("slowdec.spectrum=one");
  c.set("window.radius=10");  // below the minimum point count
  CHECK(run_scenario(c).exit_code == 64);
}

TEST_CASE("scenario: slow-decrease scan writes report, manifest and curves") {
  auto dir = scratch("slowdec");
  ScenarioConfig c;
  c.name = "slowdec-scan";
  c.output_dir = dir.string();
  auto r = run_scenario(c);
  CHECK(r.exit_code == 0);
  REQUIRE(fs::exists(r.report_path));
  auto j = report::Json::parse(slurp(r.report_path));
  CHECK(j["schema"] == "convolab.report/1");
  CHECK(j["status"] == "ok");
  CHECK(j["parameters"]["slowdec.spectrum"] == "one");
  CHECK(j["result"]["slow_decrease"]["verdict"] == "verified");
  CHECK(fs::exists(dir / "slowdec-scan" / "manifest.json"));
  CHECK(fs::exists(dir / "slowdec-scan" / "margin.csv"));

  // a refuted spectrum with a mismatching expectation gives exit 2
  // e^{-sqrt|xi|} only drops below e^{-8 log|xi|} past a few thousand
  c.set("slowdec.spectrum=stretched-exp:0.5");
  c.set("window.radius=16384");
  r = run_scenario(c);
  CHECK(r.exit_code == 2);
  c.set("slowdec.expect=refuted");
  r = run_scenario(c);
  CHECK(r.exit_code == 0);
  j = report::Json::parse(slurp(r.report_path));
  CHECK(j["result"]["slow_decrease"]["monotone_worsening"] == true);
  CHECK(j["checks"].size() == 2);
}

TEST_CASE("scenario: precondition failures write a report with status precondition") {
  auto dir = scratch("pre");
  ScenarioConfig c;
  c.name = "coercion-star";
  c.output_dir = dir.string();
  c.set("co.psi=box-unit:2:1");  // plateau too narrow for the unit supports
  auto r = run_scenario(c);
  CHECK(r.exit_code == 65);
  REQUIRE_FALSE(r.report_path.empty());
  auto j = report::Json::parse(slurp(r.report_path));
  CHECK(j["status"] == "precondition");
  CHECK(j["error"]["type"] == "precondition");
}

TEST_CASE("scenario: counterexample outside its hypothesis is a precondition failure") {
  auto dir = scratch("cx");
  ScenarioConfig c;
  c.name = "counterexample-gevrey";
  c.output_dir = dir.string();
  c.set("cx.a=1.0");  // a < r/s fails for r = 0.5, s = 0.7
  auto r = run_scenario(c);
  CHECK(r.exit_code == 65);
  CHECK(r.diagnostic.find("a < r/s") != std::string::npos);
  c.set("cx.a=1.5");  // outside the parameter domain
  r = run_scenario(c);
  CHECK(r.exit_code == 64);
  CHECK(r.report_path.empty());
}

TEST_CASE("scenario: gevrey map regions on a coarse grid") {
  auto dir = scratch("map");
  ScenarioConfig c;
  c.name = "gevrey-map";
  c.output_dir = dir.string();
  c.set("map.step=0.1");
  auto r = run_scenario(c);
  CHECK(r.exit_code == 0);
  auto j = report::Json::parse(slurp(r.report_path));
  CHECK(j["result"]["grid"]["points"] == 10 * 9 * 9);
  CHECK(j["result"]["grid"]["overlap"] == 0);
  CHECK(j["result"]["grid"]["gap"] == 0);
  auto csv = lines(slurp(dir / "gevrey-map" / "region_map.csv"));
  CHECK(csv.size() == 10 * 9 * 9 + 1);
  c.set("map.step=0.3");
  CHECK(run_scenario(c).exit_code == 64);
}

TEST_CASE("scenario names and catalog") {
  auto names = scenario_names();
  CHECK(names.size() == 11);
  auto cat = catalog_text();
  for (const auto& n : names) CHECK(cat.find(n) != std::string::npos);
  CHECK(cat.find("gevrey:<a>") != std::string::npos);
}
