#pragma once

// Named scenarios driven by INI-style configs, their reports, and the digest.

#include <map>
#include <string>
#include <vector>

#include "convolab/report.hpp"

namespace convolab {

enum ExitCode : int { exit_ok = 0, exit_mismatch = 2, exit_inconclusive = 3, exit_config = 64, exit_precondition = 65 };

struct ScenarioConfig {
  std::string name;
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  // "section.key" -> value; keys outside the [scenario] section
  std::map<std::string, std::string> params;

  // INI file; [scenario] holds name, output and seed.
  static ScenarioConfig load(const std::string& path);
  static ScenarioConfig parse(const std::string& text);
  // "section.key=value"; scenario.name/output/seed are accepted too.
  void set(const std::string& assignment);

  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> get_strings(const std::string& key, const std::vector<std::string>& fallback) const;
};

struct CheckOutcome {
  std::string name;
  Verdict expected = Verdict::verified;
  Verdict actual = Verdict::inconclusive;
};

struct ScenarioResult {
  int exit_code = exit_ok;
  std::string report_path;  // empty when the scenario failed before reporting
  std::vector<CheckOutcome> checks;
  std::string diagnostic;   // set for exit codes 64 and 65
};

std::vector<std::string> scenario_names();

// Runs one scenario, writing report.json, manifest.json and curve CSVs under
// output_dir/<name>/. Never throws for config or precondition failures.
ScenarioResult run_scenario(const ScenarioConfig& cfg);

// 0 when all checks match, 2 on a mismatch, 3 when something is inconclusive.
int exit_code_for(const std::vector<CheckOutcome>& checks);

struct DigestResult {
  int exit_code = exit_ok;
  std::string csv;
};

// One row per report, ordered by scenario name then path; malformed reports
// go to a trailing errors section and give exit 65.
DigestResult report_digest(const std::vector<std::string>& paths);

// Catalog keys of weights, sequences, symbols, bumps, physical models and scenarios.
std::string catalog_text();

}  // namespace convolab
