#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "convolab/kernels.hpp"
#include "convolab/scenarios.hpp"

using namespace convolab;

int main(int argc, char** argv) {
  CLI::App app{"convolab: slow-decrease and coercion experiments for pseudo-differential operators"};
  app.require_subcommand(1);

  std::string config;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::int64_t seed = -1;
  auto* run = app.add_subcommand("run", "run the scenario described by a config file");
  run->add_option("config", config, "INI config with a [scenario] section")->required();
  run->add_option("--set", overrides, "override section.key=value (repeatable)");
  run->add_option("--out", out_dir, "output directory (overrides scenario.output)");
  run->add_option("--seed", seed, "RNG seed (overrides scenario.seed)")->check(CLI::NonNegativeNumber);

  std::vector<std::string> reports;
  std::string digest_out;
  auto* digest = app.add_subcommand("digest", "summarize report.json files as CSV");
  digest->add_option("reports", reports, "report.json paths")->required();
  digest->add_option("-o,--output", digest_out, "write the CSV here instead of stdout");

  auto* catalog = app.add_subcommand("catalog", "list the accepted keys and scenario names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : exit_config;
  }

  kernels::configure_threads_from_env();

  if (*catalog) {
    std::cout << catalog_text();
    return 0;
  }

  if (*digest) {
    auto d = report_digest(reports);
    if (digest_out.empty()) {
      std::cout << d.csv;
    } else {
      try {
        report::write_atomic(digest_out, d.csv);
      } catch (const std::exception& e) {
        std::cerr << "digest: " << e.what() << "\n";
        return exit_config;
      }
    }
    return d.exit_code;
  }

  ScenarioConfig cfg;
  try {
    cfg = ScenarioConfig::load(config);
    for (const auto& s : overrides) cfg.set(s);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return exit_config;
  }
  auto res = run_scenario(cfg);
  if (!res.diagnostic.empty()) std::cerr << res.diagnostic << "\n";
  for (const auto& c : res.checks)
    std::cout << c.name << ": " << to_string(c.actual)
              << (c.actual == c.expected ? "" : std::string(" (expected ") + std::string(to_string(c.expected)) + ")")
              << "\n";
  if (!res.report_path.empty()) std::cout << "report: " << res.report_path << "\n";
  return res.exit_code;
}
