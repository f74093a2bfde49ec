#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "uvstat/experiment.hpp"
#include "uvstat/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"U/V statistics of weakly dependent sequences: simulate, "
               "compare against limit laws, write artifacts"};
  app.require_subcommand(1);

  std::string config_path;
  std::string scenario;
  std::string out_dir;
  uint64_t seed = 0;
  unsigned workers = 0;

  CLI::App* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("--config", config_path, "INI config file");
  run->add_option("--scenario", scenario,
                  "Scenario name (selects defaults, or overrides the file)");
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "Master seed override");
  run->add_option("--out", out_dir, "Output directory override");
  CLI::Option* workers_opt =
      run->add_option("--workers", workers, "Worker thread count");

  CLI::App* list = app.add_subcommand("list", "List available scenarios");
  CLI::App* check =
      app.add_subcommand("check", "Run the built-in self checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (list->parsed()) {
      for (const uvstat::ScenarioInfo& info : uvstat::list_scenarios())
        std::cout << info.name << "\n    " << info.summary << "\n";
      return 0;
    }
    if (check->parsed()) return uvstat::run_self_check(std::cout);

    std::optional<std::string> wanted;
    if (!scenario.empty()) wanted = scenario;
    uvstat::ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = uvstat::load_config_file(config_path, wanted);
    } else if (wanted) {
      cfg = uvstat::default_config(*wanted);
    } else {
      throw uvstat::ConfigError("run: pass --config and/or --scenario");
    }
    if (seed_opt->count() > 0) cfg.master_seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (workers_opt->count() > 0) {
      if (workers == 0)
        throw uvstat::ConfigError("output.workers: must be >= 1");
      cfg.workers = workers;
    }

    const uvstat::RunResult result = uvstat::run_experiment(cfg);
    for (const uvstat::CheckResult& c : result.checks)
      std::cout << (c.pass ? "ok   - " : "FAIL - ") << c.name
                << "  value=" << uvstat::format_double(c.value)
                << " threshold=" << uvstat::format_double(c.threshold) << "\n";
    std::cout << (result.pass ? "PASS" : "FAIL") << "  artifacts in "
              << cfg.out_dir << "\n";
    return result.exit_code;
  } catch (const uvstat::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
