#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace uvstat {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Resolved experiment settings. Defaults come from the scenario; the config
// file and then command-line overrides are applied on top. Keys unknown to
// the schema are rejected during parsing.
struct ExperimentConfig {
  std::string scenario;

  std::string process_id = "iid";  // iid | one_dependent_shift
  std::string marginal = "uniform_symmetric";
  uint64_t master_seed = 20240817;

  std::string basis = "sine_wiener";  // sine_wiener | discrete_signed
  uint32_t basis_max_index = 200;
  uint32_t order = 2;
  std::string eigenvalues = "wiener";  // wiener | one_over_k | list:a,b,...
  std::optional<double> diagonal_beta;  // sets f(t,...,t) = 1 + beta
  uint32_t truncation = 200;

  std::string statistic = "V";  // U | U0 | V
  std::vector<std::size_t> n_grid{100, 400, 1600};
  std::size_t replicates = 2000;

  std::string covariance = "analytic";  // analytic | mc
  uint32_t lag = 1;
  uint32_t limit_truncation = 200;
  std::size_t limit_replicates = 0;  // 0 -> same as replicates
  std::size_t mc_path_length = 100000;

  std::string out_dir = "out";
  unsigned workers = 1;

  double ks_max = 0.075;
  double ks_claimed_min = 0.25;
  bool require_decreasing_ks = false;
  double growth_factor = 3.0;
  double ks_stability_max = 0.08;
  double sigma_band = 3.0;
  double ortho_tol_continuous = 1e-6;
  double ortho_tol_discrete = 1e-9;
  uint32_t gram_upto = 20;

  // Stable serialization of everything that defines the experiment (output
  // location and worker count excluded: they cannot change the numbers).
  // The FNV-1a hash of this string is embedded in all artifacts.
  std::string canonical_string() const;
  uint64_t hash() const;
};

struct ScenarioInfo {
  std::string name;
  std::string summary;
};

std::vector<ScenarioInfo> list_scenarios();

// Throws ConfigError with a nearest-name suggestion for unknown scenarios.
ExperimentConfig default_config(const std::string& scenario);

ExperimentConfig parse_config_text(
    const std::string& text,
    const std::optional<std::string>& scenario_override = std::nullopt);
ExperimentConfig load_config_file(
    const std::string& path,
    const std::optional<std::string>& scenario_override = std::nullopt);

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct RunResult {
  int exit_code = 1;  // 0 pass, 2 checks failed, 1 error
  bool pass = false;
  std::vector<CheckResult> checks;
  std::string summary_json;
};

// Runs the scenario, writes samples.csv / distances.csv / summary.json /
// ecdf.svg (and covariance.csv where applicable) into config.out_dir.
RunResult run_experiment(const ExperimentConfig& config);

// Quick self-test: orthonormality, covariance constants, partition identity.
int run_self_check(std::ostream& log);

}  // namespace uvstat
