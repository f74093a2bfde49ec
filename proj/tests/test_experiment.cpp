#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "uvstat/experiment.hpp"

using namespace uvstat;

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is);
  return std::string(std::istreambuf_iterator<char>(is), {});
}

fs::path fresh_dir(const std::string& leaf) {
  const fs::path dir = fs::temp_directory_path() / "uvstat_test" / leaf;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("scenario registry and suggestions") {
  CHECK(list_scenarios().size() == 6);
  CHECK_THROWS_WITH_AS(default_config("iid_vstat_winer"),
                       doctest::Contains("iid_vstat_wiener"), ConfigError);
}

TEST_CASE("scenario defaults follow the experiment design") {
  const ExperimentConfig iid = default_config("iid_vstat_wiener");
  CHECK(iid.statistic == "V");
  CHECK(iid.process_id == "iid");
  CHECK(iid.require_decreasing_ks);
  CHECK(iid.ks_max == 0.075);

  const ExperimentConfig dep = default_config("dep_ustat_theorem1");
  CHECK(dep.statistic == "U");
  CHECK(dep.process_id == "one_dependent_shift");
  CHECK(dep.basis == "discrete_signed");

  const ExperimentConfig prop2 = default_config("prop2_refute_eagleson");
  CHECK(prop2.diagonal_beta.has_value());
  CHECK(*prop2.diagonal_beta == 1.0);

  const ExperimentConfig prop4 = default_config("prop4_divergence");
  CHECK(prop4.eigenvalues == "one_over_k");
  CHECK(prop4.n_grid == std::vector<std::size_t>{500, 1000, 2000, 4000});
}

TEST_CASE("config parsing: sections, overrides, comments") {
  const std::string text =
      "scenario = iid_vstat_wiener\n"
      "# a comment\n"
      "[process]\n"
      "seed = 99  ; trailing comment\n"
      "[statistic]\n"
      "n_grid = 50,100\n"
      "replicates = 10\n"
      "[thresholds]\n"
      "ks_max = 0.2\n";
  const ExperimentConfig c = parse_config_text(text);
  CHECK(c.scenario == "iid_vstat_wiener");
  CHECK(c.master_seed == 99);
  CHECK(c.n_grid == std::vector<std::size_t>{50, 100});
  CHECK(c.replicates == 10);
  CHECK(c.ks_max == 0.2);
  CHECK(c.statistic == "V");  // untouched default
}

TEST_CASE("config errors name the offending key") {
  CHECK_THROWS_WITH_AS(parse_config_text("scenario = iid_vstat_wiener\n"
                                         "[process]\nsid = 7\n"),
                       doctest::Contains("process.sid"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("scenario = iid_vstat_wiener\n"
                                         "[process]\nseed = -3\n"),
                       doctest::Contains("process.seed"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("scenario = iid_vstat_wiener\n"
                                         "[statistic]\nkind = W\n"),
                       doctest::Contains("statistic.kind"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("[process]\nseed = 3\n"),
                       doctest::Contains("scenario"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config_text("scenario = iid_vstat_wiener\n", "ortho_check"),
      doctest::Contains("scenario"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("scenario = iid_vstat_wiener\n"
                                         "[kernel]\ntruncation = 9999\n"),
                       doctest::Contains("kernel.truncation"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("scenario = iid_vstat_wiener\n"
                                         "[kernel]\nbasis = discrete_signed\n"),
                       doctest::Contains("kernel.basis"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("scenario = dep_ustat_theorem1\n"
                                         "[kernel]\ndiagonal_beta = 1\n"),
                       doctest::Contains("diagonal_beta"), ConfigError);
}

TEST_CASE("scenario override must agree with the file") {
  const std::string text = "scenario = ortho_check\n";
  const ExperimentConfig c = parse_config_text(text, "ortho_check");
  CHECK(c.scenario == "ortho_check");
  CHECK(parse_config_text("[output]\ndir = x\n", "ortho_check").out_dir == "x");
}

TEST_CASE("config hash is stable and sensitive") {
  const ExperimentConfig a = default_config("ortho_check");
  const ExperimentConfig b = default_config("ortho_check");
  CHECK(a.hash() == b.hash());
  ExperimentConfig c = a;
  c.master_seed += 1;
  CHECK(c.hash() != a.hash());
  ExperimentConfig d = a;
  d.ks_max += 0.001;
  CHECK(d.hash() != a.hash());
}

TEST_CASE("ortho_check scenario writes artifacts and passes") {
  ExperimentConfig c = default_config("ortho_check");
  c.gram_upto = 8;
  const fs::path dir = fresh_dir("ortho");
  c.out_dir = dir.string();
  const RunResult r = run_experiment(c);
  CHECK(r.exit_code == 0);
  CHECK(r.pass);
  REQUIRE(r.checks.size() == 2);
  CHECK(fs::exists(dir / "samples.csv"));
  CHECK(fs::exists(dir / "distances.csv"));
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(fs::exists(dir / "ecdf.svg"));

  const std::string samples = slurp(dir / "samples.csv");
  CHECK(samples.find("config_hash=") != std::string::npos);
  const std::string summary = slurp(dir / "summary.json");
  CHECK(summary.find("\"scenario\": \"ortho_check\"") != std::string::npos);
  CHECK(summary.find("\"exit_code\": 0") != std::string::npos);
}

TEST_CASE("covariance_check scenario at reduced path length") {
  ExperimentConfig c = default_config("covariance_check");
  c.mc_path_length = 20000;
  const fs::path dir = fresh_dir("cov");
  c.out_dir = dir.string();
  const RunResult r = run_experiment(c);
  CHECK(fs::exists(dir / "covariance.csv"));
  REQUIRE(r.checks.size() == 3);
  CHECK(r.checks[0].pass);  // analytic 1.5 I is exact regardless of MC noise
  CHECK(r.checks[1].pass);
}

TEST_CASE("scaled-down distribution scenario runs end to end") {
  ExperimentConfig c = default_config("iid_vstat_wiener");
  c.basis_max_index = 20;
  c.truncation = 20;
  c.limit_truncation = 20;
  c.n_grid = {20, 40};
  c.replicates = 60;
  c.limit_replicates = 200;
  const fs::path dir = fresh_dir("dist");
  c.out_dir = dir.string();
  const RunResult r = run_experiment(c);
  CHECK((r.exit_code == 0 || r.exit_code == 2));  // tiny run, no KS promise
  const std::string samples = slurp(dir / "samples.csv");
  CHECK(samples.find("stat,") != std::string::npos);
  CHECK(samples.find("limit_v,") != std::string::npos);
  const std::string distances = slurp(dir / "distances.csv");
  CHECK(distances.find("stat_vs_limit") != std::string::npos);
}

TEST_CASE("identical runs produce identical artifacts regardless of workers") {
  ExperimentConfig c = default_config("iid_vstat_wiener");
  c.basis_max_index = 10;
  c.truncation = 10;
  c.limit_truncation = 10;
  c.n_grid = {30};
  c.replicates = 50;
  c.limit_replicates = 50;

  const fs::path d1 = fresh_dir("det1");
  const fs::path d2 = fresh_dir("det2");
  ExperimentConfig c1 = c;
  c1.out_dir = d1.string();
  ExperimentConfig c2 = c;
  c2.out_dir = d2.string();
  c2.workers = 4;
  run_experiment(c1);
  run_experiment(c2);
  CHECK(slurp(d1 / "samples.csv") == slurp(d2 / "samples.csv"));
  CHECK(slurp(d1 / "distances.csv") == slurp(d2 / "distances.csv"));
}
