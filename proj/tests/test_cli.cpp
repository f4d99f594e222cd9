#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lsb/experiment.hpp"
#include "lsb/oracles.hpp"

using namespace lsb;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kSmallConfig = R"(
[target]
kind = ising
n = 4
lambda = 0.5
mu = 1.0
sigma = 3.0

[sampler]
kind = lsb1

[train]
eta = 1e-4
K = 10
N = 2

[run]
iters = 200
trials = 2
seed = 99
acf_lags = 20
)";

}  // namespace

TEST_CASE("config parsing fills every section") {
  ExperimentConfig cfg = parse_config_text(kSmallConfig);
  CHECK(cfg.target.kind == TargetSpec::Kind::Ising);
  CHECK(cfg.target.n == 4);
  CHECK(cfg.target.lambda == 0.5);
  REQUIRE(cfg.samplers.size() == 1);
  CHECK(cfg.samplers[0].kind == SamplerSpec::Kind::Lsb1);
  CHECK(cfg.train.iters == 10);
  CHECK(cfg.train.batch == 2);
  CHECK(cfg.run.iters == 200);
  CHECK(cfg.run.trials == 2);
  CHECK(cfg.run.seed == 99);
  cfg.validate();
}

TEST_CASE("config errors name the offending field") {
  CHECK_THROWS_AS(parse_config_text("[target]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[target]\nn = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[target\nn = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[target]\nn 4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[sampler]\nkind = bogus\n"), ConfigError);

  ExperimentConfig cfg = parse_config_text(kSmallConfig);
  cfg.target.lambda = -1.0;
  try {
    cfg.validate();
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("target.lambda") != std::string::npos);
  }
}

TEST_CASE("uai targets require a path") {
  ExperimentConfig cfg = parse_config_text("[target]\nkind = uai\n[sampler]\nkind = barker\n");
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("repeated runs with one seed produce byte-identical artifacts") {
  ExperimentConfig cfg = parse_config_text(kSmallConfig);
  const fs::path dir_a = fresh_dir("lsb_cli_run_a");
  const fs::path dir_b = fresh_dir("lsb_cli_run_b");

  cfg.run.quiet = true;
  cfg.run.out_dir = dir_a.string();
  CHECK(cmd_run(cfg) == 0);
  cfg.run.out_dir = dir_b.string();
  CHECK(cmd_run(cfg) == 0);

  int compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir_a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), dir_a);
    CHECK(read_file(entry.path()) == read_file(dir_b / rel));
    ++compared;
  }
  CHECK(compared > 0);
  CHECK(fs::exists(dir_a / "lsb1" / "trial_0" / "trace.csv"));
  CHECK(fs::exists(dir_a / "lsb1" / "trial_1" / "ess.csv"));
  CHECK(fs::exists(dir_a / "lsb1" / "aggregate.csv"));
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("run rejects multi-sampler configs and compare rejects singletons") {
  ExperimentConfig cfg = parse_config_text(kSmallConfig);
  cfg.run.quiet = true;
  cfg.run.out_dir = (fs::temp_directory_path() / "lsb_cli_invalid").string();
  CHECK_THROWS_AS(cmd_compare(cfg), ConfigError);

  cfg.samplers.push_back(SamplerSpec::parse("barker"));
  CHECK_THROWS_AS(cmd_run(cfg), ConfigError);
}

TEST_CASE("comparing a sampler against itself yields identical rows") {
  ExperimentConfig cfg = parse_config_text(kSmallConfig);
  cfg.samplers.clear();
  cfg.samplers.push_back(SamplerSpec::parse("barker"));
  cfg.samplers.push_back(SamplerSpec::parse("barker"));
  cfg.run.quiet = true;
  cfg.run.trials = 1;
  const fs::path dir = fresh_dir("lsb_cli_compare");
  cfg.run.out_dir = dir.string();
  CHECK(cmd_compare(cfg) == 0);

  std::istringstream table(read_file(dir / "compare.csv"));
  std::string header, row1, row2;
  std::getline(table, header);
  std::getline(table, row1);
  std::getline(table, row2);
  CHECK(row1 == row2);
  fs::remove_all(dir);
}

TEST_CASE("oracle scopes filter the suites") {
  std::ostringstream out;
  const int rc = oracle::run_scope("grad", out);
  CHECK(rc == 0);
  const std::string text = out.str();
  CHECK(text.find("gradient/") != std::string::npos);
  CHECK(text.find("detailed_balance/") == std::string::npos);
  CHECK(text.find("tv/") == std::string::npos);

  CHECK_THROWS_AS(oracle::run_scope("bogus", out), ConfigError);
}

TEST_CASE("iterations to threshold uses the cross-sampler best") {
  const std::vector<std::vector<double>> traces = {
      {0.0, 5.0, 9.6, 10.0},   // crosses 95% of [0,10] at index 2
      {0.0, 2.0, 4.0, 6.0},    // never crosses: censored at 3
      {10.0, 10.0, 10.0, 10.0}  // starts at the best value: index 0
  };
  const std::vector<double> hit = iterations_to_threshold(traces);
  CHECK(hit[0] == 2.0);
  CHECK(hit[1] == 3.0);
  CHECK(hit[2] == 0.0);
}
