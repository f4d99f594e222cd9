#ifndef LSB_CONFIG_HPP
#define LSB_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lsb/adapt.hpp"

namespace lsb {

// Which balancing function an experiment runs.
struct SamplerSpec {
  enum class Kind { Fixed, Lsb1, Lsb2 };
  Kind kind = Kind::Fixed;
  FixedBalancingKind fixed = FixedBalancingKind::Barker;

  std::string name() const;
  static SamplerSpec parse(const std::string& name);  // throws ConfigError
};

struct TargetSpec {
  enum class Kind { Ising, Uai };
  Kind kind = Kind::Ising;
  // ising
  int n = 30;
  double lambda = 0.0;
  double mu = 1.0;
  double sigma = 3.0;
  std::optional<std::uint64_t> obs_seed;  // defaults to a stream of the master seed
  // uai
  std::string path;
};

struct RunSpec {
  std::int64_t iters = 30000;  // sampling-phase iterations
  int trials = 1;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  int acf_lags = 200;
  bool quiet = false;
};

// Flat key=value text with [section] headers; `#` comments.
struct ExperimentConfig {
  TargetSpec target;
  std::vector<SamplerSpec> samplers;
  TrainConfig train;
  RunSpec run;

  void validate() const;  // throws ConfigError naming the offending field
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

}  // namespace lsb

#endif  // LSB_CONFIG_HPP
