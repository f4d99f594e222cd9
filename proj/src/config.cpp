#include "lsb/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lsb {

std::string SamplerSpec::name() const {
  switch (kind) {
    case Kind::Fixed: return fixed_kind_name(fixed);
    case Kind::Lsb1: return "lsb1";
    case Kind::Lsb2: return "lsb2";
  }
  return "?";
}

SamplerSpec SamplerSpec::parse(const std::string& name) {
  if (name == "lsb1") return {Kind::Lsb1, {}};
  if (name == "lsb2") return {Kind::Lsb2, {}};
  for (FixedBalancingKind k : kFixedKinds) {
    if (name == fixed_kind_name(k)) return {Kind::Fixed, k};
  }
  throw ConfigError("sampler: unknown kind '" + name + "'");
}

namespace {

struct KeyValue {
  std::string section;
  std::string key;
  std::string value;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<KeyValue> parse_key_values(const std::string& text) {
  std::vector<KeyValue> out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    KeyValue kv;
    kv.section = section;
    kv.key = trim(line.substr(0, eq));
    kv.value = trim(line.substr(eq + 1));
    if (kv.key.empty() || kv.value.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    out.push_back(std::move(kv));
  }
  return out;
}

double to_double(const KeyValue& kv) {
  try {
    std::size_t used = 0;
    double v = std::stod(kv.value, &used);
    if (used != kv.value.size()) throw std::invalid_argument(kv.value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(kv.section + "." + kv.key + ": expected a number, got '" + kv.value + "'");
  }
}

long long to_int(const KeyValue& kv) {
  long long v = 0;
  auto [p, ec] = std::from_chars(kv.value.data(), kv.value.data() + kv.value.size(), v);
  if (ec != std::errc() || p != kv.value.data() + kv.value.size())
    throw ConfigError(kv.section + "." + kv.key + ": expected an integer, got '" + kv.value + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!trim(cur).empty()) parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!trim(cur).empty()) parts.push_back(trim(cur));
  return parts;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  for (const KeyValue& kv : parse_key_values(text)) {
    if (kv.section == "target") {
      if (kv.key == "kind") {
        if (kv.value == "ising") {
          cfg.target.kind = TargetSpec::Kind::Ising;
        } else if (kv.value == "uai") {
          cfg.target.kind = TargetSpec::Kind::Uai;
        } else {
          throw ConfigError("target.kind: unknown target '" + kv.value + "'");
        }
      } else if (kv.key == "n") {
        cfg.target.n = static_cast<int>(to_int(kv));
      } else if (kv.key == "lambda") {
        cfg.target.lambda = to_double(kv);
      } else if (kv.key == "mu") {
        cfg.target.mu = to_double(kv);
      } else if (kv.key == "sigma") {
        cfg.target.sigma = to_double(kv);
      } else if (kv.key == "seed") {
        cfg.target.obs_seed = static_cast<std::uint64_t>(to_int(kv));
      } else if (kv.key == "path") {
        cfg.target.path = kv.value;
      } else {
        throw ConfigError("target." + kv.key + ": unknown key");
      }
    } else if (kv.section == "sampler") {
      if (kv.key == "kind" || kv.key == "kinds") {
        for (const std::string& name : split_list(kv.value))
          cfg.samplers.push_back(SamplerSpec::parse(name));
      } else {
        throw ConfigError("sampler." + kv.key + ": unknown key");
      }
    } else if (kv.section == "train") {
      if (kv.key == "eta") {
        cfg.train.eta = to_double(kv);
      } else if (kv.key == "momentum") {
        cfg.train.momentum = to_double(kv);
      } else if (kv.key == "K") {
        cfg.train.iters = static_cast<int>(to_int(kv));
      } else if (kv.key == "N") {
        cfg.train.batch = static_cast<int>(to_int(kv));
      } else if (kv.key == "reg_draws") {
        cfg.train.reg_draws = static_cast<int>(to_int(kv));
      } else if (kv.key == "omega_clamp") {
        const double hi = to_double(kv);
        cfg.train.objective.omega_max = hi;
        cfg.train.objective.omega_min = 1.0 / hi;
      } else {
        throw ConfigError("train." + kv.key + ": unknown key");
      }
    } else if (kv.section == "run") {
      if (kv.key == "iters") {
        cfg.run.iters = to_int(kv);
      } else if (kv.key == "trials") {
        cfg.run.trials = static_cast<int>(to_int(kv));
      } else if (kv.key == "seed") {
        cfg.run.seed = static_cast<std::uint64_t>(to_int(kv));
      } else if (kv.key == "out") {
        cfg.run.out_dir = kv.value;
      } else if (kv.key == "acf_lags") {
        cfg.run.acf_lags = static_cast<int>(to_int(kv));
      } else {
        throw ConfigError("run." + kv.key + ": unknown key");
      }
    } else {
      throw ConfigError("unknown section [" + kv.section + "]");
    }
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void ExperimentConfig::validate() const {
  if (samplers.empty()) throw ConfigError("sampler.kind: at least one sampler is required");
  if (target.kind == TargetSpec::Kind::Ising) {
    if (target.n < 1) throw ConfigError("target.n: lattice side must be >= 1");
    if (target.lambda < 0.0) throw ConfigError("target.lambda: must be nonnegative");
    if (!(target.sigma > 0.0)) throw ConfigError("target.sigma: must be positive");
    if (!std::isfinite(target.mu)) throw ConfigError("target.mu: must be finite");
  } else {
    if (target.path.empty()) throw ConfigError("target.path: required for uai targets");
  }
  if (!(train.eta > 0.0)) throw ConfigError("train.eta: must be positive");
  try {
    train.validate();
  } catch (const InvalidInputError& e) {
    throw ConfigError(std::string("train: ") + e.what());
  }
  if (run.iters < 0) throw ConfigError("run.iters: must be nonnegative");
  if (run.trials < 1) throw ConfigError("run.trials: must be >= 1");
  if (run.acf_lags < 1) throw ConfigError("run.acf_lags: must be >= 1");
  if (run.out_dir.empty()) throw ConfigError("run.out: output directory required");
}

}  // namespace lsb
