#include "lsb/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "lsb/io.hpp"
#include "lsb/ising.hpp"
#include "lsb/uai.hpp"

namespace lsb {

namespace {

constexpr std::uint64_t kObsStream = 0x6f627365;
constexpr std::uint64_t kNetInitStream = 0x6e657469;
constexpr std::uint64_t kSamplingStream = 0x73616d70;

std::uint64_t trial_seed(const ExperimentConfig& cfg, int trial) {
  return derive_seed(cfg.run.seed, 1000 + static_cast<std::uint64_t>(trial));
}

std::string trial_dir(const ExperimentConfig& cfg, const std::string& label, int trial) {
  std::ostringstream dir;
  dir << cfg.run.out_dir << "/" << label << "/trial_" << trial;
  return dir.str();
}

// Directory labels for the samplers of a comparison: the sampler name, with an
// index suffix when the same sampler appears twice.
std::vector<std::string> sampler_labels(const std::vector<SamplerSpec>& samplers) {
  std::vector<std::string> labels;
  for (std::size_t s = 0; s < samplers.size(); ++s) {
    std::string label = samplers[s].name();
    for (std::size_t t = 0; t < samplers.size(); ++t) {
      if (t != s && samplers[t].name() == label) {
        label += "_" + std::to_string(s);
        break;
      }
    }
    labels.push_back(std::move(label));
  }
  return labels;
}

// Burn-in for a fixed balancing function: N chains advanced in lockstep, one
// kernel step per iteration, mirroring the adaptive loop's chain schedule.
std::vector<double> fixed_burnin(const TargetModel& target, const BalancingFunction& g,
                                 ChainBatch& batch, int iters) {
  std::vector<double> trace;
  trace.reserve(iters);
  const int n = static_cast<int>(batch.x0.size());
  for (int k = 0; k < iters; ++k) {
    double mean_logp = 0.0;
    for (int i = 0; i < n; ++i) {
      mh_step(target, batch.x0[i], g, batch.rngs[i]);
      mean_logp += target.log_prob(batch.x0[i]);
    }
    trace.push_back(mean_logp / n);
  }
  return trace;
}

double batch_mean_logp(const TargetModel& target, const std::vector<DiscreteState>& states) {
  double mean = 0.0;
  for (const DiscreteState& x : states) mean += target.log_prob(x);
  return mean / static_cast<double>(states.size());
}

struct Aggregate {
  double mean = 0.0;
  double sd = 0.0;
};

Aggregate aggregate_of(const std::vector<double>& values) {
  Aggregate a;
  const double n = static_cast<double>(values.size());
  for (double v : values) a.mean += v;
  a.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.sd = std::sqrt(ss / (n - 1.0));
  }
  return a;
}

}  // namespace

std::unique_ptr<TargetModel> build_target(const ExperimentConfig& cfg, int trial) {
  if (cfg.target.kind == TargetSpec::Kind::Uai)
    return std::make_unique<FactorGraphModel>(parse_uai(cfg.target.path));

  const int n = cfg.target.n;
  ObservationSpec obs;
  obs.mu = cfg.target.mu;
  obs.sigma = cfg.target.sigma;
  obs.ground_truth = square_ground_truth(n);
  const std::uint64_t base = cfg.target.obs_seed
                                 ? *cfg.target.obs_seed
                                 : derive_seed(cfg.run.seed, kObsStream);
  obs.seed = derive_seed(base, static_cast<std::uint64_t>(trial));
  return std::make_unique<IsingModel>(n, cfg.target.lambda, generate_observation(obs));
}

TrialResult run_trial(const ExperimentConfig& cfg, const SamplerSpec& sampler, int trial,
                      bool write_files) {
  return run_trial(cfg, sampler, trial, write_files, sampler.name());
}

TrialResult run_trial(const ExperimentConfig& cfg, const SamplerSpec& sampler, int trial,
                      bool write_files, const std::string& dir_label) {
  const std::unique_ptr<TargetModel> target = build_target(cfg, trial);
  const std::uint64_t seed = trial_seed(cfg, trial);
  const std::string dir = trial_dir(cfg, dir_label, trial);

  TrialResult result;
  std::unique_ptr<BalancingFunction> sampling_g;
  DiscreteState state;

  if (sampler.kind == SamplerSpec::Kind::Fixed) {
    ChainBatch batch = ChainBatch::initialize(*target, cfg.train.batch, seed);
    result.burnin_trace.push_back(batch_mean_logp(*target, batch.x0));
    FixedBalancing g(sampler.fixed);
    std::vector<double> trace = fixed_burnin(*target, g, batch, cfg.train.iters);
    result.burnin_trace.insert(result.burnin_trace.end(), trace.begin(), trace.end());
    state = batch.x0[0];
    sampling_g = std::make_unique<FixedBalancing>(sampler.fixed);
    if (write_files) {
      std::ostringstream text;
      save_balancing(text, BalancingSpec(sampler.fixed));
      atomic_write(dir + "/params.txt", text.str());
    }
  } else {
    std::unique_ptr<TrainableBalancing> trainable;
    if (sampler.kind == SamplerSpec::Kind::Lsb1) {
      trainable = std::make_unique<Lsb1Trainable>();
    } else {
      Rng net_rng(derive_seed(seed, kNetInitStream));
      trainable = std::make_unique<Lsb2Trainable>(MonotonicNet(20, 20, net_rng));
    }
    // Equal seeding reproduces the batch train() draws internally, so the
    // burn-in trace can start from the true initial level.
    result.burnin_trace.push_back(
        batch_mean_logp(*target, ChainBatch::initialize(*target, cfg.train.batch, seed).x0));

    CheckpointFn checkpoint;
    if (write_files) {
      checkpoint = [&](int iter, const TrainableBalancing& theta) {
        char name[32];
        std::snprintf(name, sizeof name, "/params_%06d.txt", iter);
        std::ostringstream text;
        save_balancing(text, theta.spec());
        atomic_write(dir + name, text.str());
      };
    }
    TrainResult tr = train(*target, *trainable, cfg.train, seed, checkpoint);
    for (const TrainTraceRow& row : tr.trace) result.burnin_trace.push_back(row.mean_logp);
    result.total_samples = tr.total_samples;
    result.skipped_samples = tr.skipped_samples;
    if (write_files) {
      atomic_write(dir + "/train_trace.csv", train_trace_csv(tr.trace));
      std::ostringstream text;
      save_balancing(text, trainable->spec());
      atomic_write(dir + "/params.txt", text.str());
    }
    if (sampler.kind == SamplerSpec::Kind::Lsb1) {
      const auto& lsb1 = static_cast<const Lsb1Trainable&>(*trainable);
      result.lsb1_weights = lsb1.params().weights();
      result.has_lsb1_weights = true;
    }
    state = tr.final_states[0];
    sampling_g = make_balancing(trainable->spec());
  }
  result.final_burnin_logp = result.burnin_trace.back();

  // Sampling phase: parameters frozen, single chain, fresh stream.
  Rng sampling_rng(derive_seed(seed, kSamplingStream));
  ChainTrace trace = run_chain(*target, *sampling_g, state, cfg.run.iters, sampling_rng);
  result.accept_rate = trace.accept_rate();
  result.final_logp = trace.logp.back();
  result.ess = effective_sample_size(trace.logp, 1000);

  if (write_files) {
    atomic_write(dir + "/burnin.csv", burnin_csv(result.burnin_trace));
    atomic_write(dir + "/trace.csv", chain_trace_csv(trace));
    const int lags = std::min<int>(cfg.run.acf_lags, static_cast<int>(trace.logp.size()) - 1);
    atomic_write(dir + "/acf.csv", acf_csv(autocorrelation(trace.logp, lags)));
    atomic_write(dir + "/ess.csv", ess_csv(result.ess));
  }
  return result;
}

std::vector<double> iterations_to_threshold(const std::vector<std::vector<double>>& traces,
                                            double fraction) {
  double best = kNegInf;
  for (const auto& trace : traces)
    for (double v : trace) best = std::max(best, v);

  std::vector<double> out;
  out.reserve(traces.size());
  for (const auto& trace : traces) {
    const double init = trace.front();
    const double threshold = init + fraction * (best - init);
    double hit = static_cast<double>(trace.size() - 1);  // censored at the end
    for (std::size_t k = 0; k < trace.size(); ++k) {
      if (trace[k] >= threshold) {
        hit = static_cast<double>(k);
        break;
      }
    }
    out.push_back(hit);
  }
  return out;
}

int max_threads() {
  if (const char* env = std::getenv("LSB_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for_index(int total, int threads, const std::function<void(int)>& fn) {
  threads = std::min(threads, total);
  if (threads <= 1) {
    for (int i = 0; i < total; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mu;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= total) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

std::vector<SamplerOutcome> run_grid(const ExperimentConfig& cfg) {
  const int samplers = static_cast<int>(cfg.samplers.size());
  const int trials = cfg.run.trials;
  const std::vector<std::string> labels = sampler_labels(cfg.samplers);
  std::vector<SamplerOutcome> outcomes(samplers);
  for (int s = 0; s < samplers; ++s) {
    outcomes[s].spec = cfg.samplers[s];
    outcomes[s].trials.resize(trials);
  }
  parallel_for_index(samplers * trials, max_threads(), [&](int task) {
    const int s = task / trials;
    const int trial = task % trials;
    outcomes[s].trials[trial] = run_trial(cfg, cfg.samplers[s], trial, true, labels[s]);
  });
  return outcomes;
}

std::string aggregate_csv(const SamplerOutcome& outcome) {
  std::vector<double> ess_raw, ess_per, tau, accept, final_logp;
  for (const TrialResult& t : outcome.trials) {
    ess_raw.push_back(t.ess.ess);
    ess_per.push_back(t.ess.ess_per);
    tau.push_back(t.ess.tau);
    accept.push_back(t.accept_rate);
    final_logp.push_back(t.final_logp);
  }
  std::ostringstream out;
  out << "field,mean,sd\n";
  auto row = [&](const char* name, const std::vector<double>& v) {
    const Aggregate a = aggregate_of(v);
    out << name << ',' << format_double(a.mean) << ',' << format_double(a.sd) << '\n';
  };
  row("ess_raw", ess_raw);
  row("ess_per_1000", ess_per);
  row("tau", tau);
  row("accept_rate", accept);
  row("final_logp", final_logp);
  return out.str();
}

void write_aggregates(const ExperimentConfig& cfg, const std::vector<SamplerOutcome>& outcomes) {
  const std::vector<std::string> labels = sampler_labels(cfg.samplers);
  for (std::size_t s = 0; s < outcomes.size(); ++s)
    atomic_write(cfg.run.out_dir + "/" + labels[s] + "/aggregate.csv",
                 aggregate_csv(outcomes[s]));
}

}  // namespace

int cmd_run(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.samplers.size() != 1)
    throw ConfigError("sampler.kind: run expects exactly one sampler (use compare for several)");
  const std::vector<SamplerOutcome> outcomes = run_grid(cfg);
  write_aggregates(cfg, outcomes);
  if (!cfg.run.quiet) {
    const SamplerOutcome& o = outcomes[0];
    std::vector<double> ess_per;
    for (const TrialResult& t : o.trials) ess_per.push_back(t.ess.ess_per);
    const Aggregate a = aggregate_of(ess_per);
    std::cout << o.spec.name() << ": ess_per_1000 = " << a.mean << " +- " << a.sd << " over "
              << cfg.run.trials << " trial(s)\n";
  }
  return 0;
}

int cmd_compare(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.samplers.size() < 2)
    throw ConfigError("sampler.kinds: compare needs at least two samplers");
  const std::vector<SamplerOutcome> outcomes = run_grid(cfg);
  write_aggregates(cfg, outcomes);

  // Iterations-to-threshold is relative to the best burn-in level reached by
  // any sampler within the same (paired-seed) trial.
  const int samplers = static_cast<int>(outcomes.size());
  std::vector<std::vector<double>> itt(samplers);
  for (int trial = 0; trial < cfg.run.trials; ++trial) {
    std::vector<std::vector<double>> traces;
    traces.reserve(samplers);
    for (const SamplerOutcome& o : outcomes) traces.push_back(o.trials[trial].burnin_trace);
    const std::vector<double> hit = iterations_to_threshold(traces);
    for (int s = 0; s < samplers; ++s) itt[s].push_back(hit[s]);
  }

  std::ostringstream table;
  table << "sampler,ess_per_1000_mean,ess_per_1000_sd,final_burnin_logp_mean,"
           "iters_to_threshold_mean\n";
  for (int s = 0; s < samplers; ++s) {
    std::vector<double> ess_per, final_burnin;
    for (const TrialResult& t : outcomes[s].trials) {
      ess_per.push_back(t.ess.ess_per);
      final_burnin.push_back(t.final_burnin_logp);
    }
    const Aggregate e = aggregate_of(ess_per);
    const Aggregate b = aggregate_of(final_burnin);
    const Aggregate h = aggregate_of(itt[s]);
    table << outcomes[s].spec.name() << ',' << format_double(e.mean) << ','
          << format_double(e.sd) << ',' << format_double(b.mean) << ','
          << format_double(h.mean) << '\n';
  }
  atomic_write(cfg.run.out_dir + "/compare.csv", table.str());
  if (!cfg.run.quiet) std::cout << table.str();
  return 0;
}

}  // namespace lsb
