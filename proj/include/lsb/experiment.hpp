#ifndef LSB_EXPERIMENT_HPP
#define LSB_EXPERIMENT_HPP

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lsb/config.hpp"
#include "lsb/diagnostics.hpp"

namespace lsb {

// One sampler on one trial's target: burn-in (adaptation for lsb1/lsb2, plain
// kernel steps otherwise, N lockstep chains either way), then a frozen
// sampling phase on chain 0 that the mixing diagnostics are computed from.
struct TrialResult {
  EssResult ess;
  double accept_rate = 0.0;
  double final_logp = 0.0;
  double final_burnin_logp = 0.0;
  std::vector<double> burnin_trace;  // mean log p~ across chains; index 0 = init
  int total_samples = 0;             // objective draws (adaptive samplers)
  int skipped_samples = 0;
  std::array<double, 4> lsb1_weights{};  // final mixture weights when lsb1
  bool has_lsb1_weights = false;
};

struct SamplerOutcome {
  SamplerSpec spec;
  std::vector<TrialResult> trials;
};

std::unique_ptr<TargetModel> build_target(const ExperimentConfig& cfg, int trial);

TrialResult run_trial(const ExperimentConfig& cfg, const SamplerSpec& sampler, int trial,
                      bool write_files);
TrialResult run_trial(const ExperimentConfig& cfg, const SamplerSpec& sampler, int trial,
                      bool write_files, const std::string& dir_label);

// First iteration at which each trace exceeds 95% of the gap between its own
// start and the best value any trace attains; censored at the trace end.
std::vector<double> iterations_to_threshold(const std::vector<std::vector<double>>& traces,
                                            double fraction = 0.95);

// Experiment entry points; artifacts land under cfg.run.out_dir.
int cmd_run(const ExperimentConfig& cfg);
int cmd_compare(const ExperimentConfig& cfg);

// Parallelism cap: LSB_THREADS environment variable, else hardware threads.
int max_threads();

// Runs fn(0..total-1) across up to `threads` workers.
void parallel_for_index(int total, int threads, const std::function<void(int)>& fn);

}  // namespace lsb

#endif  // LSB_EXPERIMENT_HPP
