#ifndef LSB_ADAPT_HPP
#define LSB_ADAPT_HPP

#include <functional>
#include <memory>
#include <vector>

#include "lsb/balancing.hpp"
#include "lsb/kernel.hpp"
#include "lsb/target.hpp"

namespace lsb {

// Balancing function with learnable parameters. The adaptation loop owns a
// single mutable instance and treats it as an immutable snapshot between
// updates; `version()` increments on every mutation so the loop can assert
// no parameters were touched while an iteration's proposals were in flight.
class TrainableBalancing : public BalancingFunction {
 public:
  virtual std::vector<double> params_vector() const = 0;
  virtual void set_params_vector(const std::vector<double>& params) = 0;
  virtual std::uint64_t version() const = 0;
  virtual BalancingSpec spec() const = 0;

  // Monotonicity regularizer term: averaged penalty over `draws` points
  // t ~ U(0,2], accumulated into (value, grad). No-op by default.
  virtual void add_regularizer(Rng&, int draws, double& value, std::vector<double>& grad) const;
};

class Lsb1Trainable final : public TrainableBalancing {
 public:
  explicit Lsb1Trainable(Lsb1Params params = {}) : impl_(std::move(params)) {}

  int param_count() const override { return impl_.param_count(); }
  double log_g(double delta) const override { return impl_.log_g(delta); }
  double log_g_grad(double delta, std::vector<GradEntry>& out) const override {
    return impl_.log_g_grad(delta, out);
  }

  std::vector<double> params_vector() const override;
  void set_params_vector(const std::vector<double>& params) override;
  std::uint64_t version() const override { return impl_.params().version(); }
  BalancingSpec spec() const override { return impl_.params(); }

  const Lsb1Params& params() const { return impl_.params(); }

 private:
  Lsb1Balancing impl_;
};

class Lsb2Trainable final : public TrainableBalancing {
 public:
  explicit Lsb2Trainable(MonotonicNet net, Lsb2EvalOptions opts = {})
      : impl_(std::move(net), opts) {}

  int param_count() const override { return impl_.param_count(); }
  double log_g(double delta) const override { return impl_.log_g(delta); }
  double log_g_grad(double delta, std::vector<GradEntry>& out) const override {
    return impl_.log_g_grad(delta, out);
  }
  double tie_margin(double delta) const override { return impl_.tie_margin(delta); }

  std::vector<double> params_vector() const override { return impl_.net().params(); }
  void set_params_vector(const std::vector<double>& params) override {
    impl_.net().set_params(params);
  }
  std::uint64_t version() const override { return impl_.net().version(); }
  BalancingSpec spec() const override { return impl_.net(); }

  void add_regularizer(Rng& rng, int draws, double& value,
                       std::vector<double>& grad) const override;

  const MonotonicNet& net() const { return impl_.net(); }

 private:
  Lsb2Balancing impl_;
};

// ---- objective --------------------------------------------------------------

struct ObjectiveOptions {
  double omega_min = 1e-3;  // importance-weight clamp
  double omega_max = 1e3;
  ProposalClamp clamp;
};

// Single-sample importance-weighted estimate of the objective at one state:
//   omega * A(x',x) * [log A(x',x) + log Q_theta(x'|x) - log p~(x')]
// with x' drawn from the reference proposal Q_theta0(.|x) and
// omega = Q_theta(x'|x) / Q_theta0(x'|x), clamped.
struct ObjectiveSample {
  double j_value = 0.0;
  std::vector<double> grad;  // d j / d theta, dense
  double omega = 1.0;
  double log_alpha = 0.0;  // normalizer-ratio acceptance used by the objective
  bool valid = true;       // false: non-finite estimate, skipped by averages

  // The drawn proposal, reusable as one kernel step of the chain at x.
  Move move;
  double delta_logp = 0.0;
  double log_alpha_chain = 0.0;  // general-form acceptance under theta0
};

ObjectiveSample estimate_J(const BalancingFunction& theta, const BalancingFunction& theta0,
                           const TargetModel& target, const DiscreteState& x, Rng& rng,
                           const ObjectiveOptions& opts = {});

// ---- training ----------------------------------------------------------------

struct TrainConfig {
  double eta = 1e-4;       // SGD learning rate
  double momentum = 0.9;
  int iters = 2000;        // adaptation iterations (K)
  int batch = 30;          // chains (N)
  int reg_draws = 4;       // monotonicity penalty samples per step
  ObjectiveOptions objective;
  int checkpoint_every = 500;

  void validate() const;
};

// N current chain states plus the per-step refreshed init-distribution states.
struct ChainBatch {
  std::vector<DiscreteState> x0;
  std::vector<DiscreteState> x_init;
  std::vector<Rng> rngs;

  static ChainBatch initialize(const TargetModel& target, int n, std::uint64_t master_seed);
};

// One averaged objective evaluation over the batch: both expectation terms,
// each averaged over its valid samples, plus the regularizer.
struct ObjectiveStep {
  double j_hat = 0.0;
  std::vector<double> grad;
  int skipped = 0;
  int total = 0;
  std::vector<ObjectiveSample> mix_samples;  // per-chain samples at x0
};

ObjectiveStep objective_step(const TrainableBalancing& theta, const BalancingFunction& theta0,
                             const TargetModel& target, ChainBatch& batch, const TrainConfig& cfg,
                             Rng& reg_rng);

struct TrainTraceRow {
  double j_hat = 0.0;
  double mean_logp = 0.0;
  int skipped = 0;
};

struct TrainResult {
  std::vector<TrainTraceRow> trace;
  std::vector<DiscreteState> final_states;
  int total_samples = 0;
  int skipped_samples = 0;
};

using CheckpointFn = std::function<void(int iter, const TrainableBalancing& theta)>;
using StateObserverFn = std::function<void(int iter, const std::vector<DiscreteState>& x0)>;

// SGD-with-momentum adaptation: each iteration redraws the init batch, averages
// one-sample objective estimates across chains, updates theta, then advances
// every chain by the accept/reject decision of the proposal it already drew
// under the iteration's snapshot.
TrainResult train(const TargetModel& target, TrainableBalancing& theta, const TrainConfig& cfg,
                  std::uint64_t master_seed, const CheckpointFn& checkpoint = {},
                  const StateObserverFn& observer = {});

}  // namespace lsb

#endif  // LSB_ADAPT_HPP
