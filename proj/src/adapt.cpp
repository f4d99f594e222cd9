#include "lsb/adapt.hpp"

#include <cmath>

namespace lsb {

void TrainableBalancing::add_regularizer(Rng&, int, double&, std::vector<double>&) const {}

std::vector<double> Lsb1Trainable::params_vector() const {
  const auto& t = impl_.params().theta();
  return std::vector<double>(t.begin(), t.end());
}

void Lsb1Trainable::set_params_vector(const std::vector<double>& params) {
  if (params.size() != 4) throw InvalidInputError("lsb1 expects 4 parameters");
  impl_.params().set_theta({params[0], params[1], params[2], params[3]});
}

void Lsb2Trainable::add_regularizer(Rng& rng, int draws, double& value,
                                    std::vector<double>& grad) const {
  if (draws <= 0) return;
  const double scale = 1.0 / draws;
  for (int r = 0; r < draws; ++r) {
    const double t = 2.0 * (1.0 - rng.uniform01());  // (0, 2]
    PenaltyResult pen = monotonicity_penalty(impl_.net(), t);
    value += scale * pen.value;
    for (const GradEntry& e : pen.grad) grad[e.param] += scale * e.value;
  }
}

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

ObjectiveSample estimate_J(const BalancingFunction& theta, const BalancingFunction& theta0,
                           const TargetModel& target, const DiscreteState& x, Rng& rng,
                           const ObjectiveOptions& opts) {
  const bool shared = &theta == &theta0;
  const int nparams = theta.param_count();

  ProposalTableGrad fwd = build_proposal_grad(target, x, theta, opts.clamp);
  ProposalTable ref_storage;
  const ProposalTable& ref =
      shared ? fwd.table : (ref_storage = build_proposal(target, x, theta0, opts.clamp));

  const int idx = ref.sample(rng);
  ObjectiveSample s;
  s.move = ref.moves[idx];
  s.delta_logp = ref.delta_logp[idx];

  const DiscreteState xp = apply_move(x, s.move);
  ProposalTableGrad bwd = build_proposal_grad(target, xp, theta, opts.clamp);

  const double log_q_theta = fwd.table.log_prob(idx);
  const double log_q_ref = ref.log_prob(idx);
  const double log_omega = log_q_theta - log_q_ref;  // exactly 0 when theta == theta0
  double omega = std::exp(log_omega);
  const bool omega_clamped = omega < opts.omega_min || omega > opts.omega_max;
  omega = std::clamp(omega, opts.omega_min, opts.omega_max);
  s.omega = omega;

  const double log_zx = fwd.table.log_z;
  const double log_zxp = bwd.table.log_z;
  s.log_alpha = log_accept_simplified(log_zx, log_zxp);
  const double a = std::exp(s.log_alpha);

  const double logp_xp = target.log_prob(x) + s.delta_logp;
  const double bracket = s.log_alpha + log_q_theta - logp_xp;

  // The chain step this sample doubles as: accept x' with the general ratio
  // under the reference parameters (theta's tables when shared).
  {
    ProposalTable bwd_ref_storage;
    const ProposalTable& bwd_ref =
        shared ? bwd.table : (bwd_ref_storage = build_proposal(target, xp, theta0, opts.clamp));
    const int rev = bwd_ref.move_index(s.move.variable, x[s.move.variable], s.move.new_value);
    s.log_alpha_chain = std::min(0.0, s.delta_logp + bwd_ref.log_prob(rev) - log_q_ref);
  }

  s.grad.assign(nparams, 0.0);
  if (!std::isfinite(bracket)) {
    // p~(x') = 0 (or a clamp-saturated proposal): no finite estimate exists.
    s.j_value = 0.0;
    s.valid = false;
    return s;
  }
  s.j_value = omega * a * bracket;  // a > 0 under the default clamp; a*log a -> 0 otherwise

  // Gradient: through omega (unless clamped), through A in normalizer-ratio
  // form (subgradient 0 at the min's tie), and through log Q_theta.
  if (nparams > 0) {
    std::vector<double> dlog_q(nparams, 0.0);
    fwd.add_dlog_prob(idx, 1.0, dlog_q);

    const bool alpha_active = log_zx - log_zxp < 0.0;
    const double j_scale = omega * a;
    for (int p = 0; p < nparams; ++p) {
      double dlog_alpha = alpha_active ? fwd.dlog_z[p] - bwd.dlog_z[p] : 0.0;
      double d = j_scale * ((bracket + 1.0) * dlog_alpha + dlog_q[p]);
      if (!omega_clamped) d += omega * dlog_q[p] * a * bracket;
      s.grad[p] = d;
    }
  }

  s.valid = std::isfinite(s.j_value) && all_finite(s.grad);
  return s;
}

void TrainConfig::validate() const {
  if (eta < 0.0) throw InvalidInputError("learning rate must be nonnegative");
  if (momentum < 0.0 || momentum >= 1.0) throw InvalidInputError("momentum must be in [0,1)");
  if (iters < 0) throw InvalidInputError("training iterations must be nonnegative");
  if (batch < 1) throw InvalidInputError("batch size must be >= 1");
  if (reg_draws < 0) throw InvalidInputError("regularizer draw count must be nonnegative");
  if (!(objective.omega_min > 0.0) || objective.omega_max < objective.omega_min)
    throw InvalidInputError("omega clamp bounds must satisfy 0 < min <= max");
}

ChainBatch ChainBatch::initialize(const TargetModel& target, int n, std::uint64_t master_seed) {
  ChainBatch batch;
  Rng init_rng(derive_seed(master_seed, 0x696e6974));  // shared init-draw stream
  batch.x0.reserve(n);
  batch.x_init.reserve(n);
  batch.rngs.reserve(n);
  for (int i = 0; i < n; ++i) {
    batch.x0.push_back(target.uniform_state(init_rng));
    batch.x_init.push_back(batch.x0.back());
    batch.rngs.emplace_back(master_seed + static_cast<std::uint64_t>(i));
  }
  return batch;
}

ObjectiveStep objective_step(const TrainableBalancing& theta, const BalancingFunction& theta0,
                             const TargetModel& target, ChainBatch& batch, const TrainConfig& cfg,
                             Rng& reg_rng) {
  const int n = static_cast<int>(batch.x0.size());
  const int nparams = theta.param_count();
  ObjectiveStep step;
  step.grad.assign(nparams, 0.0);
  step.mix_samples.reserve(n);

  double j_init = 0.0, j_mix = 0.0;
  std::vector<double> g_init(nparams, 0.0), g_mix(nparams, 0.0);
  int valid_init = 0, valid_mix = 0;

  for (int i = 0; i < n; ++i) {
    ObjectiveSample si = estimate_J(theta, theta0, target, batch.x_init[i], batch.rngs[i],
                                    cfg.objective);
    if (si.valid) {
      j_init += si.j_value;
      for (int p = 0; p < nparams; ++p) g_init[p] += si.grad[p];
      ++valid_init;
    }
    ObjectiveSample sm =
        estimate_J(theta, theta0, target, batch.x0[i], batch.rngs[i], cfg.objective);
    if (sm.valid) {
      j_mix += sm.j_value;
      for (int p = 0; p < nparams; ++p) g_mix[p] += sm.grad[p];
      ++valid_mix;
    }
    step.mix_samples.push_back(std::move(sm));
  }

  step.total = 2 * n;
  step.skipped = step.total - valid_init - valid_mix;
  if (valid_init + valid_mix == 0) throw Error("objective step: every sample was invalid");

  if (valid_init > 0) {
    step.j_hat += j_init / valid_init;
    for (int p = 0; p < nparams; ++p) step.grad[p] += g_init[p] / valid_init;
  }
  if (valid_mix > 0) {
    step.j_hat += j_mix / valid_mix;
    for (int p = 0; p < nparams; ++p) step.grad[p] += g_mix[p] / valid_mix;
  }

  theta.add_regularizer(reg_rng, cfg.reg_draws, step.j_hat, step.grad);
  return step;
}

TrainResult train(const TargetModel& target, TrainableBalancing& theta, const TrainConfig& cfg,
                  std::uint64_t master_seed, const CheckpointFn& checkpoint,
                  const StateObserverFn& observer) {
  cfg.validate();
  const int nparams = theta.param_count();

  ChainBatch batch = ChainBatch::initialize(target, cfg.batch, master_seed);
  Rng init_rng(derive_seed(master_seed, 0x72656472));  // x_init redraw stream
  Rng reg_rng(derive_seed(master_seed, 0x7265676c));   // regularizer stream

  TrainResult result;
  result.trace.reserve(cfg.iters);
  std::vector<double> velocity(nparams, 0.0);

  for (int k = 1; k <= cfg.iters; ++k) {
    for (int i = 0; i < cfg.batch; ++i) batch.x_init[i] = target.uniform_state(init_rng);

    // theta doubles as the iteration's reference snapshot theta0; the version
    // counter guards against any mid-iteration mutation.
    const std::uint64_t snapshot_version = theta.version();
    ObjectiveStep step = objective_step(theta, theta, target, batch, cfg, reg_rng);
    if (theta.version() != snapshot_version)
      throw InternalError("parameters changed while iteration snapshot was in use");

    // Advance each chain with the proposal drawn for its mixing-term estimate,
    // accepted under the snapshot's general MH ratio.
    double mean_logp = 0.0;
    for (int i = 0; i < cfg.batch; ++i) {
      const ObjectiveSample& s = step.mix_samples[i];
      const bool accept = s.log_alpha_chain >= 0.0 ||
                          std::log(1.0 - batch.rngs[i].uniform01()) < s.log_alpha_chain;
      if (accept) batch.x0[i] = apply_move(batch.x0[i], s.move);
      mean_logp += target.log_prob(batch.x0[i]);
    }
    mean_logp /= cfg.batch;

    if (cfg.eta > 0.0 && nparams > 0) {
      std::vector<double> params = theta.params_vector();
      for (int p = 0; p < nparams; ++p) {
        velocity[p] = cfg.momentum * velocity[p] + step.grad[p];
        params[p] -= cfg.eta * velocity[p];
      }
      theta.set_params_vector(params);
    }

    result.trace.push_back({step.j_hat, mean_logp, step.skipped});
    result.total_samples += step.total;
    result.skipped_samples += step.skipped;
    if (observer) observer(k, batch.x0);
    if (checkpoint && cfg.checkpoint_every > 0 && k % cfg.checkpoint_every == 0)
      checkpoint(k, theta);
  }

  result.final_states = batch.x0;
  return result;
}

}  // namespace lsb
