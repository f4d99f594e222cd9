#include "lsb/kernel.hpp"

#include <cmath>

namespace lsb {

int ProposalTable::sample(Rng& rng) const {
  const double u = rng.uniform01();
  double cum = 0.0;
  const int n = size();
  for (int i = 0; i < n; ++i) {
    cum += std::exp(log_weights[i] - log_z);
    if (u < cum) return i;
  }
  return n - 1;  // rounding underflow: fall back to the last move
}

namespace {

template <typename PerMove>
void enumerate_moves(const TargetModel& target, const DiscreteState& x, ProposalTable& t,
                     const ProposalClamp& clamp, PerMove&& per_move) {
  const int nvars = target.num_vars();
  t.var_offset.resize(nvars);
  int count = 0;
  for (int v = 0; v < nvars; ++v) {
    t.var_offset[v] = count;
    count += target.cardinality(v) - 1;
  }
  t.moves.reserve(count);
  t.delta_logp.reserve(count);
  t.log_weights.reserve(count);
  for (int v = 0; v < nvars; ++v) {
    for (int value = 0; value < target.cardinality(v); ++value) {
      if (value == x[v]) continue;
      const double delta = target.delta_log_prob(x, v, value);
      t.moves.push_back({v, value});
      t.delta_logp.push_back(delta);
      per_move(delta, clamp);
    }
  }
  t.log_z = log_sum_exp(t.log_weights);
}

}  // namespace

ProposalTable build_proposal(const TargetModel& target, const DiscreteState& x,
                             const BalancingFunction& g, const ProposalClamp& clamp) {
  target.require_valid_state(x);
  ProposalTable t;
  enumerate_moves(target, x, t, clamp, [&](double delta, const ProposalClamp& c) {
    t.log_weights.push_back(std::clamp(g.log_g(delta), c.floor, c.cap));
  });
  return t;
}

ProposalTableGrad build_proposal_grad(const TargetModel& target, const DiscreteState& x,
                                      const BalancingFunction& g, const ProposalClamp& clamp) {
  target.require_valid_state(x);
  ProposalTableGrad tg;
  tg.grad_offset.push_back(0);
  enumerate_moves(target, x, tg.table, clamp, [&](double delta, const ProposalClamp& c) {
    std::size_t before = tg.entries.size();
    const double lg = g.log_g_grad(delta, tg.entries);
    if (lg <= c.floor || lg >= c.cap) {
      tg.entries.resize(before);  // clamped weight: zero subgradient
      tg.table.log_weights.push_back(std::clamp(lg, c.floor, c.cap));
    } else {
      tg.table.log_weights.push_back(lg);
    }
    tg.grad_offset.push_back(static_cast<int>(tg.entries.size()));
  });
  // d log_z / d theta = sum_i Q(i|x) * d log_weights[i] / d theta
  tg.dlog_z.assign(g.param_count(), 0.0);
  for (int i = 0; i < tg.table.size(); ++i) {
    const double q = std::exp(tg.table.log_weights[i] - tg.table.log_z);
    for (int e = tg.grad_offset[i]; e < tg.grad_offset[i + 1]; ++e)
      tg.dlog_z[tg.entries[e].param] += q * tg.entries[e].value;
  }
  return tg;
}

void ProposalTableGrad::add_dlog_prob(int move, double scale, std::vector<double>& acc) const {
  for (int e = grad_offset[move]; e < grad_offset[move + 1]; ++e)
    acc[entries[e].param] += scale * entries[e].value;
  for (std::size_t p = 0; p < dlog_z.size(); ++p) acc[p] -= scale * dlog_z[p];
}

double log_accept_simplified(double log_z_x, double log_z_xp) {
  return std::min(0.0, log_z_x - log_z_xp);
}

StepOutcome mh_step(const TargetModel& target, DiscreteState& state, const BalancingFunction& g,
                    Rng& rng, const ProposalClamp& clamp) {
  const ProposalTable fwd = build_proposal(target, state, g, clamp);
  const int idx = fwd.sample(rng);

  StepOutcome out;
  out.proposed = fwd.moves[idx];
  out.delta_logp = fwd.delta_logp[idx];
  out.log_q_fwd = fwd.log_prob(idx);

  const int old_value = state[out.proposed.variable];
  DiscreteState proposed = apply_move(state, out.proposed);
  const ProposalTable bwd = build_proposal(target, proposed, g, clamp);
  const int rev = bwd.move_index(out.proposed.variable, old_value, out.proposed.new_value);
  out.log_q_bwd = bwd.log_prob(rev);

  out.log_alpha = std::min(0.0, out.delta_logp + out.log_q_bwd - out.log_q_fwd);
  out.accepted =
      out.log_alpha >= 0.0 || std::log(1.0 - rng.uniform01()) < out.log_alpha;  // u in (0,1]
  if (out.accepted) state = std::move(proposed);
  return out;
}

double ChainTrace::accept_rate() const {
  if (accepted.empty()) return 0.0;
  double n = 0.0;
  for (std::uint8_t a : accepted) n += a;
  return n / static_cast<double>(accepted.size());
}

ChainTrace run_chain(const TargetModel& target, const BalancingFunction& g, DiscreteState& state,
                     std::int64_t iters, Rng& rng, const ChainOptions& opts) {
  if (iters < 0) throw InvalidInputError("iteration count must be nonnegative");
  ChainTrace trace;
  trace.logp.reserve(iters + 1);
  trace.accepted.reserve(iters);

  double logp = target.log_prob(state);
  trace.logp.push_back(logp);
  for (std::int64_t k = 1; k <= iters; ++k) {
    const StepOutcome out = mh_step(target, state, g, rng, opts.clamp);
    if (out.accepted) {
      logp += out.delta_logp;
      if (!std::isfinite(logp)) logp = target.log_prob(state);
    }
    if (opts.resync_every > 0 && k % opts.resync_every == 0) {
      const double full = target.log_prob(state);
      if (std::isfinite(full) && std::abs(full - logp) > opts.drift_tolerance)
        throw InternalError("incremental log-prob drifted from full evaluation");
      logp = full;
    }
    trace.logp.push_back(logp);
    trace.accepted.push_back(out.accepted ? 1 : 0);
  }
  return trace;
}

}  // namespace lsb
