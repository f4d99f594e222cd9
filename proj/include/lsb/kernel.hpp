#ifndef LSB_KERNEL_HPP
#define LSB_KERNEL_HPP

#include <cstdint>
#include <vector>

#include "lsb/balancing.hpp"
#include "lsb/state.hpp"
#include "lsb/target.hpp"

namespace lsb {

// Per-move log weights are clamped to this band. The floor keeps every
// neighbor reachable even when g evaluates to 0 (zero-probability moves);
// the cap keeps the normalizer finite when a move leaves a zero-probability
// state. Both can be widened to +-inf to disable.
struct ProposalClamp {
  double floor = -700.0;
  double cap = 700.0;
};

// Materialized Hamming-1 proposal at a state: every single-variable move,
// its log weight log g(delta), and the log normalizer.
struct ProposalTable {
  std::vector<Move> moves;          // variable-major, value-ascending
  std::vector<double> delta_logp;   // target log-ratio per move
  std::vector<double> log_weights;  // clamped log g values
  double log_z = 0.0;
  std::vector<int> var_offset;      // first move index per variable

  int size() const { return static_cast<int>(moves.size()); }
  double log_prob(int move) const { return log_weights[move] - log_z; }

  // Index of (var -> value) given the table state's current value at var.
  int move_index(int var, int value, int current_value) const {
    return var_offset[var] + (value < current_value ? value : value - 1);
  }

  // Inverse-CDF draw from exp(log_weights - log_z).
  int sample(Rng& rng) const;
};

ProposalTable build_proposal(const TargetModel& target, const DiscreteState& x,
                             const BalancingFunction& g, const ProposalClamp& clamp = {});

// Proposal table plus d log_weight / d theta per move (zero where the clamp
// is active) and the accumulated d log_z / d theta.
struct ProposalTableGrad {
  ProposalTable table;
  std::vector<int> grad_offset;    // size moves+1; entries for move i
  std::vector<GradEntry> entries;  // d log_weights[i] / d theta, sparse
  std::vector<double> dlog_z;      // dense, length = parameter count

  // Accumulates d log Q(move|x) / d theta into a dense vector.
  void add_dlog_prob(int move, double scale, std::vector<double>& acc) const;
};

ProposalTableGrad build_proposal_grad(const TargetModel& target, const DiscreteState& x,
                                      const BalancingFunction& g,
                                      const ProposalClamp& clamp = {});

// min{0, log_Z(x) - log_Z(x')}: the acceptance in normalizer-ratio form,
// exact for balancing g.
double log_accept_simplified(double log_z_x, double log_z_xp);

// One Metropolis-Hastings step outcome.
struct StepOutcome {
  Move proposed;
  bool accepted = false;
  double log_alpha = 0.0;  // general-form min{0, delta + q_bwd - q_fwd}
  double log_q_fwd = 0.0;
  double log_q_bwd = 0.0;
  double delta_logp = 0.0;
};

// Samples a move from the locally balanced proposal, builds the reverse table
// at the proposed state, and accepts with the general MH probability. On
// rejection the state is unchanged.
StepOutcome mh_step(const TargetModel& target, DiscreteState& state, const BalancingFunction& g,
                    Rng& rng, const ProposalClamp& clamp = {});

// Per-iteration record of a chain run. logp has iters+1 entries (index 0 is
// the initial state); accepted has iters entries.
struct ChainTrace {
  std::vector<double> logp;
  std::vector<std::uint8_t> accepted;

  double accept_rate() const;
};

struct ChainOptions {
  ProposalClamp clamp;
  std::int64_t resync_every = 10000;  // full log-prob recomputation cadence
  double drift_tolerance = 1e-6;
};

// Runs iters kernel steps, tracking log p~ incrementally from accepted deltas
// and resynchronizing against a full evaluation every resync_every steps.
ChainTrace run_chain(const TargetModel& target, const BalancingFunction& g, DiscreteState& state,
                     std::int64_t iters, Rng& rng, const ChainOptions& opts = {});

}  // namespace lsb

#endif  // LSB_KERNEL_HPP
