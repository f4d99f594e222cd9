#include "lsb/exact.hpp"

#include <cmath>

namespace lsb {

namespace {
constexpr std::uint64_t kMaxStates = 65536;
}

std::uint64_t state_space_size(const TargetModel& target) {
  std::uint64_t size = 1;
  for (int v = 0; v < target.num_vars(); ++v) {
    size *= static_cast<std::uint64_t>(target.cardinality(v));
    if (size > kMaxStates) throw CapacityError("joint state space exceeds 65536 states");
  }
  return size;
}

std::uint64_t state_to_index(const TargetModel& target, const DiscreteState& x) {
  std::uint64_t idx = 0;
  for (int v = 0; v < target.num_vars(); ++v)
    idx = idx * static_cast<std::uint64_t>(target.cardinality(v)) + x[v];
  return idx;
}

DiscreteState index_to_state(const TargetModel& target, std::uint64_t index) {
  const int n = target.num_vars();
  DiscreteState x;
  x.values.resize(n);
  for (int v = n - 1; v >= 0; --v) {
    const std::uint64_t card = target.cardinality(v);
    x[v] = static_cast<int>(index % card);
    index /= card;
  }
  return x;
}

std::vector<double> exact_distribution(const TargetModel& target) {
  const std::uint64_t size = state_space_size(target);
  std::vector<double> logp(size);
  for (std::uint64_t i = 0; i < size; ++i)
    logp[i] = target.log_prob(index_to_state(target, i));
  const double lse = log_sum_exp(logp);
  std::vector<double> p(size);
  for (std::uint64_t i = 0; i < size; ++i) p[i] = std::exp(logp[i] - lse);
  return p;
}

std::vector<double> TransitionMatrix::apply(const std::vector<double>& p) const {
  std::vector<double> out(size, 0.0);
  for (int xp = 0; xp < size; ++xp) {
    const double* row = values.data() + static_cast<std::size_t>(xp) * size;
    double acc = 0.0;
    for (int x = 0; x < size; ++x) acc += row[x] * p[x];
    out[xp] = acc;
  }
  return out;
}

TransitionMatrix TransitionMatrix::multiply(const TransitionMatrix& other) const {
  TransitionMatrix out;
  out.size = size;
  out.values.assign(values.size(), 0.0);
  // (this * other)[i][j] = sum_k this[i][k] other[k][j]; ikj order for locality
  for (int i = 0; i < size; ++i) {
    const double* a = values.data() + static_cast<std::size_t>(i) * size;
    double* o = out.values.data() + static_cast<std::size_t>(i) * size;
    for (int k = 0; k < size; ++k) {
      const double aik = a[k];
      if (aik == 0.0) continue;
      const double* b = other.values.data() + static_cast<std::size_t>(k) * size;
      for (int j = 0; j < size; ++j) o[j] += aik * b[j];
    }
  }
  return out;
}

TransitionMatrix TransitionMatrix::power(int exponent) const {
  TransitionMatrix result;
  result.size = size;
  result.values.assign(values.size(), 0.0);
  for (int i = 0; i < size; ++i) result.at(i, i) = 1.0;
  TransitionMatrix base = *this;
  int e = exponent;
  while (e > 0) {
    if (e & 1) result = result.multiply(base);
    e >>= 1;
    if (e > 0) base = base.multiply(base);
  }
  return result;
}

TransitionMatrix exact_transition_matrix(const TargetModel& target, const BalancingFunction& g,
                                         const ProposalClamp& clamp) {
  const std::uint64_t size = state_space_size(target);
  const int n = static_cast<int>(size);

  // One proposal table per state; reverse lookups reuse them.
  std::vector<ProposalTable> tables;
  std::vector<DiscreteState> states;
  tables.reserve(size);
  states.reserve(size);
  for (std::uint64_t i = 0; i < size; ++i) {
    states.push_back(index_to_state(target, i));
    tables.push_back(build_proposal(target, states.back(), g, clamp));
  }

  TransitionMatrix t;
  t.size = n;
  t.values.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int x = 0; x < n; ++x) {
    const ProposalTable& fwd = tables[x];
    double rejection = 0.0;
    for (int m = 0; m < fwd.size(); ++m) {
      const Move& mv = fwd.moves[m];
      const DiscreteState xp_state = apply_move(states[x], mv);
      const int xp = static_cast<int>(state_to_index(target, xp_state));
      const ProposalTable& bwd = tables[xp];
      const int rev = bwd.move_index(mv.variable, states[x][mv.variable], mv.new_value);
      const double log_alpha =
          std::min(0.0, fwd.delta_logp[m] + bwd.log_prob(rev) - fwd.log_prob(m));
      const double q = std::exp(fwd.log_prob(m));
      const double a = std::exp(log_alpha);
      t.at(xp, x) = a * q;
      rejection += (1.0 - a) * q;
    }
    t.at(x, x) = rejection;
  }
  return t;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw InvalidInputError("distributions have different support sizes");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

}  // namespace lsb
