#ifndef LSB_EXACT_HPP
#define LSB_EXACT_HPP

#include <cstdint>
#include <vector>

#include "lsb/kernel.hpp"
#include "lsb/target.hpp"

namespace lsb {

// Enumeration utilities for targets whose joint space fits in memory
// (at most 65536 states). State indices are mixed-radix with variable 0
// most significant and the last variable varying fastest.

std::uint64_t state_space_size(const TargetModel& target);  // throws CapacityError
std::uint64_t state_to_index(const TargetModel& target, const DiscreteState& x);
DiscreteState index_to_state(const TargetModel& target, std::uint64_t index);

// exp-normalized probability table over all states; sums to 1.
std::vector<double> exact_distribution(const TargetModel& target);

// Column-stochastic transition matrix of the sampler: entry (x', x) holds
// A(x',x) Q(x'|x) for neighbors, the rejection mass on the diagonal, and 0
// elsewhere. Acceptance uses the general MH ratio.
struct TransitionMatrix {
  int size = 0;
  std::vector<double> values;  // row-major: values[xp * size + x] = T(x'|x)

  double at(int xp, int x) const { return values[static_cast<std::size_t>(xp) * size + x]; }
  double& at(int xp, int x) { return values[static_cast<std::size_t>(xp) * size + x]; }

  std::vector<double> apply(const std::vector<double>& p) const;  // T p
  TransitionMatrix multiply(const TransitionMatrix& other) const;
  TransitionMatrix power(int exponent) const;
};

TransitionMatrix exact_transition_matrix(const TargetModel& target, const BalancingFunction& g,
                                         const ProposalClamp& clamp = {});

// 1/2 sum |p - q| over a shared support.
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace lsb

#endif  // LSB_EXACT_HPP
