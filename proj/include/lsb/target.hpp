#ifndef LSB_TARGET_HPP
#define LSB_TARGET_HPP

#include "lsb/common.hpp"
#include "lsb/state.hpp"

namespace lsb {

// Unnormalized discrete target. Implementations are immutable after
// construction and safely shareable across concurrently running chains.
class TargetModel {
 public:
  virtual ~TargetModel() = default;

  virtual int num_vars() const = 0;
  virtual int cardinality(int var) const = 0;

  // log p~(x), normalizer excluded.
  virtual double log_prob(const DiscreteState& x) const = 0;

  // log p~(x with x[var]=new_value) - log p~(x), computed locally.
  virtual double delta_log_prob(const DiscreteState& x, int var, int new_value) const = 0;

  // Number of Hamming-1 neighbors: sum_i (cardinality_i - 1).
  int num_moves() const {
    int n = 0;
    for (int v = 0; v < num_vars(); ++v) n += cardinality(v) - 1;
    return n;
  }

  bool valid_state(const DiscreteState& x) const {
    if (x.size() != num_vars()) return false;
    for (int v = 0; v < num_vars(); ++v) {
      if (x[v] < 0 || x[v] >= cardinality(v)) return false;
    }
    return true;
  }

  void require_valid_state(const DiscreteState& x) const {
    if (!valid_state(x)) throw InvalidInputError("state does not match model dimensions");
  }

  // Each variable drawn uniformly over its cardinality.
  DiscreteState uniform_state(Rng& rng) const {
    DiscreteState x;
    x.values.resize(num_vars());
    for (int v = 0; v < num_vars(); ++v) x[v] = rng.uniform_int(cardinality(v));
    return x;
  }
};

}  // namespace lsb

#endif  // LSB_TARGET_HPP
