#ifndef LSB_STATE_HPP
#define LSB_STATE_HPP

#include <cstdint>
#include <vector>

namespace lsb {

// Assignment vector over a model's variables; entry i lies in [0, cardinality_i).
struct DiscreteState {
  std::vector<int> values;

  DiscreteState() = default;
  explicit DiscreteState(std::vector<int> v) : values(std::move(v)) {}
  DiscreteState(std::initializer_list<int> v) : values(v) {}

  int size() const { return static_cast<int>(values.size()); }
  int operator[](int i) const { return values[i]; }
  int& operator[](int i) { return values[i]; }

  bool operator==(const DiscreteState& other) const = default;
};

// Single-variable change; new_value differs from the state's current value.
struct Move {
  int variable = 0;
  int new_value = 0;

  bool operator==(const Move& other) const = default;
};

inline DiscreteState apply_move(const DiscreteState& x, const Move& m) {
  DiscreteState y = x;
  y[m.variable] = m.new_value;
  return y;
}

}  // namespace lsb

#endif  // LSB_STATE_HPP
