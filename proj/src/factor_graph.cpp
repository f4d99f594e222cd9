#include "lsb/factor_graph.hpp"

#include <cmath>

namespace lsb {

FactorGraphModel::FactorGraphModel(std::vector<int> cardinalities, std::vector<Factor> factors,
                                   NetworkType type, std::string source)
    : cards_(std::move(cardinalities)),
      factors_(std::move(factors)),
      type_(type),
      source_(std::move(source)) {
  for (int c : cards_) {
    if (c < 1) throw InvalidInputError("variable cardinality must be >= 1");
  }
  var_factors_.resize(cards_.size());
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    std::size_t joint = 1;
    for (int v : factors_[f].scope) {
      if (v < 0 || v >= num_vars())
        throw InvalidInputError("factor scope references unknown variable");
      joint *= static_cast<std::size_t>(cards_[v]);
      var_factors_[v].push_back(static_cast<int>(f));
    }
    if (factors_[f].log_table.size() != joint)
      throw InvalidInputError("factor table length does not match its scope");
    for (double e : factors_[f].log_table) {
      if (std::isnan(e) || e == kPosInf)
        throw InvalidInputError("factor table entries must be in [-inf, +inf)");
    }
  }
}

std::size_t FactorGraphModel::table_index(const Factor& f, const DiscreteState& x) const {
  std::size_t idx = 0;
  for (int v : f.scope) idx = idx * static_cast<std::size_t>(cards_[v]) + x[v];
  return idx;
}

double FactorGraphModel::log_prob(const DiscreteState& x) const {
  require_valid_state(x);
  double sum = 0.0;
  for (const Factor& f : factors_) {
    sum += f.log_table[table_index(f, x)];
    if (sum == kNegInf) return kNegInf;
  }
  return sum;
}

double FactorGraphModel::delta_log_prob(const DiscreteState& x, int var, int new_value) const {
  require_valid_state(x);
  if (var < 0 || var >= num_vars()) throw InvalidInputError("variable out of range");
  if (new_value < 0 || new_value >= cards_[var]) throw InvalidInputError("value out of range");
  if (new_value == x[var]) return 0.0;

  // Only factors whose scope contains `var` change.
  double before = 0.0;
  double after = 0.0;
  DiscreteState y = x;
  y[var] = new_value;
  for (int f : var_factors_[var]) {
    before += factors_[f].log_table[table_index(factors_[f], x)];
    after += factors_[f].log_table[table_index(factors_[f], y)];
  }
  // -inf - -inf is NaN; both configurations impossible means equal log-probs.
  if (before == kNegInf && after == kNegInf) return 0.0;
  if (after == kNegInf) return kNegInf;
  if (before == kNegInf) return kPosInf;
  return after - before;
}

}  // namespace lsb
