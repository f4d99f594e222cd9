#ifndef LSB_FACTOR_GRAPH_HPP
#define LSB_FACTOR_GRAPH_HPP

#include <string>
#include <vector>

#include "lsb/target.hpp"

namespace lsb {

// One factor: ordered variable scope plus a log-domain table indexed row-major
// by the scope's joint assignment (last scope variable varies fastest).
struct Factor {
  std::vector<int> scope;
  std::vector<double> log_table;  // entries in [-inf, +inf), -inf for zeros
};

enum class NetworkType { Markov, Bayes };

class FactorGraphModel final : public TargetModel {
 public:
  FactorGraphModel(std::vector<int> cardinalities, std::vector<Factor> factors,
                   NetworkType type = NetworkType::Markov, std::string source = {});

  int num_vars() const override { return static_cast<int>(cards_.size()); }
  int cardinality(int var) const override { return cards_[var]; }
  double log_prob(const DiscreteState& x) const override;
  double delta_log_prob(const DiscreteState& x, int var, int new_value) const override;

  const std::vector<Factor>& factors() const { return factors_; }
  const std::vector<int>& cardinalities() const { return cards_; }
  NetworkType type() const { return type_; }
  const std::string& source() const { return source_; }

  // Row-major offset of x restricted to factor f's scope.
  std::size_t table_index(const Factor& f, const DiscreteState& x) const;

 private:
  std::vector<int> cards_;
  std::vector<Factor> factors_;
  std::vector<std::vector<int>> var_factors_;  // factor ids touching each variable
  NetworkType type_;
  std::string source_;
};

}  // namespace lsb

#endif  // LSB_FACTOR_GRAPH_HPP
