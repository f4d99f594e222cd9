#ifndef LSB_ORACLES_HPP
#define LSB_ORACLES_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "lsb/balancing.hpp"
#include "lsb/target.hpp"

namespace lsb::oracle {

// One named property check: `observed` against `bound` (pass unless noted).
struct Check {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double bound = 0.0;
};

// Enumerable desk-size instances the exact suites run over: 2x2 and 3x3
// lattices with and without coupling (random per-site bias), plus a random
// 4-variable factor graph with mixed cardinalities.
struct NamedTarget {
  std::string name;
  std::unique_ptr<TargetModel> target;
};
std::vector<NamedTarget> oracle_instances(std::uint64_t seed = 7);

// Fixed functions plus randomly parameterized adaptive ones.
struct NamedBalancing {
  std::string name;
  std::unique_ptr<BalancingFunction> g;
};
std::vector<NamedBalancing> oracle_balancing_set(std::uint64_t seed = 7);

// Exact-enumeration properties of the transition matrix.
std::vector<Check> detailed_balance_suite(double bound = 1e-10);
std::vector<Check> invariance_suite(double bound = 1e-10);
std::vector<Check> regularity_suite();

// Normalizer-ratio acceptance vs the general MH ratio; includes a negative
// control with the non-balancing g(t) = t^2, which must break the equality.
std::vector<Check> equivalence_suite(double bound = 1e-10, double control_gap = 1e-3);

// Analytic gradients of the adaptive parametrizations and of the batch
// objective against central finite differences.
std::vector<Check> gradient_suite(double tol = 1e-4);

// Long-chain empirical distribution vs exact enumeration on a 3x3 lattice.
std::vector<Check> tv_suite(std::int64_t steps = 1000000, double bound = 0.02);

// |g(t) - t g(1/t)| residuals over random log-ratios in [-30, 30].
std::vector<Check> balancing_residual_suite(int draws = 1000, double rel_bound = 1e-9);

// Central-difference gradient of a scalar function of a parameter vector.
std::vector<double> finite_difference(const std::function<double(const std::vector<double>&)>& f,
                                      const std::vector<double>& at, double step = 1e-5);

// Runs the suites selected by scope ("all", "db", "invariance", "regularity",
// "equivalence", "grad", "tv"); prints one pass/fail line per property.
// Returns 0 when everything passed.
int run_scope(const std::string& scope, std::ostream& out);

}  // namespace lsb::oracle

#endif  // LSB_ORACLES_HPP
