#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lsb/factor_graph.hpp"
#include "lsb/ising.hpp"

using namespace lsb;

namespace {

// Independent energy evaluation: loops over all sites and both lattice edge
// directions, no shared code with IsingModel.
double brute_force_ising(int n, double lambda, const std::vector<double>& alpha,
                         const DiscreteState& x) {
  auto spin = [&](int r, int c) { return 2 * x[r * n + c] - 1; };
  double total = 0.0;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) total += alpha[r * n + c] * spin(r, c);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c + 1 < n; ++c) total += lambda * spin(r, c) * spin(r, c + 1);
  for (int r = 0; r + 1 < n; ++r)
    for (int c = 0; c < n; ++c) total += lambda * spin(r, c) * spin(r + 1, c);
  return total;
}

DiscreteState random_state(const TargetModel& target, Rng& rng) {
  return target.uniform_state(rng);
}

}  // namespace

TEST_CASE("ising log prob on hand-counted lattices") {
  IsingModel all_coupling(2, 1.0, {0, 0, 0, 0});
  CHECK(all_coupling.log_prob(DiscreteState{1, 1, 1, 1}) == doctest::Approx(4.0));

  IsingModel field_only(2, 0.0, {0.5, 0.5, 0.5, 0.5});
  CHECK(field_only.log_prob(DiscreteState{1, 1, 1, 1}) == doctest::Approx(2.0));
}

TEST_CASE("ising log prob matches a brute-force double loop") {
  Rng rng(41);
  std::vector<double> alpha(25);
  for (double& a : alpha) a = rng.normal();
  IsingModel model(5, 1.3, alpha);
  for (int rep = 0; rep < 20; ++rep) {
    DiscreteState x = random_state(model, rng);
    CHECK(model.log_prob(x) == doctest::Approx(brute_force_ising(5, 1.3, alpha, x)).epsilon(1e-12));
  }
}

TEST_CASE("ising model validates construction and inputs") {
  CHECK_THROWS_AS(IsingModel(2, -0.5, {0, 0, 0, 0}), InvalidInputError);
  CHECK_THROWS_AS(IsingModel(2, 1.0, {0, 0, 0}), InvalidInputError);
  IsingModel model(2, 1.0, {0, 0, 0, 0});
  CHECK_THROWS_AS(model.log_prob(DiscreteState{1, 1, 1}), InvalidInputError);
  CHECK_THROWS_AS(model.delta_log_prob(DiscreteState{1, 1, 1, 1}, 4, 0), InvalidInputError);
}

TEST_CASE("ising delta on hand-counted flips") {
  IsingModel coupling(2, 1.0, {0, 0, 0, 0});
  // corner flip: two incident edges each swing by -2
  CHECK(coupling.delta_log_prob(DiscreteState{1, 1, 1, 1}, 0, 0) == doctest::Approx(-4.0));

  IsingModel field(2, 0.0, {2.0, 0, 0, 0});
  CHECK(field.delta_log_prob(DiscreteState{1, 0, 0, 0}, 0, 0) == doctest::Approx(-4.0));
}

TEST_CASE("ising delta equals difference of full evaluations") {
  Rng rng(42);
  std::vector<double> alpha(16);
  for (double& a : alpha) a = rng.normal();
  IsingModel model(4, 0.7, alpha);
  for (int rep = 0; rep < 50; ++rep) {
    DiscreteState x = random_state(model, rng);
    const int site = rng.uniform_int(16);
    DiscreteState y = x;
    y[site] = 1 - y[site];
    const double expected = model.log_prob(y) - model.log_prob(x);
    CHECK(model.delta_log_prob(x, site, y[site]) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("coupling energy is invariant under a global spin flip when alpha is zero") {
  IsingModel model(3, 1.0, std::vector<double>(9, 0.0));
  Rng rng(43);
  for (int rep = 0; rep < 20; ++rep) {
    DiscreteState x = random_state(model, rng);
    DiscreteState flipped = x;
    for (int i = 0; i < 9; ++i) flipped[i] = 1 - flipped[i];
    CHECK(model.log_prob(x) == doctest::Approx(model.log_prob(flipped)).epsilon(1e-12));
  }
}

TEST_CASE("observation generation is deterministic and validates sigma") {
  ObservationSpec spec{1.0, 3.0, square_ground_truth(8), 99};
  const std::vector<double> a = generate_observation(spec);
  const std::vector<double> b = generate_observation(spec);
  CHECK(a == b);

  spec.sigma = 0.0;
  CHECK_THROWS_AS(generate_observation(spec), InvalidInputError);
}

TEST_CASE("observation bias mean approaches mu^2/sigma^2 on +1 sites") {
  // one million draws, all-ones truth: mean alpha ~ mu^2/sigma^2
  ObservationSpec spec;
  spec.mu = 1.0;
  spec.sigma = 3.0;
  spec.ground_truth.assign(1000 * 1000, 1);
  spec.seed = 7;
  const std::vector<double> alpha = generate_observation(spec);
  double mean = 0.0;
  for (double v : alpha) mean += v;
  mean /= static_cast<double>(alpha.size());
  CHECK(mean == doctest::Approx(1.0 / 9.0).epsilon(0.02));
}

TEST_CASE("single-factor lookup") {
  Factor f{{0}, {std::log(0.3), std::log(0.7)}};
  FactorGraphModel model({2}, {f});
  CHECK(model.log_prob(DiscreteState{1}) == doctest::Approx(std::log(0.7)));
}

TEST_CASE("factor graph delta equals difference of full evaluations") {
  Rng rng(44);
  const std::vector<int> cards = {2, 3, 2, 4};
  std::vector<Factor> factors;
  auto add = [&](std::vector<int> scope) {
    Factor f;
    std::size_t joint = 1;
    for (int v : scope) joint *= cards[v];
    f.scope = std::move(scope);
    f.log_table.resize(joint);
    for (double& e : f.log_table) e = rng.normal();
    factors.push_back(std::move(f));
  };
  add({0});
  add({0, 1});
  add({1, 2});
  add({2, 3});
  add({0, 3});
  FactorGraphModel model(cards, factors);

  for (int rep = 0; rep < 100; ++rep) {
    DiscreteState x = random_state(model, rng);
    const int var = rng.uniform_int(4);
    int value = rng.uniform_int(cards[var]);
    if (value == x[var]) value = (value + 1) % cards[var];
    DiscreteState y = x;
    y[var] = value;
    const double expected = model.log_prob(y) - model.log_prob(x);
    CHECK(model.delta_log_prob(x, var, value) == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("factor graph handles zero-probability entries") {
  // p(x0): [0.5, 0.5]; p(x1|x0): moving to (x0=1, x1=1) is impossible
  Factor unary{{0}, {std::log(0.5), std::log(0.5)}};
  Factor pair{{0, 1}, {std::log(0.9), std::log(0.1), std::log(1.0), kNegInf}};
  FactorGraphModel model({2, 2}, {unary, pair});

  CHECK(model.delta_log_prob(DiscreteState{1, 0}, 1, 1) == kNegInf);
  CHECK(model.log_prob(DiscreteState{1, 1}) == kNegInf);
  // leaving an impossible state
  CHECK(model.delta_log_prob(DiscreteState{1, 1}, 1, 0) == kPosInf);

  // both configurations impossible: defined as zero
  Factor blocked{{0}, {kNegInf, kNegInf}};
  FactorGraphModel all_blocked({2}, {blocked});
  CHECK(all_blocked.delta_log_prob(DiscreteState{0}, 0, 1) == 0.0);

  CHECK_THROWS_AS(model.delta_log_prob(DiscreteState{0, 0}, 2, 0), InvalidInputError);
  CHECK_THROWS_AS(model.delta_log_prob(DiscreteState{0, 0}, 1, 5), InvalidInputError);
}

TEST_CASE("factor table length must match its scope") {
  Factor bad{{0, 1}, {0.0, 0.0, 0.0}};
  CHECK_THROWS_AS(FactorGraphModel({2, 2}, {bad}), InvalidInputError);
}
