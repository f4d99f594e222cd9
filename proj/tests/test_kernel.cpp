#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lsb/exact.hpp"
#include "lsb/factor_graph.hpp"
#include "lsb/ising.hpp"
#include "lsb/kernel.hpp"

using namespace lsb;

namespace {

// p~ = (1, 3) over a single binary variable.
FactorGraphModel two_state_toy() {
  Factor f{{0}, {std::log(1.0), std::log(3.0)}};
  return FactorGraphModel({2}, {f});
}

IsingModel random_ising(int n, double lambda, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> alpha(static_cast<std::size_t>(n) * n);
  for (double& a : alpha) a = rng.normal();
  return IsingModel(n, lambda, alpha);
}

}  // namespace

TEST_CASE("proposal table on the two-state toy") {
  FactorGraphModel toy = two_state_toy();
  FixedBalancing barker(FixedBalancingKind::Barker);
  ProposalTable t = build_proposal(toy, DiscreteState{0}, barker);
  REQUIRE(t.size() == 1);
  CHECK(t.moves[0] == Move{0, 1});
  CHECK(std::exp(t.log_weights[0]) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(std::exp(t.log_z) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(t.log_prob(0) == doctest::Approx(0.0));
}

TEST_CASE("uniform targets get uniform proposals under every balancing function") {
  IsingModel flat(2, 0.0, {0, 0, 0, 0});
  Rng rng(31);
  std::array<double, 4> theta;
  for (double& v : theta) v = rng.normal();
  Rng net_rng(32);

  std::vector<std::unique_ptr<BalancingFunction>> all;
  for (FixedBalancingKind k : kFixedKinds) all.push_back(std::make_unique<FixedBalancing>(k));
  all.push_back(std::make_unique<Lsb1Balancing>(Lsb1Params(theta)));
  all.push_back(std::make_unique<Lsb2Balancing>(MonotonicNet(4, 4, net_rng)));

  for (const auto& g : all) {
    ProposalTable t = build_proposal(flat, DiscreteState{0, 1, 1, 0}, *g);
    for (int i = 0; i < t.size(); ++i)
      CHECK(std::exp(t.log_prob(i)) == doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("proposal probabilities match a full-evaluation construction") {
  IsingModel model = random_ising(3, 1.0, 33);
  FixedBalancing sqrt_g(FixedBalancingKind::Sqrt);
  Rng rng(34);
  for (int rep = 0; rep < 10; ++rep) {
    DiscreteState x = model.uniform_state(rng);
    ProposalTable t = build_proposal(model, x, sqrt_g);

    // independent route: full log-prob per neighbor
    const double logp_x = model.log_prob(x);
    std::vector<double> weights;
    for (int site = 0; site < 9; ++site) {
      DiscreteState y = x;
      y[site] = 1 - y[site];
      weights.push_back(std::exp(0.5 * (model.log_prob(y) - logp_x)));
    }
    double z = 0.0;
    for (double w : weights) z += w;
    REQUIRE(t.size() == 9);
    for (int i = 0; i < 9; ++i)
      CHECK(std::exp(t.log_prob(i)) == doctest::Approx(weights[i] / z).epsilon(1e-10));
  }
}

TEST_CASE("move enumeration is variable-major and value-ascending") {
  Factor f{{0}, {0.0, 0.0}};
  Factor g{{1}, {0.0, 0.0, 0.0}};
  Factor h{{2}, {0.0, 0.0}};
  FactorGraphModel model({2, 3, 2}, {f, g, h});
  FixedBalancing barker(FixedBalancingKind::Barker);
  ProposalTable t = build_proposal(model, DiscreteState{0, 1, 1}, barker);
  REQUIRE(t.size() == model.num_moves());
  REQUIRE(t.size() == 4);
  CHECK(t.moves[0] == Move{0, 1});
  CHECK(t.moves[1] == Move{1, 0});
  CHECK(t.moves[2] == Move{1, 2});
  CHECK(t.moves[3] == Move{2, 0});
  CHECK(t.move_index(1, 0, 1) == 1);
  CHECK(t.move_index(1, 2, 1) == 2);

  double total = 0.0;
  for (int i = 0; i < t.size(); ++i) total += std::exp(t.log_prob(i));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("the toy target always accepts the uphill move") {
  FactorGraphModel toy = two_state_toy();
  FixedBalancing barker(FixedBalancingKind::Barker);
  Rng rng(35);
  DiscreteState state{0};
  StepOutcome out = mh_step(toy, state, barker, rng);
  CHECK(out.proposed == Move{0, 1});
  CHECK(out.delta_logp == doctest::Approx(std::log(3.0)));
  CHECK(out.log_q_fwd == doctest::Approx(0.0));
  CHECK(out.log_q_bwd == doctest::Approx(0.0));
  CHECK(out.log_alpha == 0.0);
  CHECK(out.accepted);
  CHECK(state == DiscreteState{1});
}

TEST_CASE("forward and reverse acceptance ratio arguments cancel") {
  IsingModel model = random_ising(3, 0.8, 36);
  FixedBalancing g(FixedBalancingKind::Barker);
  Rng rng(37);
  for (int rep = 0; rep < 50; ++rep) {
    DiscreteState x = model.uniform_state(rng);
    ProposalTable fwd = build_proposal(model, x, g);
    const int idx = rng.uniform_int(fwd.size());
    const Move mv = fwd.moves[idx];
    DiscreteState xp = apply_move(x, mv);
    ProposalTable bwd = build_proposal(model, xp, g);
    const int rev = bwd.move_index(mv.variable, x[mv.variable], mv.new_value);

    const double r1 = fwd.delta_logp[idx] + bwd.log_prob(rev) - fwd.log_prob(idx);
    const double r2 = bwd.delta_logp[rev] + fwd.log_prob(idx) - bwd.log_prob(rev);
    CHECK(r1 + r2 == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("simplified acceptance equals the general ratio for balancing g") {
  CHECK(log_accept_simplified(2.0, 2.0) == 0.0);
  CHECK(log_accept_simplified(3.0, 2.0) == 0.0);  // capped at zero
  CHECK(log_accept_simplified(2.0, 3.0) == doctest::Approx(-1.0));

  IsingModel model = random_ising(3, 1.0, 38);
  for (FixedBalancingKind kind : kFixedKinds) {
    FixedBalancing g(kind);
    Rng rng(39);
    for (int rep = 0; rep < 100; ++rep) {
      DiscreteState x = model.uniform_state(rng);
      ProposalTable fwd = build_proposal(model, x, g);
      const int idx = rng.uniform_int(fwd.size());
      const Move mv = fwd.moves[idx];
      DiscreteState xp = apply_move(x, mv);
      ProposalTable bwd = build_proposal(model, xp, g);
      const int rev = bwd.move_index(mv.variable, x[mv.variable], mv.new_value);
      const double general =
          std::min(0.0, fwd.delta_logp[idx] + bwd.log_prob(rev) - fwd.log_prob(idx));
      const double simplified = log_accept_simplified(fwd.log_z, bwd.log_z);
      CHECK(std::abs(simplified - general) <= 1e-10);
    }
  }
}

TEST_CASE("run_chain basics") {
  IsingModel model = random_ising(3, 0.5, 40);
  FixedBalancing g(FixedBalancingKind::Sqrt);

  DiscreteState state{0, 1, 0, 1, 0, 1, 0, 1, 0};
  Rng rng(41);
  ChainTrace empty = run_chain(model, g, state, 0, rng);
  REQUIRE(empty.logp.size() == 1);
  CHECK(empty.logp[0] == doctest::Approx(model.log_prob(state)));
  CHECK(empty.accepted.empty());

  DiscreteState s1{0, 1, 0, 1, 0, 1, 0, 1, 0};
  DiscreteState s2 = s1;
  Rng r1(42), r2(42);
  ChainTrace t1 = run_chain(model, g, s1, 2000, r1);
  ChainTrace t2 = run_chain(model, g, s2, 2000, r2);
  CHECK(t1.logp == t2.logp);
  CHECK(t1.accepted == t2.accepted);
  CHECK(s1 == s2);

  // incremental bookkeeping agrees with a fresh evaluation at the end
  CHECK(t1.logp.back() == doctest::Approx(model.log_prob(s1)).epsilon(1e-9));
  CHECK_THROWS_AS(run_chain(model, g, s1, -1, r1), InvalidInputError);
}

TEST_CASE("chain visits states at the exact stationary frequencies") {
  IsingModel model = random_ising(2, 1.0, 43);
  FixedBalancing g(FixedBalancingKind::Barker);
  const std::vector<double> exact = exact_distribution(model);

  Rng rng(44);
  DiscreteState state = model.uniform_state(rng);
  std::vector<double> counts(exact.size(), 0.0);
  const int steps = 100000;
  for (int k = 0; k < steps; ++k) {
    mh_step(model, state, g, rng);
    counts[state_to_index(model, state)] += 1.0;
  }
  for (double& c : counts) c /= steps;
  CHECK(tv_distance(counts, exact) < 0.05);
}

TEST_CASE("empirical acceptance rate matches the exact transition matrix") {
  IsingModel model = random_ising(3, 1.0, 45);
  FixedBalancing g(FixedBalancingKind::Barker);

  const std::vector<double> p = exact_distribution(model);
  const TransitionMatrix t = exact_transition_matrix(model, g);
  double expected = 0.0;
  for (int x = 0; x < t.size; ++x) expected += p[x] * (1.0 - t.at(x, x));

  Rng rng(46);
  DiscreteState state = model.uniform_state(rng);
  const int steps = 100000;
  double accepts = 0.0;
  for (int k = 0; k < steps; ++k) accepts += mh_step(model, state, g, rng).accepted;
  const double rate = accepts / steps;
  const double se = std::sqrt(expected * (1.0 - expected) / steps);
  CHECK(std::abs(rate - expected) <= 3.0 * se);
}

TEST_CASE("exact transition matrix on the two-state toy") {
  FactorGraphModel toy = two_state_toy();
  FixedBalancing barker(FixedBalancingKind::Barker);
  TransitionMatrix t = exact_transition_matrix(toy, barker);
  REQUIRE(t.size == 2);
  CHECK(t.at(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.at(0, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(t.at(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(t.at(1, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  // long-run distribution equals the normalized target
  TransitionMatrix longrun = t.power(64);
  CHECK(longrun.at(0, 0) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(longrun.at(1, 0) == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(longrun.at(0, 1) == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("transition matrix is column-stochastic with detailed balance") {
  IsingModel model = random_ising(2, 1.0, 47);
  const std::vector<double> p = exact_distribution(model);
  for (FixedBalancingKind kind : {FixedBalancingKind::Barker, FixedBalancingKind::MaxOne}) {
    FixedBalancing g(kind);
    TransitionMatrix t = exact_transition_matrix(model, g);
    for (int x = 0; x < t.size; ++x) {
      double col = 0.0;
      for (int xp = 0; xp < t.size; ++xp) col += t.at(xp, x);
      CHECK(col == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(t.at(x, x) >= 0.0);
      CHECK(t.at(x, x) <= 1.0);
    }
    for (int x = 0; x < t.size; ++x)
      for (int xp = 0; xp < t.size; ++xp)
        CHECK(p[x] * t.at(xp, x) == doctest::Approx(p[xp] * t.at(x, xp)).epsilon(1e-10));

    // regular: d steps connect every pair of states
    TransitionMatrix td = t.power(model.num_vars());
    for (double v : td.values) CHECK(v > 0.0);
  }
}

TEST_CASE("enumeration utilities reject oversized spaces") {
  IsingModel big = random_ising(5, 0.0, 48);  // 2^25 states
  CHECK_THROWS_AS(state_space_size(big), CapacityError);
  CHECK_THROWS_AS(exact_distribution(big), CapacityError);
}

TEST_CASE("tv distance basics") {
  CHECK(tv_distance({0.5, 0.5}, {0.5, 0.5}) == 0.0);
  CHECK(tv_distance({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(1.0));
  CHECK_THROWS_AS(tv_distance({1.0}, {0.5, 0.5}), InvalidInputError);
}
