#include "lsb/oracles.hpp"

#include <cmath>
#include <ostream>

#include "lsb/adapt.hpp"
#include "lsb/exact.hpp"
#include "lsb/factor_graph.hpp"
#include "lsb/ising.hpp"
#include "lsb/kernel.hpp"

namespace lsb::oracle {

namespace {

// Deliberately non-balancing: g(t) = t^2, so t*g(1/t) = 1/t != g(t). Used as
// the negative control for the acceptance-equivalence property.
class NonBalancingSquare final : public BalancingFunction {
 public:
  int param_count() const override { return 0; }
  double log_g(double delta) const override { return 2.0 * delta; }
  double log_g_grad(double delta, std::vector<GradEntry>&) const override { return 2.0 * delta; }
};

std::vector<double> random_alpha(int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> alpha(count);
  for (double& a : alpha) a = rng.normal();
  return alpha;
}

FactorGraphModel random_factor_graph(std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<int> cards = {2, 3, 2, 2};
  std::vector<Factor> factors;
  auto random_table = [&](const std::vector<int>& scope) {
    std::size_t joint = 1;
    for (int v : scope) joint *= static_cast<std::size_t>(cards[v]);
    Factor f;
    f.scope = scope;
    f.log_table.resize(joint);
    for (double& e : f.log_table) e = rng.normal();
    return f;
  };
  for (int v = 0; v < 4; ++v) factors.push_back(random_table({v}));
  factors.push_back(random_table({0, 1}));
  factors.push_back(random_table({1, 2}));
  factors.push_back(random_table({2, 3}));
  factors.push_back(random_table({0, 3}));
  return FactorGraphModel(cards, std::move(factors));
}

double relative_error(double analytic, double reference) {
  const double scale = std::max({std::abs(analytic), std::abs(reference), 1e-6});
  return std::abs(analytic - reference) / scale;
}

}  // namespace

std::vector<NamedTarget> oracle_instances(std::uint64_t seed) {
  std::vector<NamedTarget> out;
  out.push_back({"ising2x2_l0",
                 std::make_unique<IsingModel>(2, 0.0, random_alpha(4, derive_seed(seed, 1)))});
  out.push_back({"ising2x2_l1",
                 std::make_unique<IsingModel>(2, 1.0, random_alpha(4, derive_seed(seed, 2)))});
  out.push_back({"ising3x3_l0",
                 std::make_unique<IsingModel>(3, 0.0, random_alpha(9, derive_seed(seed, 3)))});
  out.push_back({"ising3x3_l1",
                 std::make_unique<IsingModel>(3, 1.0, random_alpha(9, derive_seed(seed, 4)))});
  out.push_back(
      {"fg4", std::make_unique<FactorGraphModel>(random_factor_graph(derive_seed(seed, 5)))});
  return out;
}

std::vector<NamedBalancing> oracle_balancing_set(std::uint64_t seed) {
  std::vector<NamedBalancing> out;
  for (FixedBalancingKind k : kFixedKinds)
    out.push_back({fixed_kind_name(k), std::make_unique<FixedBalancing>(k)});

  Rng rng(derive_seed(seed, 100));
  std::array<double, 4> theta;
  for (double& t : theta) t = rng.normal();
  out.push_back({"lsb1", std::make_unique<Lsb1Balancing>(Lsb1Params(theta))});

  Rng net_rng(derive_seed(seed, 101));
  out.push_back({"lsb2", std::make_unique<Lsb2Balancing>(MonotonicNet(20, 20, net_rng))});
  return out;
}

std::vector<Check> detailed_balance_suite(double bound) {
  std::vector<Check> checks;
  for (const NamedTarget& inst : oracle_instances()) {
    const std::vector<double> p = exact_distribution(*inst.target);
    for (const NamedBalancing& nb : oracle_balancing_set()) {
      const TransitionMatrix t = exact_transition_matrix(*inst.target, *nb.g);
      double worst = 0.0;
      for (int x = 0; x < t.size; ++x)
        for (int xp = 0; xp < t.size; ++xp)
          worst = std::max(worst, std::abs(p[x] * t.at(xp, x) - p[xp] * t.at(x, xp)));
      checks.push_back({"detailed_balance/" + inst.name + "/" + nb.name, worst <= bound, worst,
                        bound});
    }
  }
  return checks;
}

std::vector<Check> invariance_suite(double bound) {
  std::vector<Check> checks;
  for (const NamedTarget& inst : oracle_instances()) {
    const std::vector<double> p = exact_distribution(*inst.target);
    for (const NamedBalancing& nb : oracle_balancing_set()) {
      const TransitionMatrix t = exact_transition_matrix(*inst.target, *nb.g);
      const std::vector<double> tp = t.apply(p);
      double worst = 0.0;
      for (int x = 0; x < t.size; ++x) worst = std::max(worst, std::abs(tp[x] - p[x]));
      checks.push_back({"invariance/" + inst.name + "/" + nb.name, worst <= bound, worst, bound});
    }
  }
  return checks;
}

std::vector<Check> regularity_suite() {
  std::vector<Check> checks;
  for (const NamedTarget& inst : oracle_instances()) {
    const int d = inst.target->num_vars();
    for (const NamedBalancing& nb : oracle_balancing_set()) {
      const TransitionMatrix t = exact_transition_matrix(*inst.target, *nb.g);
      const TransitionMatrix td = t.power(d);
      double min_entry = kPosInf;
      for (double v : td.values) min_entry = std::min(min_entry, v);
      checks.push_back(
          {"regularity/" + inst.name + "/" + nb.name, min_entry > 0.0, min_entry, 0.0});
    }
  }
  return checks;
}

namespace {

// Max |A_simplified - A_general| over random state/move pairs.
double equivalence_gap(const TargetModel& target, const BalancingFunction& g, int draws,
                       std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < draws; ++k) {
    const DiscreteState x = target.uniform_state(rng);
    const ProposalTable fwd = build_proposal(target, x, g);
    const int idx = rng.uniform_int(fwd.size());
    const Move mv = fwd.moves[idx];
    const DiscreteState xp = apply_move(x, mv);
    const ProposalTable bwd = build_proposal(target, xp, g);
    const int rev = bwd.move_index(mv.variable, x[mv.variable], mv.new_value);
    const double general =
        std::min(0.0, fwd.delta_logp[idx] + bwd.log_prob(rev) - fwd.log_prob(idx));
    const double simplified = log_accept_simplified(fwd.log_z, bwd.log_z);
    worst = std::max(worst, std::abs(std::exp(simplified) - std::exp(general)));
  }
  return worst;
}

}  // namespace

std::vector<Check> equivalence_suite(double bound, double control_gap) {
  std::vector<Check> checks;
  std::uint64_t stream = 200;
  for (const NamedTarget& inst : oracle_instances()) {
    for (const NamedBalancing& nb : oracle_balancing_set()) {
      const double gap = equivalence_gap(*inst.target, *nb.g, 100, derive_seed(9, ++stream));
      checks.push_back(
          {"acceptance_equivalence/" + inst.name + "/" + nb.name, gap <= bound, gap, bound});
    }
  }
  // Negative control: the equality must fail somewhere for a non-balancing g.
  NonBalancingSquare square;
  double control = 0.0;
  for (const NamedTarget& inst : oracle_instances())
    control = std::max(control,
                       equivalence_gap(*inst.target, square, 100, derive_seed(9, ++stream)));
  checks.push_back({"acceptance_equivalence/negative_control_t_squared", control > control_gap,
                    control, control_gap});
  return checks;
}

std::vector<double> finite_difference(const std::function<double(const std::vector<double>&)>& f,
                                      const std::vector<double>& at, double step) {
  std::vector<double> grad(at.size());
  std::vector<double> point = at;
  for (std::size_t j = 0; j < at.size(); ++j) {
    point[j] = at[j] + step;
    const double hi = f(point);
    point[j] = at[j] - step;
    const double lo = f(point);
    point[j] = at[j];
    grad[j] = (hi - lo) / (2.0 * step);
  }
  return grad;
}

namespace {

double lsb1_eval_gradient_gap(int points, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < points; ++k) {
    std::array<double, 4> theta;
    for (double& t : theta) t = rng.normal();
    const double delta = rng.uniform(-10.0, 10.0);
    const BalancingEval eval = lsb1_eval(Lsb1Params(theta), delta);
    const std::vector<double> at(theta.begin(), theta.end());
    const std::vector<double> fd = finite_difference(
        [&](const std::vector<double>& p) {
          return Lsb1Balancing(Lsb1Params({p[0], p[1], p[2], p[3]})).log_g(delta);
        },
        at);
    for (int j = 0; j < 4; ++j) worst = std::max(worst, relative_error(eval.grad[j], fd[j]));
  }
  return worst;
}

double lsb2_eval_gradient_gap(int points, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  int used = 0;
  while (used < points) {
    Rng net_rng(rng.raw());
    MonotonicNet net(4, 4, net_rng);
    const double delta = rng.uniform(-8.0, 8.0);
    Lsb2Balancing b(net);
    if (b.tie_margin(delta) < 1e-3) continue;  // subgradient kink: skip the point
    ++used;
    const BalancingEval eval = lsb2_eval(net, delta);
    const std::vector<double> fd = finite_difference(
        [&](const std::vector<double>& p) {
          MonotonicNet candidate(4, 4);
          candidate.set_params(p);
          return Lsb2Balancing(std::move(candidate)).log_g(delta);
        },
        net.params());
    for (int j = 0; j < net.param_count(); ++j)
      worst = std::max(worst, relative_error(eval.grad[j], fd[j]));
  }
  return worst;
}

// Batch objective for a fixed reference theta0 and frozen draws; the finite
// difference moves theta only, so every evaluation sees the same proposals.
template <typename MakeTrainable>
double objective_gradient_gap(const TargetModel& target, const MakeTrainable& make,
                              const std::vector<double>& center, int batch_size,
                              std::uint64_t seed) {
  TrainConfig cfg;
  cfg.batch = batch_size;
  cfg.reg_draws = 2;

  std::unique_ptr<TrainableBalancing> theta0 = make();
  theta0->set_params_vector(center);

  auto evaluate = [&](const std::vector<double>& params) {
    std::unique_ptr<TrainableBalancing> theta = make();
    theta->set_params_vector(params);
    ChainBatch batch = ChainBatch::initialize(target, cfg.batch, derive_seed(seed, 1));
    Rng reg_rng(derive_seed(seed, 2));
    return objective_step(*theta, *theta0, target, batch, cfg, reg_rng).j_hat;
  };

  std::unique_ptr<TrainableBalancing> theta = make();
  theta->set_params_vector(center);
  ChainBatch batch = ChainBatch::initialize(target, cfg.batch, derive_seed(seed, 1));
  Rng reg_rng(derive_seed(seed, 2));
  const ObjectiveStep step = objective_step(*theta, *theta0, target, batch, cfg, reg_rng);

  const std::vector<double> fd = finite_difference(evaluate, center);
  double worst = 0.0;
  for (std::size_t j = 0; j < center.size(); ++j)
    worst = std::max(worst, relative_error(step.grad[j], fd[j]));
  return worst;
}

}  // namespace

std::vector<Check> gradient_suite(double tol) {
  std::vector<Check> checks;

  const double lsb1_gap = lsb1_eval_gradient_gap(100, derive_seed(11, 1));
  checks.push_back({"gradient/lsb1_eval", lsb1_gap <= 1e-5, lsb1_gap, 1e-5});

  const double lsb2_gap = lsb2_eval_gradient_gap(50, derive_seed(11, 2));
  checks.push_back({"gradient/lsb2_eval", lsb2_gap <= tol, lsb2_gap, tol});

  const IsingModel small(2, 1.0, random_alpha(4, derive_seed(11, 3)));

  Rng theta_rng(derive_seed(11, 4));
  std::vector<double> lsb1_center(4);
  for (double& t : lsb1_center) t = 0.5 * theta_rng.normal();
  const double batch1 = objective_gradient_gap(
      small, [] { return std::make_unique<Lsb1Trainable>(); }, lsb1_center, 4,
      derive_seed(11, 5));
  checks.push_back({"gradient/objective_lsb1", batch1 <= tol, batch1, tol});

  Rng net_rng(derive_seed(11, 6));
  MonotonicNet small_net(3, 3, net_rng);
  const double batch2 = objective_gradient_gap(
      small,
      [] {
        return std::make_unique<Lsb2Trainable>(MonotonicNet(3, 3));
      },
      small_net.params(), 4, derive_seed(11, 7));
  checks.push_back({"gradient/objective_lsb2", batch2 <= tol, batch2, tol});

  return checks;
}

std::vector<Check> tv_suite(std::int64_t steps, double bound) {
  std::vector<Check> checks;
  const IsingModel target(3, 1.0, random_alpha(9, derive_seed(13, 1)));
  const std::vector<double> exact = exact_distribution(target);
  for (FixedBalancingKind kind : kFixedKinds) {
    FixedBalancing g(kind);
    Rng rng(derive_seed(13, 2 + static_cast<std::uint64_t>(kind)));
    DiscreteState state = target.uniform_state(rng);
    std::vector<double> counts(exact.size(), 0.0);
    for (std::int64_t k = 0; k < steps; ++k) {
      mh_step(target, state, g, rng);
      counts[state_to_index(target, state)] += 1.0;
    }
    for (double& c : counts) c /= static_cast<double>(steps);
    const double tv = tv_distance(counts, exact);
    checks.push_back({std::string("tv/ising3x3/") + fixed_kind_name(kind), tv <= bound, tv,
                      bound});
  }
  return checks;
}

std::vector<Check> balancing_residual_suite(int draws, double rel_bound) {
  std::vector<Check> checks;
  for (const NamedBalancing& nb : oracle_balancing_set()) {
    Rng rng(derive_seed(17, 1));
    double worst = 0.0;
    for (int k = 0; k < draws; ++k) {
      const double delta = rng.uniform(-30.0, 30.0);
      const double g_t = std::exp(nb.g->log_g(delta));
      const double t_g_inv = std::exp(delta + nb.g->log_g(-delta));
      worst = std::max(worst, std::abs(g_t - t_g_inv) / std::max(1.0, g_t));
    }
    checks.push_back({"balancing_residual/" + nb.name, worst <= rel_bound, worst, rel_bound});
  }
  return checks;
}

int run_scope(const std::string& scope, std::ostream& out) {
  std::vector<Check> checks;
  auto want = [&](const char* name) { return scope == "all" || scope == name; };
  bool known = scope == "all";
  if (want("db")) {
    known = true;
    auto s = detailed_balance_suite();
    checks.insert(checks.end(), s.begin(), s.end());
  }
  if (want("invariance")) {
    known = true;
    auto s = invariance_suite();
    checks.insert(checks.end(), s.begin(), s.end());
  }
  if (want("regularity")) {
    known = true;
    auto s = regularity_suite();
    checks.insert(checks.end(), s.begin(), s.end());
  }
  if (want("equivalence")) {
    known = true;
    auto s = equivalence_suite();
    checks.insert(checks.end(), s.begin(), s.end());
  }
  if (want("grad")) {
    known = true;
    auto s = gradient_suite();
    checks.insert(checks.end(), s.begin(), s.end());
  }
  if (want("tv")) {
    known = true;
    auto s = tv_suite();
    checks.insert(checks.end(), s.begin(), s.end());
  }
  if (!known) throw ConfigError("unknown oracle scope: " + scope);

  int failures = 0;
  for (const Check& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << " (observed=" << c.observed
        << ", bound=" << c.bound << ")\n";
    if (!c.passed) ++failures;
  }
  out << checks.size() - failures << "/" << checks.size() << " properties passed\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace lsb::oracle
