import math
import os

import pylsb

FIXTURES = os.environ.get("LSB_FIXTURE_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "fixtures"))


def make_ising(n=4, lam=0.8, seed=3):
    truth = pylsb.square_ground_truth(n)
    alpha = pylsb.generate_observation(1.0, 3.0, truth, seed)
    return pylsb.IsingModel(n, lam, alpha)


def brute_force_logp(n, lam, alpha, x):
    spins = [2 * v - 1 for v in x]
    total = sum(a * s for a, s in zip(alpha, spins))
    for r in range(n):
        for c in range(n):
            if c + 1 < n:
                total += lam * spins[r * n + c] * spins[r * n + c + 1]
            if r + 1 < n:
                total += lam * spins[r * n + c] * spins[(r + 1) * n + c]
    return total


def test_ising_log_prob_matches_brute_force():
    model = make_ising()
    x = [0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 1, 0, 0, 0, 1, 1]
    assert math.isclose(model.log_prob(x), brute_force_logp(4, 0.8, model.alpha, x), rel_tol=1e-12)


def test_delta_log_prob_is_local():
    model = make_ising()
    x = [0] * 16
    y = list(x)
    y[5] = 1
    assert math.isclose(
        model.delta_log_prob(x, 5, 1), model.log_prob(y) - model.log_prob(x), rel_tol=1e-12
    )


def test_balancing_identity():
    for name in ("barker", "sqrt", "min_one", "max_one"):
        g = pylsb.Balancing.fixed(name)
        for delta in (-3.0, -0.5, 0.0, 1.2, 8.0):
            g_t = math.exp(g.log_g(delta))
            t_g_inv = math.exp(delta + g.log_g(-delta))
            assert abs(g_t - t_g_inv) <= 1e-9 * max(1.0, g_t)
    net = pylsb.Balancing.lsb2(blocks=4, units=4, seed=9)
    for delta in (-5.0, 0.3, 6.0):
        g_t = math.exp(net.log_g(delta))
        assert abs(g_t - math.exp(delta + net.log_g(-delta))) <= 1e-9 * max(1.0, g_t)


def test_uai_parse_and_chain():
    model = pylsb.parse_uai(os.path.join(FIXTURES, "uai", "chain2.uai"))
    assert model.num_vars() == 2
    assert math.isclose(model.log_prob([0, 0]), math.log(0.6) + math.log(0.9), rel_tol=1e-12)

    logp, accepted, state = pylsb.run_chain(model, pylsb.Balancing.fixed("barker"), [0, 0], 500, 1)
    assert len(logp) == 501
    assert len(accepted) == 500
    assert all(v in (0, 1) for v in state)


def test_chain_is_deterministic():
    model = make_ising()
    g = pylsb.Balancing.fixed("sqrt")
    a = pylsb.run_chain(model, g, [0] * 16, 300, seed=11)
    b = pylsb.run_chain(model, g, [0] * 16, 300, seed=11)
    assert a == b


def test_effective_sample_size_white_noise():
    import random

    rng = random.Random(5)
    trace = [rng.gauss(0, 1) for _ in range(20000)]
    ess, ess_per, tau, trunc = pylsb.effective_sample_size(trace)
    assert abs(ess - 20000) / 20000 < 0.1
    assert tau >= 1.0


def test_exact_distribution_and_tv():
    model = make_ising(n=2, lam=1.0)
    p = pylsb.exact_distribution(model)
    assert math.isclose(sum(p), 1.0, rel_tol=1e-12)

    rows = pylsb.exact_transition_matrix(model, pylsb.Balancing.fixed("barker"))
    for x in range(len(p)):
        col = sum(rows[xp][x] for xp in range(len(p)))
        assert math.isclose(col, 1.0, rel_tol=1e-10)
    # stationarity: T p = p
    tp = [sum(rows[xp][x] * p[x] for x in range(len(p))) for xp in range(len(p))]
    assert max(abs(a - b) for a, b in zip(tp, p)) < 1e-10

    assert pylsb.tv_distance(p, p) == 0.0


def test_training_runs_and_returns_weights():
    model = make_ising(n=3, lam=1.0)
    g, j_hat, mean_logp, skipped, total = pylsb.train(
        model, "lsb1", iters=40, batch=4, seed=2
    )
    assert len(j_hat) == 40
    assert len(mean_logp) == 40
    assert total == 2 * 4 * 40
    assert skipped == 0
    assert g.param_count() == 4
    assert all(math.isfinite(v) for v in j_hat)
