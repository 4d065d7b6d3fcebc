import math

import numpy as np
import pytest

from accmat.estimation import (
    crb_std,
    estimate_direction_probability,
    log_likelihood,
    log_likelihood_grad,
    mle_bloch,
    power_grid,
    repeated_estimates,
    simulate_trajectories,
    split_strategy_comparison,
)
from accmat.povm import (
    PovmError,
    minimal_tomography_povm,
    outcome_probabilities,
    projection_povm,
    random_povm,
    random_state,
    sample_outcomes,
    standard_tomography_povm,
    trivial_povm,
)
from accmat.tradeoff import equality_povm


def test_log_likelihood_at_origin():
    p = standard_tomography_povm()
    c = np.array([3, 1, 4, 1, 5, 9])
    assert log_likelihood(p, c, np.zeros(3)) == pytest.approx(float(c @ np.log(p.r)))


def test_log_likelihood_impossible_outcome():
    assert log_likelihood(projection_povm([0, 0, 1]), [1, 1], [0, 0, 1]) == -math.inf


def test_gradient_finite_differences(rng):
    h = 1e-6
    for seed in range(30):
        p = random_povm(2 + seed % 7, seed)
        s = 0.8 * random_state(rng)
        c = rng.integers(0, 30, size=p.m)
        g = log_likelihood_grad(p, c, s)
        fd = [(log_likelihood(p, c, s + h * e) - log_likelihood(p, c, s - h * e)) / (2 * h) for e in np.eye(3)]
        assert np.allclose(g, fd, rtol=1e-5, atol=1e-6)


def test_binomial_mle():
    res = mle_bloch(projection_povm([0, 0, 1]), [60, 40])
    assert res.converged
    assert np.allclose(res.s_star, [0, 0, 0.2], atol=1e-9)


def test_boundary_mle():
    res = mle_bloch(projection_povm([0, 0, 1]), [100, 0])
    assert res.converged
    assert np.allclose(res.s_star, [0, 0, 1], atol=1e-9)


def test_tomography_mle_matches_linear_inversion():
    # frequencies consistent with s = (0.2, -0.1, 0.4) are the unconstrained optimum
    res = mle_bloch(standard_tomography_povm(), [12, 8, 9, 11, 14, 6])
    assert res.converged
    assert np.allclose(res.s_star, [0.2, -0.1, 0.4], atol=1e-8)


def test_mle_stays_in_support():
    res = mle_bloch(projection_povm([1, 0, 0]), [30, 70])
    assert res.s_star[1] == 0.0 and res.s_star[2] == 0.0
    assert res.s_star[0] == pytest.approx(-0.4)


def test_mle_trivial_povm():
    res = mle_bloch(trivial_povm(), [10, 3])
    assert np.array_equal(res.s_star, np.zeros(3))
    assert estimate_direction_probability(res, [0, 0, 1]) == 0.5


def test_mle_ball_constraint(rng):
    p = minimal_tomography_povm()
    for seed in range(30):
        res = mle_bloch(p, sample_outcomes(p, [0, 0.99, 0], 50, seed))
        assert res.converged
        assert np.linalg.norm(res.s_star) <= 1 + 1e-10


def test_mle_is_maximum(rng):
    # no feasible perturbation improves the likelihood
    p = random_povm(5, 2)
    c = sample_outcomes(p, random_state(rng), 500, 3)
    res = mle_bloch(p, c)
    best = log_likelihood(p, c, res.s_star)
    for _ in range(200):
        t = res.s_star + 1e-3 * rng.normal(size=3)
        if np.linalg.norm(t) <= 1:
            assert log_likelihood(p, c, t) <= best + 1e-9


def test_mle_rejects_bad_counts():
    with pytest.raises(PovmError):
        mle_bloch(projection_povm([0, 0, 1]), [1, 2, 3])
    with pytest.raises(PovmError):
        mle_bloch(projection_povm([0, 0, 1]), [0, 0])


def test_crb_closed_forms():
    assert crb_std(projection_povm([0, 0, 1]), np.zeros(3), [0, 0, 1], 400) == pytest.approx(0.5 / 20)
    assert crb_std(standard_tomography_povm(), np.zeros(3), [0.6, 0, 0.8], 300) == pytest.approx(0.5 * math.sqrt(3 / 300))
    assert math.isinf(crb_std(projection_povm([0, 0, 1]), np.zeros(3), [1, 0, 0], 100))


def test_power_grid():
    assert power_grid(100) == [8, 16, 32, 64]


def test_trajectories_deterministic_and_binomial():
    p = projection_povm([0, 0, 1])
    a = simulate_trajectories(p, [0, 0, 0.5], 64, 3, [[0, 0, 1]], seed=4)
    b = simulate_trajectories(p, [0, 0, 0.5], 64, 3, [[0, 0, 1]], seed=4)
    assert a == b
    # the estimate equals the clipped running frequency of "+"
    rng = np.random.default_rng(4)
    q = outcome_probabilities(p, [0, 0, 0.5])
    outcomes = rng.choice(2, size=64, p=q)
    for point in a[0].points:
        freq = np.mean(outcomes[: point.n] == 0)
        assert point.p_plus[0] == pytest.approx(freq, abs=1e-9)


def test_trajectories_trivial_povm():
    traj = simulate_trajectories(trivial_povm(), [0.3, 0, 0], 32, 2, [[1, 0, 0]], seed=0)
    assert all(pt.p_plus == (0.5,) for t in traj for pt in t.points)


def test_fig2_estimates_converge(fig2_axes):
    n_a, n_b = fig2_axes
    p = equality_povm(n_a, n_b, 0.1, 36 / 37)
    est = repeated_estimates(p, [1, 0, 0], 20_000, 30, [n_a, n_b], seed=0)
    assert abs(est[:, 0].mean() - 0.5) < 0.02
    assert abs(est[:, 1].mean() - 0.75) < 0.01


def test_crb_attained_for_interior_state():
    # away from the boundary the constrained estimator is asymptotically efficient
    p = standard_tomography_povm()
    s = np.array([0.2, -0.1, 0.3])
    n = np.array([0.0, 0.6, 0.8])
    est = repeated_estimates(p, s, 5000, 300, [n], seed=10)[:, 0]
    assert est.std(ddof=1) == pytest.approx(crb_std(p, s, n, 5000), rel=0.15)
    assert abs(est.mean() - (1 + n @ s) / 2) < 3 * est.std(ddof=1) / math.sqrt(300)


def test_split_strategy():
    rep = split_strategy_comparison([0, 0, 1], [1, 0, 0], 0.6, 0.7, 0.4)
    assert rep.chi_a == pytest.approx(0.4 * 0.6)
    assert rep.chi_b == pytest.approx(0.6 * 0.7)
    assert rep.total <= 1
    assert rep.simultaneous_advantage
