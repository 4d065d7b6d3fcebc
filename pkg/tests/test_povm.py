import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from accmat.povm import (
    Povm,
    PovmError,
    apply_transition,
    binary_parameters,
    binary_transition_matrix,
    bloch_vector,
    check_stochastic,
    coarse_grain,
    direction,
    direction_distribution,
    minimal_tomography_povm,
    nonideal_povm,
    outcome_probabilities,
    partition_matrix,
    probabilistic_mixture,
    projection_povm,
    random_extremal_povm,
    random_povm,
    sample_outcomes,
    standard_tomography_povm,
    trivial_povm,
    validate_povm,
)
from accmat.qubit import SIGMA, density_matrix


def test_bloch_vector_rejects_outside_ball():
    with pytest.raises(PovmError):
        bloch_vector([1.0, 0.1, 0.0])
    assert np.allclose(bloch_vector([0.0, 0.6, 0.8]), [0.0, 0.6, 0.8])


def test_direction_requires_unit_norm():
    with pytest.raises(PovmError):
        direction([0.0, 0.0, 0.5])
    with pytest.raises(PovmError):
        direction([0.0, 0.0])


def test_validate_reports_every_violation():
    report = validate_povm([(0.5, [0, 0, 1.1]), (0.6, [0, 0, -1])])
    conditions = {v.condition for v in report.violations}
    assert not report.valid
    assert {"|v_k| <= 1", "sum r_k = 1", "sum r_k v_k = 0"} <= conditions


def test_validate_never_raises_on_garbage():
    report = validate_povm([("a", [0, 0])])
    assert not report.valid


def test_presets_are_valid():
    for p in (standard_tomography_povm(), minimal_tomography_povm(), projection_povm([1, 0, 0]), trivial_povm()):
        assert validate_povm(p).valid


def test_outcome_probabilities_match_born_rule(rng):
    for seed in range(20):
        p = random_povm(5, seed)
        s = rng.uniform(-0.5, 0.5, 3)
        rho = density_matrix(s)
        born = [np.trace(e @ rho).real for e in p.operators()]
        assert np.allclose(outcome_probabilities(p, s), born, atol=1e-14)


def test_direction_distribution_projection():
    plus, minus = direction_distribution([1, 0, 0], [0.5, 0, math.sqrt(3) / 2])
    assert plus == pytest.approx(0.75)
    assert minus == pytest.approx(0.25)


def test_nonideal_balance_enforced():
    with pytest.raises(PovmError):
        nonideal_povm([0, 0, 1], 0.3, 0.5, 0.5)
    p = nonideal_povm([0, 0, 1], 0.25, 0.9, 0.3)
    assert validate_povm(p).valid
    n, r, e1, e2 = binary_parameters(p)
    assert (r, e1, e2) == pytest.approx((0.25, 0.9, 0.3))
    assert np.allclose(n, [0, 0, 1])


def test_binary_transition_reproduces_povm():
    p = nonideal_povm([0, 1, 0], 0.4, 0.6, 0.4)
    f = binary_transition_matrix(p)
    check_stochastic(f)
    q = apply_transition(f, projection_povm([0, 1, 0]))
    assert q.allclose(p)


def test_check_stochastic_rejects_bad_columns():
    with pytest.raises(PovmError):
        check_stochastic([[0.5, 0.5], [0.6, 0.5]])
    with pytest.raises(PovmError):
        check_stochastic([[1.1, 0.0], [-0.1, 1.0]])


def test_coarse_grain_sums_elements():
    p = standard_tomography_povm()
    q = coarse_grain(p, [[0, 1], [2, 3, 4, 5]])
    assert np.allclose(q.r, [1 / 3, 2 / 3])
    assert np.allclose(q.v, 0.0)
    with pytest.raises(PovmError):
        partition_matrix([[0, 1], [1, 2]], 3)


def test_mixture_weights():
    p = probabilistic_mixture(0.3, projection_povm([1, 0, 0]), projection_povm([0, 0, 1]))
    assert np.allclose(p.r, [0.15, 0.15, 0.35, 0.35])
    assert validate_povm(p).valid


def test_json_round_trip():
    p = random_povm(4, 3)
    assert Povm.from_json(p.to_json()).allclose(p)
    with pytest.raises(PovmError):
        Povm.from_json({"items": []})


def test_sampling_is_seeded():
    p = standard_tomography_povm()
    a = sample_outcomes(p, [0.2, 0, 0.3], 1000, seed=5)
    b = sample_outcomes(p, [0.2, 0, 0.3], 1000, seed=5)
    assert np.array_equal(a, b)
    assert a.sum() == 1000


def test_sampling_frequencies_converge():
    p = standard_tomography_povm()
    s = np.array([0.3, -0.2, 0.5])
    counts = sample_outcomes(p, s, 200_000, seed=1)
    q = outcome_probabilities(p, s)
    assert np.all(np.abs(counts / 200_000 - q) < 5 * np.sqrt(q / 200_000))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**31 - 1))
def test_random_povm_valid(m, seed):
    p = random_povm(m, seed)
    assert p.m == m
    assert validate_povm(p).valid


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**31 - 1))
def test_random_extremal_povm_rank_one(m, seed):
    p = random_extremal_povm(m, seed)
    assert validate_povm(p).valid
    assert np.allclose(np.linalg.norm(p.v, axis=1), 1.0, atol=1e-12)


def test_operators_sum_to_identity():
    ops = minimal_tomography_povm().operators()
    assert np.allclose(ops.sum(axis=0), np.eye(2))
    assert np.allclose(SIGMA.shape, (3, 2, 2))
