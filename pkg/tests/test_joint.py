
import numpy as np
import pytest

from accmat.accuracy import accuracy_matrix, accuracy_parameter
from accmat.joint import (
    JointPovm,
    cofactor_accuracy,
    corollary10_check,
    corollary10_sweep,
    is_nonideal_joint,
    legacy_dominance,
    legacy_parameters,
    marginal_accuracy_closed_form,
    marginals,
    random_nonideal_joint,
    relabel_equality_povm,
    verify_theorem10,
)
from accmat.povm import PovmError, nonideal_povm, random_direction, validate_povm
from accmat.tradeoff import equality_povm


def test_random_joint_is_nonideal(rng):
    for seed in range(50):
        n_a, n_b = random_direction(rng), random_direction(rng)
        jp = random_nonideal_joint(n_a, n_b, seed)
        assert validate_povm(jp.povm).valid
        assert is_nonideal_joint(jp, n_a, n_b)


def test_theorem10_three_ways(rng):
    for seed in range(200):
        n_a, n_b = random_direction(rng), random_direction(rng)
        jp = random_nonideal_joint(n_a, n_b, seed)
        checks = verify_theorem10(jp, n_a, n_b)
        for name, n in (("A", n_a), ("B", n_b)):
            assert checks[name].difference <= 1e-10
            oracle = cofactor_accuracy(jp, n)
            if oracle is not None:
                assert oracle == pytest.approx(checks[name].chi_joint, abs=1e-10)
            # the marginal POVM on its own gives the same accuracy
            e_a, e_b = marginals(jp)
            m = e_a if name == "A" else e_b
            assert accuracy_parameter(accuracy_matrix(m), n).chi_n == pytest.approx(checks[name].chi_joint, abs=1e-10)


def test_cofactor_matches_pinv_for_generic_full_rank():
    # an arbitrary four-element POVM (not necessarily a nonideal joint) also works
    from accmat.povm import random_povm

    for seed in range(50):
        p = random_povm(4, seed)
        jp = JointPovm(p)
        n = random_direction(np.random.default_rng(seed))
        oracle = cofactor_accuracy(jp, n)
        if oracle is not None:
            assert oracle == pytest.approx(accuracy_parameter(accuracy_matrix(p), n).chi_n, rel=1e-9)


def test_equality_povm_as_joint(fig2_axes):
    n_a, n_b = fig2_axes
    # the pairing puts the A marginal along x1 + x2 = sqrt(chi_A) n_A / 2
    jp = relabel_equality_povm(equality_povm(n_a, n_b, 0.1, 36 / 37))
    assert is_nonideal_joint(jp, n_a, n_b)
    checks = verify_theorem10(jp, n_a, n_b)
    assert checks["A"].chi_joint == pytest.approx(0.1)
    assert checks["B"].chi_joint == pytest.approx(36 / 37)
    assert marginal_accuracy_closed_form(jp, "A") == pytest.approx(0.1)


def test_verify_rejects_non_joint():
    jp = random_nonideal_joint([0, 0, 1], [1, 0, 0], 3)
    with pytest.raises(PovmError):
        verify_theorem10(jp, [0, 1, 0], [1, 0, 0])


def test_corollary_sweep_matches_single_checks(rng):
    jp = random_nonideal_joint([0, 0, 1], [1, 0, 0], 7)
    dirs = [random_direction(rng) for _ in range(30)]
    singles = sum(not corollary10_check(jp, n, w).satisfied for n in dirs for w in "AB")
    assert corollary10_sweep(jp, dirs) == singles == 0


def test_legacy_parameters_closed_form():
    r, e1 = 0.3, 0.6
    e2 = r * e1 / (1 - r)
    lp = legacy_parameters(nonideal_povm([0, 0, 1], r, e1, e2))
    det_f = 2 * r * (1 - r) * (e1 + e2)
    assert lp.det_f == pytest.approx(det_f)
    assert lp.x_alpha == pytest.approx(det_f**2)
    assert lp.chi_alpha == pytest.approx(e1 * e2)
    assert legacy_dominance(nonideal_povm([0, 0, 1], r, e1, e2))


def test_legacy_dominance_grid():
    for r in np.linspace(0.1, 0.9, 9):
        top = min(1.0, (1 - r) / r)
        for e1 in np.linspace(0.05, top, 9):
            e2 = min(1.0, r * e1 / (1 - r))
            assert legacy_dominance(nonideal_povm([1, 0, 0], r, e1, e2))


def test_json_round_trip():
    jp = random_nonideal_joint([0, 0, 1], [0, 1, 0], 1)
    back = JointPovm.from_json(jp.to_json())
    assert back.povm.allclose(jp.povm)
    with pytest.raises(PovmError):
        JointPovm.from_json({"elements": {"++": {"r": 1, "v": [0, 0, 0]}}})
