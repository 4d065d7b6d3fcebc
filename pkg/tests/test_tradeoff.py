import math

import numpy as np
import pytest

from accmat.accuracy import accuracy_matrix, accuracy_parameter, is_optimal
from accmat.povm import PovmError, minimal_tomography_povm, random_direction, random_povm, standard_tomography_povm, validate_povm
from accmat.tradeoff import (
    accessible_region,
    boundary_chi_b,
    equality_povm,
    error_backaction,
    on_equality_surface,
    pairwise_chi_form,
    pairwise_report,
    pairwise_tradeoff,
    projective_channel,
    region_label,
    triple_tradeoff,
    weak_measurement,
)


def test_fig2_boundary_point(fig2_axes):
    assert boundary_chi_b(0.1, math.pi / 6) == pytest.approx(36 / 37)
    assert on_equality_surface(0.1, 36 / 37, math.cos(math.pi / 6))


def test_pairwise_report_infinite_error():
    rep = pairwise_report(1.0, 0.0, 0.0)
    assert rep.satisfied
    assert math.isnan(rep.lhs)  # 0 * inf
    assert rep.to_json()["lhs"]["indeterminate"]


def test_pairwise_violation_detected():
    rep = pairwise_report(0.8, 0.8, 0.0)
    assert not rep.satisfied
    assert rep.slack == pytest.approx(1 - 1.6)


def test_random_pairwise(rng):
    for seed in range(500):
        rep = pairwise_tradeoff(random_povm(2 + seed % 7, seed), random_direction(rng), random_direction(rng))
        assert rep.satisfied


@pytest.mark.parametrize("theta", [0.3, math.pi / 6, math.pi / 3, math.pi / 2])
def test_equality_povm_on_surface(theta, rng):
    n_a = np.array([0.0, 0.0, 1.0])
    n_b = np.array([math.sin(theta), 0.0, math.cos(theta)])
    for chi_a in np.linspace(0.05, 0.95, 7):
        chi_b = boundary_chi_b(chi_a, theta)
        p = equality_povm(n_a, n_b, chi_a, chi_b)
        assert validate_povm(p).valid
        assert is_optimal(p)
        a = accuracy_matrix(p)
        assert accuracy_parameter(a, n_a).chi_n == pytest.approx(chi_a, abs=1e-10)
        assert accuracy_parameter(a, n_b).chi_n == pytest.approx(chi_b, abs=1e-10)
        assert pairwise_tradeoff(p, n_a, n_b).equality


def test_equality_povm_rejects_interior_point():
    with pytest.raises(PovmError):
        equality_povm([0, 0, 1], [1, 0, 0], 0.3, 0.3)


def test_equality_povm_degenerate_is_projection():
    p = equality_povm([0, 0, 1], [1, 0, 0], 1.0, 0.0)
    assert p.m == 2
    assert np.allclose(np.abs(p.v[0]), [0, 0, 1])


def test_triple_tomography_equality():
    rep = triple_tradeoff(standard_tomography_povm(), [1, 0, 0], [0, 1, 0], [0, 0, 1])
    assert rep.lhs == pytest.approx(8.0)
    assert rep.equality and rep.satisfied


def test_triple_minimal_tomography_axes():
    rep = triple_tradeoff(minimal_tomography_povm(), [1, 0, 0], [0, 1, 0], [0, 0, 1])
    assert rep.epsilons == pytest.approx((2.0, 2.0, 2.0))


def test_triple_rejects_coplanar():
    with pytest.raises(PovmError):
        triple_tradeoff(standard_tomography_povm(), [1, 0, 0], [0, 1, 0], [1 / math.sqrt(2), 1 / math.sqrt(2), 0])


def test_region_theta_pi_over_2_is_triangle():
    rows = accessible_region(math.pi / 2, 21)
    for a, b, feasible, _ in rows:
        assert feasible == (a + b <= 1 + 1e-12)


def test_region_theta_zero_is_square():
    assert all(f for _, _, f, _ in accessible_region(0.0, 11))


def test_region_labels():
    assert region_label(0.3, 0.3) == "P"
    assert region_label(0.1, 36 / 37 - 1e-6) == "Q"
    assert region_label(0.9, 0.9) == "R"
    assert pairwise_chi_form(1.0, 1.0, 1.0) == 1.0


def test_weak_measurement_backaction_attains_bound():
    # eps_A = 1/k^2 - 1 and d_B = k^2/(1 - k^2): product is exactly 1
    for k in (0.2, 0.5, 0.8):
        rep = error_backaction(weak_measurement(k, [0, 0, 1]), [0, 0, 1], [1, 0, 0])
        assert rep.eps_a == pytest.approx(1 / k**2 - 1)
        assert rep.d_b == pytest.approx(k**2 / (1 - k**2))
        assert rep.tradeoff.chi_form_lhs == pytest.approx(1.0)
        assert rep.tradeoff.satisfied


def test_projective_backaction_destroys_orthogonal_axis():
    rep = error_backaction(projective_channel([0, 0, 1]), [0, 0, 1], [1, 0, 0])
    assert rep.eps_a == pytest.approx(0.0, abs=1e-12)
    assert math.isinf(rep.d_b)
