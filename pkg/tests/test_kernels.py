"""The compiled and pure-Python kernels must agree."""
import os
import subprocess
import sys

import numpy as np
import pytest

from accmat import _kernels_py, kernels
from accmat.accuracy import accuracy_matrix
from accmat.estimation import mle_bloch
from accmat.povm import random_direction, random_povm, random_state, sample_outcomes

BACKENDS = kernels.backends()
needs_compiled = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled extension not built")


def test_python_backend_always_available():
    assert "python" in BACKENDS


def test_env_var_forces_fallback():
    env = dict(os.environ, ACCMAT_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import accmat.kernels as k; print(k.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_eigh3_against_numpy(name, rng):
    impl = BACKENDS[name]
    for _ in range(200):
        a = rng.normal(size=(3, 3))
        a = a + a.T
        w, v = impl.eigh3(a)
        assert np.allclose(w, np.linalg.eigvalsh(a)[::-1], atol=1e-12)
        assert np.allclose(v @ np.diag(w) @ v.T, a, atol=1e-12)
        assert np.allclose(v.T @ v, np.eye(3), atol=1e-12)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_eigh3_degenerate(name):
    w, v = BACKENDS[name].eigh3(np.eye(3) / 3)
    assert np.allclose(w, 1 / 3)
    assert np.allclose(np.abs(v), np.eye(3))


@needs_compiled
def test_matrix_kernels_agree(rng):
    c, py = BACKENDS["cython"], _kernels_py
    for seed in range(100):
        p = random_povm(2 + seed % 7, seed)
        s = 0.9 * random_state(rng)
        counts = rng.integers(0, 20, size=p.m).astype(float)
        assert np.allclose(c.accuracy_matrix(p.r, p.v), py.accuracy_matrix(p.r, p.v), atol=1e-15)
        assert np.allclose(c.fisher_matrix(p.r, p.v, s), py.fisher_matrix(p.r, p.v, s), atol=1e-13)
        assert c.log_likelihood(p.r, p.v, counts, s) == pytest.approx(py.log_likelihood(p.r, p.v, counts, s), rel=1e-14)
        assert np.allclose(c.log_likelihood_grad(p.r, p.v, counts, s), py.log_likelihood_grad(p.r, p.v, counts, s))


@needs_compiled
def test_mle_ascent_agrees(rng):
    for seed in range(200):
        p = random_povm(2 + seed % 7, seed)
        s = random_direction(rng) * rng.choice([1.0, 0.95, 0.5])
        counts = sample_outcomes(p, s, int(rng.choice([10, 100, 10_000])), seed)
        a = mle_bloch(p, counts, backend=BACKENDS["cython"])
        b = mle_bloch(p, counts, backend=_kernels_py)
        assert a.converged and b.converged
        assert a.iterations == b.iterations
        assert np.allclose(a.s_star, b.s_star, atol=1e-12)


def test_mle_ascent_empty_support():
    t, iterations, converged = _kernels_py.mle_ascent(np.zeros((2, 0)), [0.5, 0.5])
    assert t == [] and converged


def test_support_basis_orthonormal():
    for seed in range(50):
        b = accuracy_matrix(random_povm(2 + seed % 7, seed)).support_basis
        assert np.allclose(b.T @ b, np.eye(b.shape[1]), atol=1e-12)
