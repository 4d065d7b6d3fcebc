"""Finite-sample maximum-likelihood estimation of the Bloch vector."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .accuracy import accuracy_matrix, fisher_directional, fisher_matrix
from .povm import Povm, PovmError, bloch_vector, direction, outcome_probabilities, probabilistic_mixture, sample_outcomes

MLE_TOL = 1e-10
MLE_MAX_ITER = 100_000


@dataclass(frozen=True, eq=False)
class MleResult:
    s_star: np.ndarray
    log_likelihood: float
    iterations: int
    converged: bool


def log_likelihood(p: Povm, counts, s) -> float:
    """``sum_k c_k ln(r_k (1 + v_k . s))``; ``-inf`` if an observed outcome is impossible."""
    return float(kernels.log_likelihood(p.r, p.v, np.asarray(counts, dtype=float), np.asarray(s, dtype=float)))


def log_likelihood_grad(p: Povm, counts, s) -> np.ndarray:
    return np.asarray(kernels.log_likelihood_grad(p.r, p.v, np.asarray(counts, dtype=float), np.asarray(s, dtype=float)))


def mle_bloch(p: Povm, counts, tol: float = MLE_TOL, max_iter: int = MLE_MAX_ITER, backend=None) -> MleResult:
    """Maximum-likelihood Bloch vector restricted to the reconstructive subspace.

    Projected gradient ascent on the unit ball with Barzilai-Borwein trial
    steps and Armijo backtracking, started at the origin. The objective is
    the log-likelihood divided by the total count; convergence is declared
    when the projected-gradient step has norm at most ``tol``.
    """
    counts = np.asarray(counts, dtype=float)
    if counts.shape != p.r.shape:
        raise PovmError(f"expected {p.m} counts, got {counts.size}")
    total = counts.sum()
    if total < 1:
        raise PovmError("at least one count is needed")
    basis = accuracy_matrix(p).support_basis
    observed = counts > 0
    w = p.v[observed] @ basis
    freq = counts[observed] / total
    impl = backend or kernels
    t, iterations, converged = impl.mle_ascent(w, freq, tol, max_iter)
    s = basis @ np.asarray(t, dtype=float) if basis.shape[1] else np.zeros(3)
    return MleResult(s, log_likelihood(p, counts, s), int(iterations), bool(converged))


def estimate_direction_probability(result: MleResult, n) -> float:
    return float((1.0 + direction(n) @ result.s_star) / 2.0)


def crb_std(p: Povm, state, n, n_samples: int) -> float:
    """Asymptotic standard deviation of the estimate of ``p(+; n)``.

    ``(1/2) sqrt(1 / (N I(n)))``; infinite when ``n`` leaves the support.
    """
    info = fisher_directional(fisher_matrix(p, state), n)
    if info <= 0.0:
        return math.inf
    return 0.5 * math.sqrt(1.0 / (n_samples * info))


def power_grid(n_max: int, start: int = 8) -> list[int]:
    """Powers of two from ``start`` up to ``n_max``."""
    out = []
    n = start
    while n <= n_max:
        out.append(n)
        n *= 2
    return out


@dataclass(frozen=True)
class TrajectoryPoint:
    n: int
    p_plus: tuple[float, ...]


@dataclass(frozen=True)
class Trajectory:
    trial: int
    points: tuple[TrajectoryPoint, ...]


def simulate_trajectories(p: Povm, state, n_max: int, trials: int, directions, seed: int, grid=None) -> list[Trajectory]:
    """Running MLE estimates of ``p(+; n)`` along one outcome sequence per trial.

    Trial ``t`` draws its ``n_max`` outcomes from a generator seeded with
    ``seed + t`` and re-estimates at every grid size.
    """
    p.require_valid()
    s = bloch_vector(state)
    q = np.clip(outcome_probabilities(p, s), 0.0, None)
    q = q / q.sum()
    dirs = [direction(n) for n in directions]
    grid = power_grid(n_max) if grid is None else list(grid)
    out = []
    for trial in range(trials):
        rng = np.random.default_rng(seed + trial)
        outcomes = rng.choice(p.m, size=n_max, p=q)
        points = []
        for n in grid:
            counts = np.bincount(outcomes[:n], minlength=p.m)
            res = mle_bloch(p, counts)
            points.append(TrajectoryPoint(n, tuple(estimate_direction_probability(res, d) for d in dirs)))
        out.append(Trajectory(trial, tuple(points)))
    return out


def repeated_estimates(p: Povm, state, n_samples: int, trials: int, directions, seed: int) -> np.ndarray:
    """Independent MLE estimates of ``p(+; n)``; shape ``(trials, len(directions))``."""
    dirs = [direction(n) for n in directions]
    out = np.empty((trials, len(dirs)))
    for trial in range(trials):
        res = mle_bloch(p, sample_outcomes(p, state, n_samples, seed + trial))
        out[trial] = [estimate_direction_probability(res, d) for d in dirs]
    return out


@dataclass(frozen=True)
class SplitStrategyReport:
    chi_a: float
    chi_b: float
    total: float
    simultaneous_advantage: bool
    mixture: Povm


def split_strategy_comparison(n_a, n_b, chi_a: float, chi_b: float, xi: float) -> SplitStrategyReport:
    """Accuracies of splitting samples between two separate nonideal measurements.

    Each group uses a symmetric nonideal measurement (``r = 1/2``,
    ``eps = sqrt(chi)``). ``simultaneous_advantage`` flags targets with
    ``chi_A + chi_B > 1``, which no split strategy reaches.
    """
    from .accuracy import accuracy_parameter
    from .povm import nonideal_povm

    n_a, n_b = direction(n_a), direction(n_b)
    ea, eb = math.sqrt(chi_a), math.sqrt(chi_b)
    mix = probabilistic_mixture(xi, nonideal_povm(n_a, 0.5, ea, ea), nonideal_povm(n_b, 0.5, eb, eb))
    a = accuracy_matrix(mix)
    ca = accuracy_parameter(a, n_a).chi_n
    cb = accuracy_parameter(a, n_b).chi_n
    return SplitStrategyReport(ca, cb, ca + cb, chi_a + chi_b > 1.0, mix)
