"""Recovering direction distributions from exact outcome probabilities.

Outcome probabilities depend on the state only through ``M s`` where row
``k`` of ``M`` is ``r_k v_k``; directions in the span of the ``v_k`` (the
reconstructive subspace) are exactly those whose distribution is fixed by
the outcome probabilities.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .accuracy import SUPPORT_RTOL, accuracy_matrix
from .povm import Povm, PovmError, direction

CONSISTENCY_TOL = 1e-8


class NotReconstructive(PovmError):
    """The requested direction lies outside the reconstructive subspace."""


@dataclass(frozen=True, eq=False)
class MeasurementMatrix:
    matrix: np.ndarray
    offsets: np.ndarray

    @property
    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.matrix, compute_uv=False)

    @property
    def rank(self) -> int:
        sv = self.singular_values
        if sv.size == 0 or sv[0] == 0.0:
            return 0
        return int(np.sum(sv > SUPPORT_RTOL * max(1.0, sv[0])))

    def column_space(self) -> np.ndarray:
        """Orthonormal basis (as columns) of the row space of ``M``, i.e. ``V(E)``."""
        _, sv, vt = np.linalg.svd(self.matrix)
        return vt[: self.rank].T


def measurement_matrix(p: Povm) -> MeasurementMatrix:
    return MeasurementMatrix(p.r[:, None] * p.v, p.r.copy())


def is_reconstructive(p: Povm, n) -> bool:
    n = direction(n)
    return accuracy_matrix(p).in_support(n)


def is_tomographically_complete(p: Povm) -> bool:
    return accuracy_matrix(p).support_rank == 3


def reconstruct_state_class(p: Povm, q) -> np.ndarray:
    """Minimum-norm Bloch vector reproducing the outcome probabilities ``q``.

    Solves ``M s = q - r`` by pseudo-inverse; the result has no component
    outside the reconstructive subspace. Raises :class:`PovmError` if the
    residual exceeds ``1e-8``.
    """
    q = np.asarray(q, dtype=float)
    mm = measurement_matrix(p)
    if q.shape != mm.offsets.shape:
        raise PovmError(f"expected {mm.offsets.size} probabilities, got {q.size}")
    rhs = q - mm.offsets
    u, sv, vt = np.linalg.svd(mm.matrix, full_matrices=False)
    k = mm.rank
    s = vt[:k].T @ ((u[:, :k].T @ rhs) / sv[:k]) if k else np.zeros(3)
    residual = float(np.linalg.norm(mm.matrix @ s - rhs))
    if residual > CONSISTENCY_TOL:
        raise PovmError(f"outcome distribution inconsistent with the POVM (residual {residual:.3g})")
    return s


def reconstruct_direction_probability(p: Povm, q, n) -> tuple[float, float]:
    """Distribution of ``n . sigma`` implied by outcome probabilities ``q``."""
    n = direction(n)
    a = accuracy_matrix(p)
    if not a.in_support(n):
        raise NotReconstructive(f"direction {n.tolist()} is not in the reconstructive subspace")
    s = reconstruct_state_class(p, q)
    ns = float(n @ s)
    return (1.0 + ns) / 2.0, (1.0 - ns) / 2.0


def reconstruction_json(p: Povm, q, n) -> dict:
    n = direction(n)
    try:
        plus, minus = reconstruct_direction_probability(p, q, n)
    except NotReconstructive:
        return {"direction": n.tolist(), "p_plus": None, "p_minus": None, "reconstructive": False}
    return {"direction": n.tolist(), "p_plus": plus, "p_minus": minus, "reconstructive": True}
