"""Accuracy matrices, accuracy/error parameters and Fisher information."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .povm import Povm, PovmError, bloch_vector, direction, outcome_probabilities

SUPPORT_RTOL = 1e-9
SUPPORT_NORM_TOL = 1e-9
OPTIMAL_TOL = 1e-9
SYMMETRIC_TOL = 1e-9


def support_cutoff(top_eigenvalue: float) -> float:
    return SUPPORT_RTOL * max(1.0, top_eigenvalue)


@dataclass(frozen=True, eq=False)
class SymmetricSpectrum:
    """A symmetric 3x3 matrix with its Jacobi eigendecomposition.

    Eigenvalues are sorted in descending order; ``eigenvectors[:, i]``
    belongs to ``eigenvalues[i]``.
    """

    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def of(cls, a) -> "SymmetricSpectrum":
        a = np.asarray(a, dtype=float)
        a = 0.5 * (a + a.T)
        w, vecs = kernels.eigh3(a)
        return cls(a, np.asarray(w), np.asarray(vecs))

    @property
    def support_rank(self) -> int:
        return int(np.sum(self.eigenvalues > support_cutoff(self.eigenvalues[0])))

    @property
    def support_basis(self) -> np.ndarray:
        """Orthonormal basis of the support as columns, shape (3, rank)."""
        return self.eigenvectors[:, : self.support_rank]

    def pinv(self) -> np.ndarray:
        k = self.support_rank
        b = self.eigenvectors[:, :k]
        return (b / self.eigenvalues[:k]) @ b.T

    def in_support(self, n) -> bool:
        return float(np.linalg.norm(self.support_basis.T @ n)) >= 1.0 - SUPPORT_NORM_TOL

    def directional(self, n) -> float:
        """``1 / (n . A^+ n)`` on the support, 0 off it."""
        n = direction(n)
        if not self.in_support(n):
            return 0.0
        return float(1.0 / (n @ self.pinv() @ n))


class AccuracyMatrix(SymmetricSpectrum):
    """The accuracy matrix ``sum_k r_k v_k v_k^T`` of a POVM."""

    @property
    def chi(self) -> np.ndarray:
        return self.matrix

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))

    def to_json(self) -> dict:
        return {
            "chi": self.matrix.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "eigenvectors": self.eigenvectors.T.tolist(),
            "trace": self.trace,
            "support_rank": self.support_rank,
        }


class FisherMatrix(SymmetricSpectrum):
    """Fisher information matrix of a POVM at a given state."""


@dataclass(frozen=True)
class AccuracyReport:
    chi_n: float
    eps_n: float
    in_support: bool

    def to_json(self) -> dict:
        from .extreal import encode

        return {"chi": self.chi_n, "eps": encode(self.eps_n), "in_support": self.in_support}


def error_from_accuracy(chi: float) -> float:
    """``1/chi - 1``, with ``inf`` for ``chi = 0``."""
    if chi <= 0.0:
        return math.inf
    return 1.0 / chi - 1.0


def accuracy_matrix(p: Povm) -> AccuracyMatrix:
    return AccuracyMatrix.of(kernels.accuracy_matrix(p.r, p.v))


def accuracy_parameter(a: AccuracyMatrix, n) -> AccuracyReport:
    """Accuracy ``chi(n)`` and error ``eps(n)`` in direction ``n``.

    Directions that leave the support get ``chi = 0`` and ``eps = inf``.
    """
    n = direction(n)
    if not a.in_support(n):
        return AccuracyReport(0.0, math.inf, False)
    chi = min(float(1.0 / (n @ a.pinv() @ n)), 1.0)
    return AccuracyReport(chi, error_from_accuracy(chi), True)


def accuracy_parameters(a: AccuracyMatrix, ns) -> np.ndarray:
    """Vectorised ``chi(n)`` for the rows of ``ns`` (0 off the support)."""
    ns = np.asarray(ns, dtype=float).reshape(-1, 3)
    ns = ns / np.linalg.norm(ns, axis=1)[:, None]
    in_support = np.linalg.norm(ns @ a.support_basis, axis=1) >= 1.0 - SUPPORT_NORM_TOL
    quad = np.einsum("ij,jk,ik->i", ns, a.pinv(), ns)
    out = np.zeros(len(ns))
    out[in_support] = np.minimum(1.0 / quad[in_support], 1.0)
    return out


def direction_accuracy(p: Povm, n) -> AccuracyReport:
    return accuracy_parameter(accuracy_matrix(p), n)


def is_optimal(p: Povm) -> bool:
    return accuracy_matrix(p).trace >= 1.0 - OPTIMAL_TOL


def is_symmetric(p: Povm) -> bool:
    a = accuracy_matrix(p)
    return bool(np.max(np.abs(a.chi - a.trace / 3.0 * np.eye(3))) <= SYMMETRIC_TOL)


def max_accuracy(a: AccuracyMatrix) -> float:
    return float(a.eigenvalues[0])


def fisher_matrix(p: Povm, state) -> FisherMatrix:
    """Fisher information ``sum_k (r_k^2/q_k) v_k v_k^T`` at Bloch vector ``state``.

    Raises :class:`PovmError` when an element with nonzero vector has
    vanishing probability, where the information diverges.
    """
    s = bloch_vector(state)
    q = outcome_probabilities(p, s)
    active = np.linalg.norm(p.v, axis=1) > 0.0
    if np.any(q[active] <= 1e-12):
        raise PovmError("Fisher information diverges: an informative outcome has zero probability")
    return FisherMatrix.of(kernels.fisher_matrix(p.r, p.v, s))


def fisher_directional(i: FisherMatrix, n) -> float:
    return i.directional(n)
