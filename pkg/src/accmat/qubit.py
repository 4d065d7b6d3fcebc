"""2x2 operator helpers and Kraus channels."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .povm import Povm, PovmError, direction

I2 = np.eye(2, dtype=complex)
SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
POSITIVITY_TOL = 1e-10
TRACE_PRESERVING_TOL = 1e-10


def bloch_operator(v) -> np.ndarray:
    """Return ``I + v . sigma``."""
    return I2 + np.einsum("i,ijk->jk", np.asarray(v, dtype=float), SIGMA)


def density_matrix(s) -> np.ndarray:
    return 0.5 * bloch_operator(s)


def projector(n, sign: int = 1) -> np.ndarray:
    """Spectral projector ``(I +/- n . sigma) / 2``."""
    return 0.5 * bloch_operator(sign * direction(n))


def pure_state(s) -> np.ndarray:
    """Unit ket whose Bloch vector is the unit vector ``s``."""
    w, u = np.linalg.eigh(density_matrix(direction(s, tol=1e-10)))
    return u[:, int(np.argmax(w))]


def operator_to_rv(e, tol: float = POSITIVITY_TOL) -> tuple[float, np.ndarray]:
    """Write a positive 2x2 operator as ``r (I + v . sigma)``.

    ``r = tr(E)/2`` and ``v = tr(E sigma)/(2r)``; ``v`` is zero when ``r`` is.
    Raises :class:`PovmError` if ``E`` has an eigenvalue below ``-tol``.
    """
    e = np.asarray(e, dtype=complex)
    herm = 0.5 * (e + e.conj().T)
    if np.max(np.abs(e - herm)) > tol:
        raise PovmError("operator is not Hermitian")
    lo = float(np.linalg.eigvalsh(herm)[0])
    if lo < -tol:
        raise PovmError(f"operator is not positive (eigenvalue {lo:.3g})")
    r = float(np.trace(herm).real) / 2.0
    if r <= 0.0:
        return 0.0, np.zeros(3)
    v = np.array([np.trace(herm @ s).real for s in SIGMA]) / (2.0 * r)
    return r, v


def povm_from_operators(ops, tol: float = POSITIVITY_TOL) -> Povm:
    """Convert positive operators to a :class:`Povm`, dropping zero operators."""
    rs, vs = [], []
    for e in ops:
        r, v = operator_to_rv(e, tol)
        if r > tol:
            rs.append(r)
            vs.append(v)
    return Povm(rs, vs)


def sqrtm_psd(a) -> np.ndarray:
    w, u = np.linalg.eigh(np.asarray(a, dtype=complex))
    return (u * np.sqrt(np.clip(w, 0.0, None))) @ u.conj().T


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Quantum channel ``rho -> sum_k M_k rho M_k^dagger`` on a qubit."""

    ops: tuple

    def __post_init__(self):
        ops = tuple(np.array(m, dtype=complex).reshape(2, 2) for m in self.ops)
        if not ops:
            raise PovmError("a channel needs at least one Kraus operator")
        for m in ops:
            if not np.all(np.isfinite(m)):
                raise PovmError("Kraus operator has non-finite entries")
        object.__setattr__(self, "ops", ops)

    def completeness_residual(self) -> float:
        total = sum(m.conj().T @ m for m in self.ops)
        return float(np.max(np.abs(total - I2)))

    def require_trace_preserving(self, tol: float = TRACE_PRESERVING_TOL) -> "KrausChannel":
        res = self.completeness_residual()
        if res > tol:
            raise PovmError(f"channel is not trace preserving (residual {res:.3g})")
        return self

    def apply(self, rho) -> np.ndarray:
        return sum(m @ rho @ m.conj().T for m in self.ops)

    def heisenberg(self, e) -> np.ndarray:
        """Dual map ``E -> sum_k M_k^dagger E M_k``."""
        return sum(m.conj().T @ e @ m for m in self.ops)


def projective_readout(ch: KrausChannel, n) -> Povm:
    """POVM on the channel input for a projective readout of ``n . sigma`` at its output."""
    ch.require_trace_preserving()
    return povm_from_operators([ch.heisenberg(projector(n, +1)), ch.heisenberg(projector(n, -1))])
