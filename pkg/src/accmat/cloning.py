"""Two-qubit cloning machines and their sphere-averaged error parameters.

System ordering is ``P (x) Q (x) env``. The input qubit enters P, Q starts in
a pure blank state and the optional environment in a pure state; the
machine applies a unitary to all of them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import extreal
from .accuracy import accuracy_matrix, accuracy_parameter
from .povm import Povm, PovmError, direction
from .qubit import KrausChannel, povm_from_operators, projective_readout, projector, pure_state
from .tradeoff import TradeoffReport, pairwise_report

UNITARY_TOL = 1e-10
NOCLONING_TOL = 1e-6
DEFAULT_ORDER = 32
NOCLONING_BOUND = 2.0 / 3.0

SWAP = np.eye(4)[[0, 2, 1, 3]]


@dataclass(frozen=True, eq=False)
class CloningMachine:
    """Unitary ``u`` on ``P (x) Q (x) env`` with blank and environment states.

    ``blank`` is the Bloch vector of the pure blank state of Q; ``env`` is the
    environment ket (dimension ``u.shape[0] // 4``), ``[1]`` when absent.
    """

    u: np.ndarray
    blank: np.ndarray
    env: np.ndarray = None

    def __post_init__(self):
        u = np.array(self.u, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] % 4:
            raise PovmError("unitary must be square with dimension a multiple of 4")
        dev = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
        if dev > UNITARY_TOL:
            raise PovmError(f"matrix is not unitary (deviation {dev:.3g})")
        b = np.asarray(self.blank, dtype=float).reshape(3)
        if abs(np.linalg.norm(b) - 1.0) > 1e-10:
            raise PovmError("blank state must be pure (|blank| = 1)")
        d_env = u.shape[0] // 4
        env = np.ones(1, dtype=complex) if self.env is None else np.array(self.env, dtype=complex).reshape(-1)
        if env.size != d_env:
            raise PovmError(f"environment ket has dimension {env.size}, expected {d_env}")
        env = env / np.linalg.norm(env)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "blank", b)
        object.__setattr__(self, "env", env)

    @property
    def env_dim(self) -> int:
        return self.env.size

    def isometry(self) -> np.ndarray:
        """``U (I_P (x) |blank> (x) |env>)`` reshaped to ``(P, Q, env, input)``."""
        inject = np.kron(np.eye(2), np.kron(pure_state(self.blank), self.env)[:, None])
        return (self.u @ inject).reshape(2, 2, self.env_dim, 2)

    def to_json(self) -> dict:
        out = {"unitary_re": self.u.real.tolist(), "unitary_im": self.u.imag.tolist(), "blank": self.blank.tolist()}
        if self.env_dim > 1:
            out["env_re"] = self.env.real.tolist()
            out["env_im"] = self.env.imag.tolist()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "CloningMachine":
        try:
            u = np.array(data["unitary_re"], dtype=float) + 1j * np.array(data.get("unitary_im", 0.0), dtype=float)
            env = None
            if "env_re" in data:
                env = np.array(data["env_re"], dtype=float) + 1j * np.array(data.get("env_im", 0.0), dtype=float)
            return cls(u, data["blank"], env)
        except (KeyError, TypeError, ValueError) as exc:
            raise PovmError(f"malformed cloning machine JSON: {exc}") from exc


def channel_kraus(m: CloningMachine, target: str) -> KrausChannel:
    """Kraus operators of the channel from the input into system ``"P"`` or ``"Q"``."""
    v = m.isometry()
    if target == "P":
        ops = [v[:, j, e, :] for j in range(2) for e in range(m.env_dim)]
    elif target == "Q":
        ops = [v[i, :, e, :] for i in range(2) for e in range(m.env_dim)]
    else:
        raise PovmError(f"target must be 'P' or 'Q', got {target!r}")
    return KrausChannel(tuple(ops)).require_trace_preserving()


def induced_povm(ch: KrausChannel, n) -> Povm:
    return projective_readout(ch, n)


def direction_errors(m: CloningMachine, n) -> tuple[float, float]:
    """``(eps_P(n), eps_Q(n))`` for a readout of ``n . sigma`` on each output."""
    n = direction(n)
    out = []
    for target in ("P", "Q"):
        povm = induced_povm(channel_kraus(m, target), n)
        out.append(accuracy_parameter(accuracy_matrix(povm), n).eps_n)
    return out[0], out[1]


def joint_readout_povm(m: CloningMachine, n, n_prime) -> Povm:
    """Four-outcome POVM on the input for reading ``n`` on P and ``n'`` on Q.

    Outcomes are ordered ``(+,+), (+,-), (-,+), (-,-)``; its marginals are the
    induced POVMs of the two channels.
    """
    v = m.isometry().reshape(4 * m.env_dim, 2)
    ops = []
    for i in (1, -1):
        for j in (1, -1):
            proj = np.kron(np.kron(projector(n, i), projector(n_prime, j)), np.eye(m.env_dim))
            ops.append(v.conj().T @ proj @ v)
    return povm_from_operators(ops)


@dataclass(frozen=True)
class SphereQuadrature:
    """Gauss-Legendre in ``cos(theta)`` times a uniform azimuthal rule."""

    points: np.ndarray
    weights: np.ndarray

    @classmethod
    def of_order(cls, order: int) -> "SphereQuadrature":
        if order < 1:
            raise PovmError("quadrature order must be positive")
        x, w = np.polynomial.legendre.leggauss(order)
        n_phi = 2 * order
        phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
        sin_t = np.sqrt(1.0 - x**2)
        pts = np.stack(
            [
                np.outer(sin_t, np.cos(phi)).ravel(),
                np.outer(sin_t, np.sin(phi)).ravel(),
                np.repeat(x, n_phi),
            ],
            axis=1,
        )
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        weights = np.repeat(w / 2.0, n_phi) / n_phi
        return cls(pts, weights)

    def average(self, values) -> float:
        """Weighted mean; any infinite value makes the mean infinite."""
        values = np.asarray(values, dtype=float)
        if np.any(np.isinf(values)):
            return math.inf
        return float(self.weights @ values)


def sphere_average_constant(order: int = DEFAULT_ORDER) -> float:
    """Double sphere average of ``1 - (n . n')^2`` (exactly 2/3)."""
    quad = SphereQuadrature.of_order(order)
    dots = quad.points @ quad.points.T
    return float(quad.weights @ (1.0 - dots**2) @ quad.weights)


@dataclass(frozen=True)
class CloningReport:
    """Cloning parameters with the no-cloning verdict.

    ``product`` is ``nan`` when it takes the form ``0 * inf``; ``satisfied``
    is ``"degenerate"`` whenever either parameter is infinite.
    """

    c_p: float
    c_q: float
    product: float
    satisfied: object

    @property
    def product_label(self):
        return "indeterminate" if math.isnan(self.product) else self.product

    def to_json(self) -> dict:
        return {
            "c_p": extreal.encode(self.c_p),
            "c_q": extreal.encode(self.c_q),
            "product": extreal.encode(self.product),
            "bound": NOCLONING_BOUND,
            "satisfied": self.satisfied,
        }


def cloning_parameters(m: CloningMachine, quadrature_order: int = DEFAULT_ORDER, tol: float = NOCLONING_TOL) -> CloningReport:
    """Sphere averages ``C_P``, ``C_Q`` of the direction errors."""
    if quadrature_order < 8:
        raise PovmError("quadrature order must be at least 8")
    quad = SphereQuadrature.of_order(quadrature_order)
    channels = {t: channel_kraus(m, t) for t in ("P", "Q")}
    averages = []
    for target in ("P", "Q"):
        values = []
        for n in quad.points:
            povm = induced_povm(channels[target], n)
            eps = accuracy_parameter(accuracy_matrix(povm), n).eps_n
            values.append(eps)
            if math.isinf(eps):
                break
        averages.append(quad.average(values))
    c_p, c_q = averages
    product = extreal.product(c_p, c_q)
    if math.isinf(c_p) or math.isinf(c_q):
        satisfied = "degenerate"
    else:
        satisfied = product >= NOCLONING_BOUND - tol
    return CloningReport(c_p, c_q, product, satisfied)


def verify_nocloning(m: CloningMachine, quadrature_order: int = DEFAULT_ORDER, tol: float = NOCLONING_TOL) -> CloningReport:
    return cloning_parameters(m, quadrature_order, tol)


@dataclass(frozen=True)
class PreAverageCheck:
    marginal: TradeoffReport
    joint: TradeoffReport


def preaverage_check(m: CloningMachine, n, n_prime, tol: float = 1e-9) -> PreAverageCheck:
    """``eps_P(n) eps_Q(n') >= 1 - (n . n')^2`` in bounded accuracy form.

    ``marginal`` uses the induced POVMs of each channel; ``joint`` uses the
    four-outcome readout POVM, whose accuracies dominate the marginal ones.
    """
    n, n_prime = direction(n), direction(n_prime)
    cos = float(n @ n_prime)
    chi_p = accuracy_parameter(accuracy_matrix(induced_povm(channel_kraus(m, "P"), n)), n).chi_n
    chi_q = accuracy_parameter(accuracy_matrix(induced_povm(channel_kraus(m, "Q"), n_prime)), n_prime).chi_n
    joint = accuracy_matrix(joint_readout_povm(m, n, n_prime))
    jp = accuracy_parameter(joint, n).chi_n
    jq = accuracy_parameter(joint, n_prime).chi_n
    return PreAverageCheck(pairwise_report(chi_p, chi_q, cos, tol), pairwise_report(jp, jq, cos, tol))


def identity_machine() -> CloningMachine:
    return CloningMachine(np.eye(4), [0.0, 0.0, 1.0])


def swap_machine() -> CloningMachine:
    return CloningMachine(SWAP, [0.0, 0.0, 1.0])


def partial_swap(lam: float) -> CloningMachine:
    """``U = cos(lam) I + i sin(lam) SWAP`` with blank ``e_z``."""
    if not 0.0 <= lam <= math.pi / 2:
        raise PovmError("lambda must lie in [0, pi/2]")
    return CloningMachine(math.cos(lam) * np.eye(4) + 1j * math.sin(lam) * SWAP, [0.0, 0.0, 1.0])


def complete_unitary(isometry: np.ndarray, columns) -> np.ndarray:
    """Unitary whose listed columns are those of ``isometry``; the rest is an orthonormal completion."""
    isometry = np.asarray(isometry, dtype=complex)
    dim = isometry.shape[0]
    rng = np.random.default_rng(0)
    filler = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, _ = np.linalg.qr(np.hstack([isometry, filler]))
    q = q[:, :dim]
    rest = [c for c in range(dim) if c not in columns]
    u = np.zeros((dim, dim), dtype=complex)
    u[:, list(columns)] = isometry
    u[:, rest] = q[:, isometry.shape[1]:]
    return u


def universal_cloner() -> CloningMachine:
    """Symmetric universal 1 -> 2 cloner with a one-qubit environment.

    Both outputs shrink the input Bloch vector by 2/3.
    """
    def ket(p, q, e):
        out = np.zeros(8)
        out[4 * p + 2 * q + e] = 1.0
        return out

    a, b = math.sqrt(2.0 / 3.0), math.sqrt(1.0 / 6.0)
    col0 = a * ket(0, 0, 0) + b * (ket(0, 1, 1) + ket(1, 0, 1))
    col1 = a * ket(1, 1, 1) + b * (ket(0, 1, 0) + ket(1, 0, 0))
    u = complete_unitary(np.stack([col0, col1], axis=1), [0, 4])
    return CloningMachine(u, [0.0, 0.0, 1.0], [1.0, 0.0])


def random_unitary(dim: int, seed) -> np.ndarray:
    """QR of a complex Gaussian matrix with phases fixed (Haar distributed)."""
    rng = np.random.default_rng(seed)
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def machine_preset(name: str) -> CloningMachine:
    if name == "identity":
        return identity_machine()
    if name == "swap":
        return swap_machine()
    if name == "universal":
        return universal_cloner()
    if name.startswith("partial_swap"):
        _, _, value = name.partition(":")
        return partial_swap(float(value) if value else math.pi / 4)
    raise PovmError(f"unknown machine preset {name!r}")
