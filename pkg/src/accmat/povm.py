"""Bloch-space primitives and qubit POVMs in (weight, vector) form.

A qubit POVM element is written ``E_k = r_k (I + v_k . sigma)`` with
``r_k > 0`` and ``|v_k| <= 1``; a list of such elements is a POVM when the
weights sum to one and ``sum_k r_k v_k = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

POVM_TOL = 1e-10
UNIT_TOL = 1e-12
STOCHASTIC_TOL = 1e-12


class PovmError(ValueError):
    """Raised when an input cannot describe the requested measurement."""


def _vec3(x, name="vector") -> np.ndarray:
    a = np.asarray(x, dtype=float).reshape(-1)
    if a.shape != (3,):
        raise PovmError(f"{name} must have 3 components, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise PovmError(f"{name} has non-finite components")
    return a


def bloch_vector(s, tol: float = UNIT_TOL) -> np.ndarray:
    """Validate a Bloch vector: a 3-vector with ``|s| <= 1``."""
    a = _vec3(s, "Bloch vector")
    norm = float(np.linalg.norm(a))
    if norm > 1.0 + tol:
        raise PovmError(f"Bloch vector has norm {norm:.15g} > 1")
    return a


def direction(n, tol: float = UNIT_TOL) -> np.ndarray:
    """Validate a unit direction vector."""
    a = _vec3(n, "direction")
    norm = float(np.linalg.norm(a))
    if abs(norm - 1.0) > tol:
        raise PovmError(f"direction has norm {norm:.15g}, expected 1")
    return a


def unit(x) -> np.ndarray:
    """Normalise ``x`` to a unit vector."""
    a = _vec3(x)
    norm = np.linalg.norm(a)
    if norm == 0.0:
        raise PovmError("cannot normalise the zero vector")
    return a / norm


@dataclass(frozen=True)
class PovmElement:
    r: float
    v: tuple[float, float, float]


@dataclass(frozen=True, eq=False)
class Povm:
    """An ordered list of POVM elements stored as arrays.

    ``r`` has shape (m,) and ``v`` shape (m, 3). Construction only checks
    shapes; use :func:`validate_povm` or :meth:`require_valid` for the
    positivity and completeness conditions.
    """

    r: np.ndarray
    v: np.ndarray
    labels: tuple[str, ...] | None = field(default=None)

    def __post_init__(self):
        r = np.array(self.r, dtype=float).reshape(-1)
        v = np.array(self.v, dtype=float).reshape(-1, 3) if np.size(self.v) else np.zeros((0, 3))
        if r.shape[0] != v.shape[0]:
            raise PovmError(f"{r.shape[0]} weights but {v.shape[0]} vectors")
        if r.shape[0] == 0:
            raise PovmError("a POVM needs at least one element")
        r.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "v", v)
        if self.labels is not None and len(self.labels) != r.shape[0]:
            raise PovmError("labels must match the number of elements")

    @classmethod
    def from_elements(cls, elements: Iterable, labels=None) -> "Povm":
        """Build from ``PovmElement`` objects or ``(r, v)`` pairs."""
        rs, vs = [], []
        for el in elements:
            if isinstance(el, PovmElement):
                rs.append(el.r)
                vs.append(el.v)
            else:
                r, v = el
                rs.append(r)
                vs.append(v)
        return cls(np.array(rs, dtype=float), np.array(vs, dtype=float).reshape(-1, 3), labels)

    @property
    def m(self) -> int:
        return int(self.r.shape[0])

    def __len__(self) -> int:
        return self.m

    @property
    def elements(self) -> list[PovmElement]:
        return [PovmElement(float(r), tuple(float(x) for x in v)) for r, v in zip(self.r, self.v)]

    def operators(self) -> np.ndarray:
        """Return the 2x2 operators ``r_k (I + v_k . sigma)`` with shape (m, 2, 2)."""
        from .qubit import bloch_operator

        return np.array([r * bloch_operator(v) for r, v in zip(self.r, self.v)])

    def allclose(self, other: "Povm", atol: float = 1e-12) -> bool:
        return (
            self.m == other.m
            and np.allclose(self.r, other.r, rtol=0.0, atol=atol)
            and np.allclose(self.v, other.v, rtol=0.0, atol=atol)
        )

    def require_valid(self, tol: float = POVM_TOL) -> "Povm":
        report = validate_povm(self, tol)
        if not report.valid:
            raise PovmError("invalid POVM: " + "; ".join(report.messages()))
        return self

    def to_json(self) -> dict:
        return {"elements": [{"r": float(r), "v": [float(x) for x in v]} for r, v in zip(self.r, self.v)]}

    @classmethod
    def from_json(cls, data: dict) -> "Povm":
        try:
            elements = data["elements"]
            return cls.from_elements((el["r"], el["v"]) for el in elements)
        except (KeyError, TypeError) as exc:
            raise PovmError(f"malformed POVM JSON: {exc}") from exc


@dataclass(frozen=True)
class Violation:
    condition: str
    residual: float
    index: int | None = None

    def message(self) -> str:
        where = f" (element {self.index})" if self.index is not None else ""
        return f"{self.condition}{where} violated by {self.residual:.3g}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def valid(self) -> bool:
        return not self.violations

    def messages(self) -> list[str]:
        return [v.message() for v in self.violations]

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "violations": [
                {"condition": v.condition, "residual": v.residual, "index": v.index} for v in self.violations
            ],
        }


def validate_povm(p, tol: float = POVM_TOL) -> ValidationReport:
    """Check positivity and completeness of a POVM, never raising.

    Accepts a :class:`Povm` or a raw list of ``(r, v)`` pairs. Every failed
    condition is reported with its residual.
    """
    if not isinstance(p, Povm):
        try:
            p = Povm.from_elements(p)
        except (PovmError, ValueError, TypeError) as exc:
            return ValidationReport((Violation(f"malformed input: {exc}", math.nan),))
    out = []
    for k, (r, v) in enumerate(zip(p.r, p.v)):
        if not (np.isfinite(r) and np.all(np.isfinite(v))):
            out.append(Violation("finite entries", math.inf, k))
            continue
        if r <= 0.0:
            out.append(Violation("r_k > 0", float(-r), k))
        excess = float(np.linalg.norm(v)) - 1.0
        if excess > UNIT_TOL:
            out.append(Violation("|v_k| <= 1", excess, k))
    total = float(np.sum(p.r))
    if abs(total - 1.0) > tol:
        out.append(Violation("sum r_k = 1", abs(total - 1.0)))
    balance = float(np.linalg.norm(p.r @ p.v))
    if balance > tol:
        out.append(Violation("sum r_k v_k = 0", balance))
    return ValidationReport(tuple(out))


def outcome_probabilities(p: Povm, state) -> np.ndarray:
    """Outcome probabilities ``q_k = r_k (1 + v_k . s)``."""
    s = bloch_vector(state)
    return p.r * (1.0 + p.v @ s)


def direction_distribution(state, n) -> tuple[float, float]:
    """Distribution ``((1 + n.s)/2, (1 - n.s)/2)`` of the observable ``n . sigma``."""
    s = bloch_vector(state)
    ns = float(direction(n) @ s)
    return (1.0 + ns) / 2.0, (1.0 - ns) / 2.0


def projection_povm(n) -> Povm:
    n = direction(n)
    return Povm([0.5, 0.5], [n, -n])


def trivial_povm(weights: Sequence[float] = (0.5, 0.5)) -> Povm:
    """POVM ``{q_k I}`` that carries no information about the state."""
    w = np.asarray(weights, dtype=float)
    return Povm(w, np.zeros((w.size, 3)))


def nonideal_povm(n, r: float, eps1: float, eps2: float) -> Povm:
    """Two-outcome nonideal measurement of ``n . sigma``.

    Elements are ``r (I + eps1 n.sigma)`` and ``(1-r)(I - eps2 n.sigma)``;
    completeness requires ``r eps1 = (1-r) eps2``.
    """
    n = direction(n)
    if not 0.0 < r < 1.0:
        raise PovmError(f"weight r must lie in (0, 1), got {r}")
    if abs(eps1) > 1.0 or abs(eps2) > 1.0:
        raise PovmError("eps1 and eps2 must lie in [-1, 1]")
    if abs(r * eps1 - (1.0 - r) * eps2) > POVM_TOL:
        raise PovmError(f"balance r*eps1 = (1-r)*eps2 violated by {abs(r * eps1 - (1 - r) * eps2):.3g}")
    return Povm([r, 1.0 - r], [eps1 * n, -eps2 * n])


def probabilistic_mixture(xi: float, a: Povm, b: Povm) -> Povm:
    """Perform ``a`` with probability ``xi`` and ``b`` otherwise."""
    if not 0.0 < xi < 1.0:
        raise PovmError(f"mixing probability must lie in (0, 1), got {xi}")
    return Povm(np.concatenate([xi * a.r, (1.0 - xi) * b.r]), np.vstack([a.v, b.v]))


def _collinear_axis(p: Povm) -> np.ndarray:
    """Unit axis shared by both vectors of a binary POVM (``e_z`` if both vanish)."""
    v1, v2 = p.v
    ref = v1 if np.linalg.norm(v1) >= np.linalg.norm(v2) else v2
    if np.linalg.norm(ref) <= POVM_TOL:
        return np.array([0.0, 0.0, 1.0])
    return ref / np.linalg.norm(ref)


def binary_parameters(p: Povm) -> tuple[np.ndarray, float, float, float]:
    """Return ``(n, r, eps1, eps2)`` describing a collinear two-outcome POVM."""
    if p.m != 2:
        raise PovmError(f"expected a two-outcome POVM, got {p.m} outcomes")
    n = _collinear_axis(p)
    for vk in p.v:
        if np.linalg.norm(np.cross(vk, n)) > POVM_TOL:
            raise PovmError("the two POVM vectors are not collinear")
    r = float(p.r[0])
    return n, r, float(p.v[0] @ n), float(-(p.v[1] @ n))


def binary_transition_matrix(p: Povm) -> np.ndarray:
    """Column-stochastic 2x2 matrix mapping projectors along the axis to ``p``."""
    _, r, e1, e2 = binary_parameters(p)
    return np.array(
        [
            [r * (1.0 + e1), r * (1.0 - e1)],
            [(1.0 - r) * (1.0 - e2), (1.0 - r) * (1.0 + e2)],
        ]
    )


def check_stochastic(f, tol: float = STOCHASTIC_TOL) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.ndim != 2:
        raise PovmError("transition matrix must be two-dimensional")
    if np.any(f < -tol):
        raise PovmError("transition matrix has negative entries")
    dev = np.max(np.abs(f.sum(axis=0) - 1.0))
    if dev > tol:
        raise PovmError(f"transition matrix columns do not sum to 1 (max deviation {dev:.3g})")
    return f


def apply_transition(f, p: Povm) -> Povm:
    """Classical post-processing ``E'_j = sum_k F_jk E_k``.

    Output rows with zero total weight are dropped.
    """
    f = check_stochastic(f)
    if f.shape[1] != p.m:
        raise PovmError(f"transition matrix has {f.shape[1]} columns for {p.m} outcomes")
    r_new = f @ p.r
    rv_new = f @ (p.r[:, None] * p.v)
    keep = r_new > 0.0
    return Povm(r_new[keep], rv_new[keep] / r_new[keep, None])


def partition_matrix(partition: Sequence[Sequence[int]], m: int) -> np.ndarray:
    """0/1 aggregation matrix of a partition of ``range(m)``."""
    seen = sorted(i for group in partition for i in group)
    if seen != list(range(m)):
        raise PovmError("partition must cover every outcome exactly once")
    f = np.zeros((len(partition), m))
    for j, group in enumerate(partition):
        if not group:
            raise PovmError("partition groups must be non-empty")
        f[j, list(group)] = 1.0
    return f


def coarse_grain(p: Povm, partition: Sequence[Sequence[int]]) -> Povm:
    """Merge outcomes group by group."""
    return apply_transition(partition_matrix(partition, p.m), p)


def standard_tomography_povm() -> Povm:
    """Six-outcome POVM of equal-share sigma_x, sigma_y, sigma_z measurements."""
    eye = np.eye(3)
    v = np.array([eye[0], -eye[0], eye[1], -eye[1], eye[2], -eye[2]])
    return Povm(np.full(6, 1.0 / 6.0), v)


def minimal_tomography_povm() -> Povm:
    """Four-outcome tetrahedral POVM."""
    a = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) / math.sqrt(3.0)
    return Povm(np.full(4, 0.25), a)


def sample_outcomes(p: Povm, state, n: int, seed: int) -> np.ndarray:
    """Multinomial outcome counts for ``n`` repetitions, reproducible from ``seed``."""
    if n < 1:
        raise PovmError("number of samples must be positive")
    q = np.clip(outcome_probabilities(p, state), 0.0, None)
    q = q / q.sum()
    return np.random.default_rng(seed).multinomial(n, q)


def _ball_points(rng, k):
    x = rng.normal(size=(k, 3))
    x /= np.linalg.norm(x, axis=1)[:, None]
    return x * rng.uniform(size=(k, 1)) ** (1.0 / 3.0)


def random_povm(m: int, seed, max_tries: int = 10_000) -> Povm:
    """Random valid POVM with ``m`` elements.

    The first ``m - 1`` weights come from a flat Dirichlet draw and their
    vectors are uniform in the unit ball; the last element balances the rest.
    Draws are rejected until the balancing weight is at least 0.05 and its
    vector lies in the ball.
    """
    if m < 2:
        raise PovmError("random_povm needs m >= 2")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        r = rng.dirichlet(np.ones(m))
        rm = r[-1]
        if rm < 0.05:
            continue
        v = _ball_points(rng, m - 1)
        vm = -(r[:-1] @ v) / rm
        if np.linalg.norm(vm) > 1.0:
            continue
        return Povm(r, np.vstack([v, vm]))
    raise PovmError(f"random_povm: no valid draw for m={m} after {max_tries} tries")


def random_extremal_povm(m: int, seed) -> Povm:
    """Random POVM whose elements are all rank one (every ``|v_k| = 1``).

    Rank-one operators ``a_k |psi_k><psi_k|`` are normalised as
    ``S^{-1/2} A_k S^{-1/2}`` with ``S = sum_k A_k``, which keeps rank one.
    """
    from .qubit import operator_to_rv

    if m < 2:
        raise PovmError("random_extremal_povm needs m >= 2")
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=(m, 2)) + 1j * rng.normal(size=(m, 2))
    a = rng.uniform(0.2, 1.0, size=m)
    ops = np.array([ak * np.outer(pk, pk.conj()) for ak, pk in zip(a, psi)])
    w, u = np.linalg.eigh(ops.sum(axis=0))
    s_inv_half = u @ np.diag(w ** -0.5) @ u.conj().T
    rs, vs = [], []
    for op in ops:
        r, v = operator_to_rv(s_inv_half @ op @ s_inv_half)
        rs.append(r)
        vs.append(v / np.linalg.norm(v))
    return Povm(rs, vs)


def random_direction(rng) -> np.ndarray:
    x = rng.normal(size=3)
    return x / np.linalg.norm(x)


def random_state(rng) -> np.ndarray:
    return _ball_points(rng, 1)[0]
