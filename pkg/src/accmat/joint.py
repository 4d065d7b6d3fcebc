"""Nonideal joint measurements of two qubit observables.

A joint POVM has four outcomes labelled by pairs ``(i, j)`` with
``i, j in {+, -}``; summing over ``j`` (resp. ``i``) gives the marginal
measurement of observable A (resp. B).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .accuracy import accuracy_matrix, accuracy_parameter, accuracy_parameters, error_from_accuracy
from .povm import POVM_TOL, Povm, PovmError, binary_parameters, coarse_grain, direction

PAIR_LABELS = ("++", "+-", "-+", "--")
PARALLEL_TOL = 1e-9
MARGINAL_A = [[0, 1], [2, 3]]
MARGINAL_B = [[0, 2], [1, 3]]


@dataclass(frozen=True, eq=False)
class JointPovm:
    """Four-outcome POVM in the order ``++, +-, -+, --``."""

    povm: Povm

    def __post_init__(self):
        if self.povm.m != 4:
            raise PovmError(f"a joint POVM has 4 outcomes, got {self.povm.m}")

    @classmethod
    def from_pairs(cls, elements: dict) -> "JointPovm":
        """Build from ``{"++": (r, v), ...}`` or the JSON ``{"r":..., "v":...}`` bodies."""
        pairs = []
        for label in PAIR_LABELS:
            el = elements[label]
            pairs.append((el["r"], el["v"]) if isinstance(el, dict) else el)
        return cls(Povm.from_elements(pairs, labels=PAIR_LABELS))

    def to_json(self) -> dict:
        return {
            "elements": {
                label: {"r": float(r), "v": [float(x) for x in v]}
                for label, r, v in zip(PAIR_LABELS, self.povm.r, self.povm.v)
            }
        }

    @classmethod
    def from_json(cls, data: dict) -> "JointPovm":
        try:
            return cls.from_pairs(data["elements"])
        except (KeyError, TypeError) as exc:
            raise PovmError(f"malformed joint POVM JSON: {exc}") from exc


def marginals(jp: JointPovm) -> tuple[Povm, Povm]:
    """Marginal POVMs ``(E_A, E_B)``."""
    return coarse_grain(jp.povm, MARGINAL_A), coarse_grain(jp.povm, MARGINAL_B)


def _parallel(v, n) -> bool:
    return float(np.linalg.norm(np.cross(v, n))) <= PARALLEL_TOL


def is_nonideal_joint(jp: JointPovm, n_a, n_b) -> bool:
    """True when each marginal's vector is parallel to its axis (zero counts as parallel)."""
    n_a, n_b = direction(n_a), direction(n_b)
    e_a, e_b = marginals(jp)
    return _parallel(e_a.v[0], n_a) and _parallel(e_b.v[0], n_b)


def _pair_sums(jp: JointPovm, groups):
    p = jp.povm
    out = []
    for group in groups:
        r = float(sum(p.r[k] for k in group))
        rv = sum(p.r[k] * p.v[k] for k in group)
        out.append((r, rv))
    return out


def marginal_accuracy_closed_form(jp: JointPovm, which: str) -> float:
    """``|r1 v1 + r2 v2|^2/(r1 + r2) + |r3 v3 + r4 v4|^2/(r3 + r4)`` for the chosen marginal."""
    groups = MARGINAL_A if which == "A" else MARGINAL_B
    return float(sum(rv @ rv / r for r, rv in _pair_sums(jp, groups)))


def cofactor_accuracy(jp: JointPovm, n) -> float | None:
    """``1 / (n . chi^{-1} n)`` from triple-product and cross-product sums.

    With ``a_k = sqrt(r_k) v_k``, ``det chi = sum_{k<l<m} [a_k.(a_l x a_m)]^2``
    and the cofactor matrix is ``sum_{k<l} (a_k x a_l)(a_k x a_l)^T``. Returns
    ``None`` when the determinant vanishes (the closed form needs full rank).
    Independent of the eigendecomposition path in :mod:`accmat.accuracy`.
    """
    n = direction(n)
    a = np.sqrt(jp.povm.r)[:, None] * jp.povm.v
    det = sum(float(a[k] @ np.cross(a[l], a[m])) ** 2 for k, l, m in itertools.combinations(range(4), 3))
    if det <= 1e-14:
        return None
    quad = sum(float(n @ np.cross(a[k], a[l])) ** 2 for k, l in itertools.combinations(range(4), 2))
    return det / quad


@dataclass(frozen=True)
class Theorem10Check:
    chi_joint: float
    chi_marginal: float
    difference: float


def verify_theorem10(jp: JointPovm, n_a, n_b) -> dict[str, Theorem10Check]:
    """Joint-POVM accuracy along each axis against the marginal closed form."""
    n_a, n_b = direction(n_a), direction(n_b)
    if not is_nonideal_joint(jp, n_a, n_b):
        raise PovmError("POVM is not a nonideal joint measurement of the given axes")
    a = accuracy_matrix(jp.povm)
    out = {}
    for name, n in (("A", n_a), ("B", n_b)):
        joint = accuracy_parameter(a, n).chi_n
        marginal = marginal_accuracy_closed_form(jp, name)
        out[name] = Theorem10Check(joint, marginal, abs(joint - marginal))
    return out


@dataclass(frozen=True)
class Corollary10Check:
    chi_marginal: float
    chi_joint: float
    satisfied: bool


def corollary10_check(jp: JointPovm, n, which: str = "A", tol: float = 1e-9) -> Corollary10Check:
    """``chi(n; E_alpha) <= chi(n; E)`` for the chosen marginal."""
    n = direction(n)
    e_a, e_b = marginals(jp)
    marginal = e_a if which == "A" else e_b
    chi_m = accuracy_parameter(accuracy_matrix(marginal), n).chi_n
    chi_j = accuracy_parameter(accuracy_matrix(jp.povm), n).chi_n
    return Corollary10Check(chi_m, chi_j, chi_m <= chi_j + tol)


def corollary10_sweep(jp: JointPovm, directions, tol: float = 1e-9) -> int:
    """Number of ``(direction, marginal)`` pairs violating ``chi(n; E_alpha) <= chi(n; E)``."""
    e_a, e_b = marginals(jp)
    joint = accuracy_parameters(accuracy_matrix(jp.povm), directions)
    bad = 0
    for marginal in (e_a, e_b):
        bad += int(np.sum(accuracy_parameters(accuracy_matrix(marginal), directions) > joint + tol))
    return bad


@dataclass(frozen=True)
class LegacyParameters:
    x_alpha: float
    e_alpha: float
    chi_alpha: float
    eps_alpha: float
    det_f: float


def legacy_parameters(marginal: Povm) -> LegacyParameters:
    """Older accuracy ``X = (det F)^2`` and error ``E = 1/X - 1`` of a binary POVM.

    ``chi_alpha`` is recomputed as ``(det F)^2 / (4 r (1 - r))``.
    """
    _, r, e1, e2 = binary_parameters(marginal)
    det_f = 2.0 * r * (1.0 - r) * (e1 + e2)
    x = det_f**2
    chi = x / (4.0 * r * (1.0 - r))
    return LegacyParameters(x, error_from_accuracy(x), chi, error_from_accuracy(chi), det_f)


def random_nonideal_joint(n_a, n_b, seed, max_tries: int = 10_000, min_eigenvalue: float = 1e-6) -> JointPovm:
    """Random joint POVM whose marginals are nonideal measurements of ``n_a``, ``n_b``.

    The weighted vectors are ``u``, ``c_A n_A - u``, ``c_B n_B - u`` and
    ``u - c_A n_A - c_B n_B``, which fixes both marginal directions and the
    balance condition; the set is then scaled into the unit ball. Draws whose
    accuracy matrix has an eigenvalue below ``min_eigenvalue`` are rejected
    so that the support is unambiguous at the default cutoff.
    """
    n_a, n_b = direction(n_a), direction(n_b)
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        r = rng.dirichlet(np.ones(4))
        if r.min() < 0.01:
            continue
        c_a, c_b = rng.choice([-1.0, 1.0], size=2) * rng.uniform(0.1, 1.0, size=2)
        u = rng.normal(size=3)
        w = np.array([u, c_a * n_a - u, c_b * n_b - u, u - c_a * n_a - c_b * n_b])
        norms = np.linalg.norm(w, axis=1)
        if norms.min() <= POVM_TOL:
            continue
        w *= float(np.min(r / norms)) * rng.uniform(0.05, 1.0)
        v = w / r[:, None]
        if np.max(np.linalg.norm(v, axis=1)) > 1.0:
            continue
        jp = JointPovm(Povm(r, v, PAIR_LABELS))
        if accuracy_matrix(jp.povm).eigenvalues[-1] < min_eigenvalue:
            continue
        return jp
    raise PovmError(f"random_nonideal_joint: no valid draw after {max_tries} tries")


def joint_from_povm(p: Povm) -> JointPovm:
    """Relabel a four-element POVM as outcome pairs in the order ``++, +-, -+, --``."""
    return JointPovm(Povm(p.r, p.v, PAIR_LABELS))


def relabel_equality_povm(p: Povm) -> JointPovm:
    """Pair the four elements ``+x1, -x1, +x2, -x2`` of an equality POVM as a joint measurement.

    ``+x1 -> (+,+)``, ``+x2 -> (+,-)``, ``-x2 -> (-,+)``, ``-x1 -> (-,-)``, so
    the A marginal points along ``x1 + x2`` and the B marginal along ``x1 - x2``.
    """
    if p.m != 4:
        raise PovmError("expected a four-element equality POVM")
    order = [0, 2, 3, 1]
    return JointPovm(Povm(p.r[order], p.v[order], PAIR_LABELS))


def legacy_dominance(marginal: Povm, tol: float = 1e-12) -> bool:
    """``chi >= X`` and ``eps <= E`` for a binary POVM."""
    lp = legacy_parameters(marginal)
    eps_ok = lp.eps_alpha <= lp.e_alpha + tol if math.isfinite(lp.e_alpha) else True
    return lp.chi_alpha >= lp.x_alpha - tol and eps_ok
