"""Two- and three-direction trade-off relations for simultaneous measurements."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import extreal
from .accuracy import accuracy_matrix, accuracy_parameter, error_from_accuracy
from .povm import POVM_TOL, Povm, PovmError, direction, projection_povm
from .qubit import KrausChannel, operator_to_rv, povm_from_operators, projector

TRADEOFF_TOL = 1e-9
SURFACE_TOL = 1e-9
COPLANAR_TOL = 1e-9
EQUALITY_TOL = 1e-6

# Angles of the three boundaries drawn in the accessible-region figure.
REGION_THETAS = {"P": math.pi / 2, "Q": math.pi / 6, "R": 0.0}


@dataclass(frozen=True)
class TradeoffReport:
    """Outcome of a trade-off check.

    ``lhs`` and ``rhs`` are the error-parameter form (``lhs`` may be ``inf``
    or ``nan`` for ``0 * inf``); the decision uses the bounded accuracy form
    ``chi_form_lhs <= 1`` and ``slack = 1 - chi_form_lhs``.
    """

    lhs: float
    rhs: float
    satisfied: bool
    slack: float
    chi_form_lhs: float
    chis: tuple[float, ...]
    epsilons: tuple[float, ...]
    equality: bool = False

    def to_json(self) -> dict:
        return {
            "lhs": extreal.encode(self.lhs),
            "rhs": self.rhs,
            "satisfied": self.satisfied,
            "slack": self.slack,
            "chi_form_lhs": self.chi_form_lhs,
            "chi": list(self.chis),
            "eps": [extreal.encode(e) for e in self.epsilons],
            "equality": self.equality,
        }


def pairwise_chi_form(chi_a: float, chi_b: float, cos_theta: float) -> float:
    return chi_a + chi_b - chi_a * chi_b * cos_theta**2


def pairwise_report(chi_a: float, chi_b: float, cos_theta: float, tol: float = TRADEOFF_TOL) -> TradeoffReport:
    eps_a, eps_b = error_from_accuracy(chi_a), error_from_accuracy(chi_b)
    form = pairwise_chi_form(chi_a, chi_b, cos_theta)
    return TradeoffReport(
        lhs=extreal.product(eps_a, eps_b),
        rhs=1.0 - cos_theta**2,
        satisfied=form <= 1.0 + tol,
        slack=1.0 - form,
        chi_form_lhs=form,
        chis=(chi_a, chi_b),
        epsilons=(eps_a, eps_b),
        equality=abs(form - 1.0) <= tol,
    )


def pairwise_tradeoff(p: Povm, n_a, n_b, tol: float = TRADEOFF_TOL) -> TradeoffReport:
    """Check ``eps_A eps_B >= sin^2(theta)`` for directions ``n_a``, ``n_b``."""
    n_a, n_b = direction(n_a), direction(n_b)
    a = accuracy_matrix(p)
    chi_a = accuracy_parameter(a, n_a).chi_n
    chi_b = accuracy_parameter(a, n_b).chi_n
    return pairwise_report(chi_a, chi_b, float(n_a @ n_b), tol)


def triple_tradeoff(p: Povm, n_a, n_b, n_c, tol: float = TRADEOFF_TOL) -> TradeoffReport:
    """Check ``eps_A eps_B eps_C >= 8 [n_A . (n_B x n_C)]^2``.

    The bounded form used for the decision is
    ``8 T^2 chi_A chi_B chi_C + 1 - prod(1 - chi) <= 1`` with ``T`` the
    triple product; it is equivalent wherever all errors are finite.
    """
    ns = [direction(n) for n in (n_a, n_b, n_c)]
    triple = float(ns[0] @ np.cross(ns[1], ns[2]))
    if abs(triple) <= COPLANAR_TOL:
        raise PovmError("directions are coplanar")
    a = accuracy_matrix(p)
    chis = tuple(accuracy_parameter(a, n).chi_n for n in ns)
    eps = tuple(error_from_accuracy(c) for c in chis)
    rhs = 8.0 * triple**2
    form = rhs * math.prod(chis) + 1.0 - math.prod(1.0 - c for c in chis)
    gram = np.array([[x @ y for y in ns] for x in ns])
    equality = all(abs(e - 2.0) <= EQUALITY_TOL for e in eps) and bool(
        np.max(np.abs(gram - np.eye(3))) <= EQUALITY_TOL
    )
    return TradeoffReport(
        lhs=extreal.product(*eps),
        rhs=rhs,
        satisfied=form <= 1.0 + tol,
        slack=1.0 - form,
        chi_form_lhs=form,
        chis=chis,
        epsilons=eps,
        equality=equality,
    )


def on_equality_surface(chi_a: float, chi_b: float, cos_theta: float, tol: float = SURFACE_TOL) -> bool:
    return abs(pairwise_chi_form(chi_a, chi_b, cos_theta) - 1.0) <= tol


def equality_povm(n_a, n_b, chi_a: float, chi_b: float) -> Povm:
    """Four-element POVM attaining the pairwise trade-off bound.

    Elements are ``|x_i| I +/- x_i . sigma`` for
    ``x_1 = (sqrt(chi_A) n_A + sqrt(chi_B) n_B)/4`` and
    ``x_2 = (sqrt(chi_A) n_A - sqrt(chi_B) n_B)/4``. Coincident or vanishing
    vectors are merged, so degenerate points yield a projection measurement.
    """
    n_a, n_b = direction(n_a), direction(n_b)
    if not (0.0 <= chi_a <= 1.0 and 0.0 <= chi_b <= 1.0):
        raise PovmError("accuracies must lie in [0, 1]")
    if not on_equality_surface(chi_a, chi_b, float(n_a @ n_b)):
        raise PovmError("(chi_A, chi_B, theta) is not on the equality surface")
    xs = [
        (math.sqrt(chi_a) * n_a + math.sqrt(chi_b) * n_b) / 4.0,
        (math.sqrt(chi_a) * n_a - math.sqrt(chi_b) * n_b) / 4.0,
    ]
    xs = [x for x in xs if np.linalg.norm(x) > POVM_TOL]
    if len(xs) == 2 and np.linalg.norm(np.cross(xs[0], xs[1])) <= POVM_TOL:
        return projection_povm(xs[0] / np.linalg.norm(xs[0]))
    if len(xs) == 1:
        return projection_povm(xs[0] / np.linalg.norm(xs[0]))
    r, v = [], []
    for x in xs:
        nx = float(np.linalg.norm(x))
        r += [nx, nx]
        v += [x / nx, -x / nx]
    return Povm(r, v)


def region_label(chi_a: float, chi_b: float, tol: float = 0.0) -> str:
    """Band of the accessible-region figure containing ``(chi_a, chi_b)``."""
    for label, theta in REGION_THETAS.items():
        if pairwise_chi_form(chi_a, chi_b, math.cos(theta)) <= 1.0 + tol:
            return label
    return "none"


def accessible_region(theta: float, grid: int, tol: float = 1e-12) -> list[tuple[float, float, bool, str]]:
    """Rasterise ``[0, 1]^2`` and mark points allowed at angle ``theta``."""
    if grid < 2:
        raise PovmError("grid must be at least 2")
    c = math.cos(theta)
    values = np.linspace(0.0, 1.0, grid)
    rows = []
    for chi_a in values:
        for chi_b in values:
            feasible = pairwise_chi_form(chi_a, chi_b, c) <= 1.0 + tol
            rows.append((float(chi_a), float(chi_b), bool(feasible), region_label(chi_a, chi_b, tol)))
    return rows


def boundary_chi_b(chi_a: float, theta: float) -> float:
    """``chi_B`` on the boundary of the accessible region for given ``chi_A``."""
    denom = 1.0 - chi_a * math.cos(theta) ** 2
    if denom <= 0.0:
        return 1.0
    return min(1.0, (1.0 - chi_a) / denom)


def composed_operators(m_a: KrausChannel, n_b) -> np.ndarray:
    """Operators ``M_i^dagger P_B(j) M_i`` of measurement ``m_a`` followed by a
    projective readout of ``n_b``, ordered ``(i, +), (i, -)`` per Kraus index."""
    m_a.require_trace_preserving()
    return np.array([m.conj().T @ projector(n_b, sign) @ m for m in m_a.ops for sign in (1, -1)])


@dataclass(frozen=True)
class BackactionReport:
    eps_a: float
    d_b: float
    tradeoff: TradeoffReport

    def to_json(self) -> dict:
        out = self.tradeoff.to_json()
        out.update({"eps_a": extreal.encode(self.eps_a), "d_b": extreal.encode(self.d_b)})
        return out


def error_backaction(m_a: KrausChannel, n_a, n_b, tol: float = TRADEOFF_TOL) -> BackactionReport:
    """Error of the A measurement against its back-action on ``n_b . sigma``.

    ``eps_A`` comes from the marginal ``{M_i^dagger M_i}`` and
    ``d_B = 1/chi_B - 1`` from the marginal of the subsequent projective
    readout of ``n_b``.
    """
    n_a, n_b = direction(n_a), direction(n_b)
    ops = composed_operators(m_a, n_b)
    for e in ops:
        operator_to_rv(e)
    k = len(m_a.ops)
    marg_a = [ops[2 * i] + ops[2 * i + 1] for i in range(k)]
    marg_b = [sum(ops[2 * i] for i in range(k)), sum(ops[2 * i + 1] for i in range(k))]
    chi_a = accuracy_parameter(accuracy_matrix(povm_from_operators(marg_a)), n_a).chi_n
    chi_b = accuracy_parameter(accuracy_matrix(povm_from_operators(marg_b)), n_b).chi_n
    report = pairwise_report(chi_a, chi_b, float(n_a @ n_b), tol)
    return BackactionReport(error_from_accuracy(chi_a), error_from_accuracy(chi_b), report)


def weak_measurement(kappa: float, n=(0.0, 0.0, 1.0)) -> KrausChannel:
    """Two-outcome weak measurement ``M_+/- = sqrt((I +/- kappa n.sigma)/2)``."""
    from .qubit import bloch_operator, sqrtm_psd

    n = direction(n)
    return KrausChannel(tuple(sqrtm_psd(0.5 * bloch_operator(sign * kappa * n)) for sign in (1, -1)))


def projective_channel(n) -> KrausChannel:
    return KrausChannel((projector(n, 1), projector(n, -1)))
