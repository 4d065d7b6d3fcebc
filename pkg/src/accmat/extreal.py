"""Extended-real helpers: ``inf`` is a value, ``nan`` marks ``0 * inf``."""
import math

INDETERMINATE = math.nan


def product(*xs: float) -> float:
    """Product over [0, inf] where ``0 * inf`` is indeterminate (``nan``)."""
    has_zero = any(x == 0.0 for x in xs)
    has_inf = any(math.isinf(x) for x in xs)
    if has_zero and has_inf:
        return INDETERMINATE
    if has_inf:
        return math.inf
    return math.prod(xs)


def encode(x):
    """JSON form ``{"finite": bool, "value": float | None}``."""
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return {"finite": False, "value": None, "indeterminate": True}
    if math.isinf(x):
        return {"finite": False, "value": None}
    return {"finite": True, "value": float(x)}


def fmt(x) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "indeterminate"
    if math.isinf(x):
        return "inf"
    return f"{x:.17g}"
