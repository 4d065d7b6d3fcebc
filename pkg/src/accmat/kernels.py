"""Backend selection for the numerical kernels.

The compiled extension ``accmat._kernels`` is preferred. Set the environment
variable ``ACCMAT_PURE_PYTHON=1`` to force the pure-Python fallback, which is
also used automatically when the extension was not built.
"""
import os

from . import _kernels_py

if os.environ.get("ACCMAT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

accuracy_matrix = _impl.accuracy_matrix
fisher_matrix = _impl.fisher_matrix
eigh3 = _impl.eigh3
log_likelihood = _impl.log_likelihood
log_likelihood_grad = _impl.log_likelihood_grad
mle_ascent = _impl.mle_ascent


def backends():
    """Return ``{name: module}`` for every importable backend."""
    found = {"python": _kernels_py}
    try:
        from . import _kernels
        found["cython"] = _kernels
    except ImportError:
        pass
    return found
