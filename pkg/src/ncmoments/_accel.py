"""Numba switch for the hot kernels.

Set ``NCMOMENTS_DISABLE_NUMBA=1`` before import to run every kernel as plain
Python/NumPy.  The kernels are written in the subset of NumPy that numba
understands, so both paths execute the same source.
"""
import os

_FLAG = os.environ.get("NCMOMENTS_DISABLE_NUMBA", "").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None

NUMBA_ENABLED = numba is not None and _FLAG not in ("1", "true", "yes", "on")


def kernel(fn):
    """Compile ``fn`` with ``numba.njit`` unless the fallback path is selected."""
    if NUMBA_ENABLED:
        return numba.njit(cache=True)(fn)
    return fn


def python_impl(fn):
    """Return the uncompiled function behind a kernel (identity on fallback)."""
    return getattr(fn, "py_func", fn)


def backend():
    return "numba" if NUMBA_ENABLED else "numpy"
