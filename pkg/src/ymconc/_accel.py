"""Numba dispatch for the hot kernels.

Each kernel in :mod:`ymconc.kernels` exists twice: a pure-numpy version and a
loop version compiled with ``numba.njit``.  The public name is bound to the
compiled one unless numba is missing or ``YMCONC_DISABLE_NUMBA`` is set to a
truthy value, in which case the numpy version is used.  Both variants stay
importable so they can be benchmarked against each other.
"""

import os

ENV_FLAG = "YMCONC_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get(ENV_FLAG, "0").strip().lower() in ("", "0", "false", "no", "off")


def njit(func):
    """Compile ``func`` with numba, or return None if numba is unavailable."""
    if not HAVE_NUMBA:
        return None
    return numba.njit(cache=True, nogil=True)(func)


def select(numba_impl, numpy_impl):
    if USE_NUMBA and numba_impl is not None:
        return numba_impl
    return numpy_impl


def backend():
    return "numba" if USE_NUMBA else "numpy"
