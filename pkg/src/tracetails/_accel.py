"""Numba switch.

Hot kernels are written twice: an ``@njit`` loop version and a vectorised
numpy version. ``TRACETAILS_NO_NUMBA=1`` (or numba's own
``NUMBA_DISABLE_JIT=1``) selects the numpy path at import time.
"""
import os

_flag = os.environ.get("TRACETAILS_NO_NUMBA", "") not in ("", "0")
_flag = _flag or os.environ.get("NUMBA_DISABLE_JIT", "") not in ("", "0")

try:
    if _flag:
        raise ImportError
    import numba

    njit = numba.njit(cache=True, nogil=True)
    USE_NUMBA = True
except ImportError:
    numba = None
    USE_NUMBA = False

    def njit(func):
        return func


def backend():
    return "numba" if USE_NUMBA else "numpy"
