"""Numba availability switch.

Set ``STROKEPAINT_NO_NUMBA=1`` before import to force the pure-numpy kernels.
"""
import os

_DISABLED = os.environ.get("STROKEPAINT_NO_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError("numba disabled by STROKEPAINT_NO_NUMBA")
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


def backend() -> str:
    return "numba" if HAS_NUMBA else "numpy"
