"""Kernel backend selection.

Set ``JOYCE_HKT_NUMBA=0`` in the environment to run the pure-numpy kernels
even when numba is installed.
"""
import os

_FLAG = os.environ.get("JOYCE_HKT_NUMBA", "1").strip().lower()
_REQUESTED = _FLAG not in ("0", "false", "no", "off")

try:
    if not _REQUESTED:
        raise ImportError("disabled by JOYCE_HKT_NUMBA")
    from numba import njit as _njit

    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False
    _njit = None


def njit(*args, **kwargs):
    """``numba.njit`` when available, otherwise an identity decorator."""
    if NUMBA_ENABLED:
        return _njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
