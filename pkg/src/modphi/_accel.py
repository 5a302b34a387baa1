"""Optional numba acceleration.

Hot kernels are written once as plain Python loops and compiled with
``numba.njit`` when numba is importable.  Setting the environment variable
``MODPHI_DISABLE_NUMBA=1`` forces the pure-numpy fallbacks instead, which
is useful for debugging and for checking that both paths agree.
"""

from __future__ import annotations

import os

try:  # pragma: no cover - exercised implicitly
    import numba as _numba
except ImportError:  # pragma: no cover
    _numba = None

DISABLED = os.environ.get("MODPHI_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")
HAS_NUMBA = _numba is not None
USE_NUMBA = HAS_NUMBA and not DISABLED


def njit(func):
    """Compile ``func`` with numba if available, else return it unchanged.

    The returned object is always callable from Python.  The original
    function stays reachable as ``.py_func`` in both cases.
    """
    if HAS_NUMBA:
        return _numba.njit(cache=True)(func)
    func.py_func = func
    return func


def backend() -> str:
    """Name of the kernel backend selected at import time."""
    return "numba" if USE_NUMBA else "numpy"
