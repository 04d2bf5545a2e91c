"""Backend selection for the hot kernels.

Both code paths are always importable: the numba kernels compile lazily on
first call, the numpy kernels are plain vectorized functions.  Which one the
public dispatchers use is decided once, at import, from the environment:
``CASMODES_DISABLE_JIT=1`` selects the pure-numpy path.
"""
import os

try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

_FLAG = os.environ.get("CASMODES_DISABLE_JIT", "").strip().lower()
USE_NUMBA = HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")


def jit(fn):
    """``numba.njit(cache=True)`` when numba is importable, else identity."""
    if HAVE_NUMBA:
        return _njit(cache=True)(fn)
    return fn


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
