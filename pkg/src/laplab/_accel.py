"""Optional numba acceleration.

Set ``LAPLAB_DISABLE_NUMBA=1`` to force the pure-numpy code paths.  Kernels
are written once and decorated with :func:`maybe_njit`; callers pick the
compiled or the numpy variant through :data:`USE_NUMBA`.
"""
import os

_disabled = os.environ.get("LAPLAB_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _disabled:
        raise ImportError
    from numba import njit as _njit
    USE_NUMBA = True
except ImportError:
    _njit = None
    USE_NUMBA = False


def maybe_njit(*args, **kwargs):
    """``numba.njit(cache=True)`` when available, identity otherwise."""
    if not USE_NUMBA:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    if len(args) == 1 and callable(args[0]) and len(kwargs) == 1:
        return _njit(cache=True)(args[0])
    return _njit(*args, **kwargs)
