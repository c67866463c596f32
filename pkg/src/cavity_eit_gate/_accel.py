"""JIT switch for the numeric kernels.

Kernels are written once as plain Python over numpy arrays and compiled with
``numba.njit`` when available.  Setting ``CAVITY_EIT_DISABLE_NUMBA=1`` in the
environment (before import) runs the same source through the interpreter,
which is slow but useful for debugging and for checking the two paths agree.
"""

import os

_DISABLED = os.environ.get("CAVITY_EIT_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if _DISABLED:
        raise ImportError
    from numba import njit as _numba_njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


def njit(func=None, **options):
    """``numba.njit`` when enabled, identity otherwise."""
    options.setdefault("cache", True)

    def wrap(f):
        if HAS_NUMBA:
            return _numba_njit(**options)(f)
        return f

    if func is None:
        return wrap
    return wrap(func)


def backend_name():
    return "numba" if HAS_NUMBA else "python"
