"""Optional numba acceleration.

Set ``RANDAPPORT_DISABLE_NUMBA=1`` to run every kernel as plain Python over
numpy arrays. Both paths execute the same source and produce bit-identical
results.
"""

import os

_DISABLED = os.environ.get("RANDAPPORT_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes"}

try:
    if _DISABLED:
        raise ImportError
    from numba import njit as _njit

    NUMBA_ENABLED = True
except ImportError:
    _njit = None
    NUMBA_ENABLED = False


def jit(fn=None, *, inline=False):
    """Compile ``fn`` with numba when available and not disabled.

    Kernels are compiled without the numba runtime (``_nrt=False``): they may
    not allocate arrays, and in exchange array arguments carry no reference
    counting, which otherwise dominates the cost of short rounding runs.
    Callers allocate scratch space in Python. ``inline=True`` splices the body
    into compiled callers.
    """
    if fn is None:
        return lambda f: jit(f, inline=inline)
    if NUMBA_ENABLED:
        return _njit(cache=True, nogil=True, _nrt=False, inline="always" if inline else "never")(fn)
    return fn


def backend() -> str:
    return "numba" if NUMBA_ENABLED else "python"
