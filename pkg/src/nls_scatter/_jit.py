"""JIT switch for the hot kernels.

Kernels are written as plain Python over floats and numpy arrays. When numba is
importable and ``NLS_SCATTER_NO_JIT`` is unset (or ``0``), they are compiled with
``numba.njit``; otherwise the same source runs interpreted.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_flag = os.environ.get("NLS_SCATTER_NO_JIT", "").strip().lower()
JIT_ENABLED = numba is not None and _flag in ("", "0", "false", "no")

def jit(fn=None, *, cache=True):
    """Compile ``fn`` with numba when enabled, else return it unchanged.

    Functions taking a compiled callable as an argument must use ``cache=False``:
    numba's on-disk index would pickle every caller's dispatcher type.
    """
    if fn is None:
        return lambda f: jit(f, cache=cache)
    if JIT_ENABLED:
        return numba.njit(nogil=True, cache=cache)(fn)
    return fn


def inline(fn):
    """Variant of ``fn`` that numba inlines at IR level into its callers.

    A cached caller that passes a global compiled function into an inlined
    driver gets a static call, which (unlike a first-class function argument)
    can be reused from the on-disk cache.
    """
    if JIT_ENABLED:
        return numba.njit(inline="always")(fn)
    return fn


def is_compiled(fn):
    return JIT_ENABLED and isinstance(fn, numba.core.registry.CPUDispatcher)
