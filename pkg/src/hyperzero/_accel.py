"""Backend switch for the floating-point kernels.

Set ``HYPERZERO_NUMBA=0`` to force the pure-numpy implementations, for
example on platforms without a working LLVM or to compare timings.
"""

from __future__ import annotations

import os

_FLAG = os.environ.get("HYPERZERO_NUMBA", "1").strip().lower()
WANT_NUMBA = _FLAG not in ("0", "false", "no", "off")

try:
    import numba as _numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None
    HAVE_NUMBA = False

USE_NUMBA = WANT_NUMBA and HAVE_NUMBA
BACKEND = "numba" if USE_NUMBA else "numpy"


def njit(func):
    """``numba.njit(cache=True)`` when numba is available, identity otherwise."""
    if _numba is None:
        return func
    return _numba.njit(cache=True)(func)


def select(loops, vectorized):
    """Pick the compiled loop kernel or the numpy fallback."""
    return loops if USE_NUMBA else vectorized
