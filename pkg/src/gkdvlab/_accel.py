"""Optional numba acceleration.

Set ``GKDVLAB_DISABLE_NUMBA=1`` to force the pure-numpy kernels. The flag is
read once at import time.
"""

import os

DISABLE_ENV = "GKDVLAB_DISABLE_NUMBA"

NUMBA_DISABLED = os.environ.get(DISABLE_ENV, "").strip().lower() in {"1", "true", "yes", "on"}

try:
    from numba import njit as _njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is installed in CI
    _njit = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not NUMBA_DISABLED


def njit(func):
    """Compile ``func`` with numba when available, else return it unchanged.

    The returned object is always callable; compilation is lazy (first call).
    """
    if not HAVE_NUMBA:
        return func
    return _njit(cache=True, nogil=True)(func)


def backend():
    return "numba" if USE_NUMBA else "numpy"
