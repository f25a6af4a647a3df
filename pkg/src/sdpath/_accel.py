# Numba is the default backend for the hot loops. Setting SDPATH_DISABLE_NUMBA=1
# runs the very same kernel source as plain Python (slow, but handy for
# debugging and for checking that the compiled path agrees with it).
import os

_FLAG = os.environ.get("SDPATH_DISABLE_NUMBA", "").strip().lower()
NUMBA_DISABLED = _FLAG in {"1", "true", "yes", "on"}

try:
    import numba
except ImportError:  # pragma: no cover - numba is optional
    numba = None

USE_NUMBA = numba is not None and not NUMBA_DISABLED


def kernel(fn):
    """Compile ``fn`` with ``numba.njit`` unless the fallback is selected.

    The returned object always exposes ``py_func`` so callers (tests and the
    kernel benchmark) can run the interpreted version on demand.
    """
    if USE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    fn.py_func = fn
    return fn
