"""Kernel backend selection.

The hot kernels in kernels.py exist in two flavors: numba @njit and pure
numpy. The numba flavor is used when numba imports cleanly and the
environment variable DMVQEM_DISABLE_NUMBA is unset/empty/0; otherwise the
numpy fallback is selected. Both flavors implement identical semantics and
are single-threaded, so repeated runs on a fixed backend are bit-identical.
"""

import os

_DISABLE = os.environ.get("DMVQEM_DISABLE_NUMBA", "").strip() not in ("", "0")

if not _DISABLE:
    try:
        from numba import njit

        HAS_NUMBA = True
    except ImportError:  # pragma: no cover - exercised via env flag instead
        HAS_NUMBA = False
else:
    HAS_NUMBA = False

if not HAS_NUMBA:
    def njit(*args, **kwargs):
        """No-op decorator standing in for numba.njit."""
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(fn):
            return fn

        return wrap


def backend_name() -> str:
    """Name of the active kernel backend, recorded in run manifests."""
    return "numba" if HAS_NUMBA else "numpy"
