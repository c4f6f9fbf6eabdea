"""Backend selection for the hot kernels.

Set ``CHLANDSCAPE_DISABLE_NUMBA=1`` to force the pure-numpy path. The numba
path is also skipped silently when numba cannot be imported.
"""
import os

_FLAG = "CHLANDSCAPE_DISABLE_NUMBA"

NUMBA_REQUESTED = os.environ.get(_FLAG, "").strip().lower() not in ("1", "true", "yes", "on")

try:
    import numba  # noqa: F401

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_REQUESTED and NUMBA_AVAILABLE


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
