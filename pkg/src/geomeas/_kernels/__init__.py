"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly. Setting the environment
variable ``GEOMEAS_DISABLE_NUMBA=1`` (or numba's own ``NUMBA_DISABLE_JIT=1``)
selects the numpy path at import time. Both backends stay importable as
``numpy_backend`` and ``numba_backend`` for parity tests and benchmarks.
"""

import os

from . import _numpy as numpy_backend

try:
    from . import _numba as numba_backend
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba_backend = None


def _flag(name):
    return os.environ.get(name, "").strip().lower() not in ("", "0", "false", "no")


USE_NUMBA = numba_backend is not None and not (
    _flag("GEOMEAS_DISABLE_NUMBA") or _flag("NUMBA_DISABLE_JIT")
)
backend = numba_backend if USE_NUMBA else numpy_backend
BACKEND_NAME = "numba" if USE_NUMBA else "numpy"

grid_values = backend.grid_values
als_sweeps = backend.als_sweeps
newton_multistart = backend.newton_multistart

__all__ = [
    "USE_NUMBA",
    "BACKEND_NAME",
    "numpy_backend",
    "numba_backend",
    "grid_values",
    "als_sweeps",
    "newton_multistart",
]
