"""Numba dispatch switch.

Set ``MAASSPERIODS_NO_NUMBA=1`` to force the pure-numpy kernels even when
numba is importable.
"""

import os

_flag = os.environ.get("MAASSPERIODS_NO_NUMBA", "").strip().lower()
DISABLED = _flag not in ("", "0", "false", "no")

# the TBB layer shipped with some wheels is too old and only warns
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

try:
    from numba import njit, prange

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def decorator(func):
            return func

        return decorator

    prange = range

USE_NUMBA = NUMBA_AVAILABLE and not DISABLED


def set_threads(n: int) -> None:
    if USE_NUMBA and n and n > 0:
        import numba

        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
