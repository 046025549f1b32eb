"""Kernel selection.

The compiled numba kernels are used when numba imports cleanly; setting
``PISTONLIMIT_NO_NUMBA=1`` (or requesting ``backend="numpy"``) selects the
vectorised numpy path instead.
"""

import os

ENV_FLAG = "PISTONLIMIT_NO_NUMBA"


def numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def default_backend() -> str:
    if os.environ.get(ENV_FLAG, "").strip().lower() in ("1", "true", "yes", "on"):
        return "numpy"
    return "numba" if numba_available() else "numpy"


def get_evolve(backend=None):
    name = backend or default_backend()
    if name == "numba":
        from ._kernels_numba import evolve
    elif name == "numpy":
        from ._kernels_numpy import evolve
    else:
        raise ValueError(f"unknown backend {name!r}")
    return name, evolve
