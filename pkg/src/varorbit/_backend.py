"""Kernel backend selection.

The hot loops (pair sweeps, kinetic differences) exist twice: a numba
``@njit`` version and a vectorized numpy version. ``VARORBIT_BACKEND``
picks one at import time::

    VARORBIT_BACKEND=numpy pytest      # force the pure-numpy path
    VARORBIT_BACKEND=numba pytest      # default when numba imports

Setting ``VARORBIT_DISABLE_NUMBA=1`` is equivalent to ``numpy``.
"""
import os

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False


def requested_backend():
    if os.environ.get("VARORBIT_DISABLE_NUMBA", "").strip() not in ("", "0"):
        return "numpy"
    name = os.environ.get("VARORBIT_BACKEND", "numba").strip().lower()
    if name not in ("numba", "numpy"):
        raise ValueError(f"VARORBIT_BACKEND must be 'numba' or 'numpy', got {name!r}")
    if name == "numba" and not HAVE_NUMBA:
        return "numpy"
    return name


BACKEND = requested_backend()


def get_kernels(name=None):
    """Return the kernel module for ``name`` (defaults to the active backend)."""
    name = name or BACKEND
    if name == "numba":
        from . import _kernels_numba as mod
    elif name == "numpy":
        from . import _kernels_numpy as mod
    else:
        raise ValueError(f"unknown backend {name!r}")
    return mod
