"""Kernel backend selection.

Set ``DAGDEPTH_DISABLE_NUMBA=1`` to force the pure numpy/Python kernels.
Either backend can also be requested per call with ``backend="numba"`` or
``backend="numpy"``.
"""
import importlib
import os

_FLAG = "DAGDEPTH_DISABLE_NUMBA"

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def numba_disabled():
    return os.environ.get(_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


def default_backend():
    return "numba" if HAVE_NUMBA and not numba_disabled() else "numpy"


def resolve(backend=None):
    if backend is None:
        return default_backend()
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


def kernels(backend=None):
    """Return the kernel module for ``backend`` (imported lazily)."""
    name = "_kernels_nb" if resolve(backend) == "numba" else "_kernels_np"
    return importlib.import_module(f"dagdepth.{name}")
