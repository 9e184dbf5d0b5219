"""Kernel backend selection.

The compiled Cython module is used when it was built; otherwise the
pure-Python twin. ``use_backend`` switches at runtime (benchmarks, parity
tests). Callers must reach kernels through ``_backend.kernels`` so a switch
takes effect everywhere.
"""
from contextlib import contextmanager

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

kernels = _compiled if _compiled is not None else _kernels_py
name = "cython" if _compiled is not None else "python"


def available():
    return ["cython", "python"] if _compiled is not None else ["python"]


def set_backend(which):
    global kernels, name
    if which == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        kernels = _compiled
    elif which == "python":
        kernels = _kernels_py
    else:
        raise ValueError(f"unknown backend {which!r}")
    name = which


@contextmanager
def use_backend(which):
    previous = name
    set_backend(which)
    try:
        yield
    finally:
        set_backend(previous)
