"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``BRFD_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _fallback

if os.environ.get("BRFD_PURE_PYTHON", "") not in ("", "0"):
    kernels = _fallback
else:
    try:
        from . import _kernels as kernels
    except ImportError:  # extension not built
        kernels = _fallback

BACKEND = kernels.NAME


def available():
    """Names of importable backends, compiled first."""
    names = []
    try:
        from . import _kernels  # noqa: F401
        names.append("cython")
    except ImportError:
        pass
    names.append("python")
    return names


def get(name):
    if name == "python":
        return _fallback
    if name == "cython":
        from . import _kernels
        return _kernels
    raise ValueError(f"unknown backend {name!r}")
