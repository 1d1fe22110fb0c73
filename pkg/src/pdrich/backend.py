"""Kernel backend selection: compiled extension if importable, else pure Python.

Set ``PDRICH_BACKEND=python`` to force the fallback (used by the benchmark
and the backend-parity tests).
"""

import os

if os.environ.get("PDRICH_BACKEND", "").lower() == "python":
    from . import _kernels_py as kernels

    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as kernels  # type: ignore[no-redef]

        BACKEND = "python"


def get_kernels(name: str):
    """Return a specific kernel module by name ("cython" or "python")."""
    if name == "python":
        from . import _kernels_py

        return _kernels_py
    if name == "cython":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown backend {name!r}")
