"""Kernel backend selection.

The compiled kernel is used when the extension was built; otherwise, or when
``HYBRIDTT_BACKEND=python`` is set, the pure-Python kernel is used.
"""

from __future__ import annotations

import os

from . import _kernel_py
from ._data import KernelData, compile_instance

try:
    from . import _kernel as _kernel_c
except ImportError:  # extension not built
    _kernel_c = None

BACKENDS = {"python": _kernel_py.Kernel}
if _kernel_c is not None:
    BACKENDS["cython"] = _kernel_c.Kernel


def default_backend() -> str:
    wanted = os.environ.get("HYBRIDTT_BACKEND", "").strip().lower()
    if wanted:
        if wanted not in BACKENDS:
            raise RuntimeError(f"HYBRIDTT_BACKEND={wanted!r} is not available (have {sorted(BACKENDS)})")
        return wanted
    return "cython" if "cython" in BACKENDS else "python"


def make_kernel(data: KernelData, backend: str | None = None):
    return BACKENDS[backend or default_backend()](data)


def kernel_for(instance, backend: str | None = None):
    return make_kernel(compiled(instance), backend)


def compiled(instance) -> KernelData:
    """Cached flattened view of ``instance``."""
    data = instance.__dict__.get("_kernel_data")
    if data is None:
        data = compile_instance(instance)
        instance.__dict__["_kernel_data"] = data
    return data
