"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
numpy fallback in ``_pykernels``.  Setting ``TROUGHFLOW_KERNELS=python`` forces
the fallback.
"""
import os

from troughflow import _pykernels

if os.environ.get("TROUGHFLOW_KERNELS", "").lower() == "python":
    _impl = _pykernels
else:
    try:
        from troughflow import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

offset_objective = _impl.offset_objective
upwind_step = _impl.upwind_step
rk4_march = _impl.rk4_march


def available_backends():
    """Map backend name to kernel module for every importable backend."""
    found = {"python": _pykernels}
    try:
        from troughflow import _ckernels
        found["cython"] = _ckernels
    except ImportError:
        pass
    return found
