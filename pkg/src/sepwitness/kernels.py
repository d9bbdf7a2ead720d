"""Import-time selection of the d-matrix recursion kernel.

Prefers the compiled Cython extension; falls back to the numpy implementation
when the extension was not built. SEPWITNESS_KERNEL=python|cython forces a
backend (cython raises if unavailable).
"""

from __future__ import annotations

import os

from . import _dkernel_py

_forced = os.environ.get("SEPWITNESS_KERNEL", "").strip().lower()

if _forced == "python":
    _impl = _dkernel_py
    KERNEL_BACKEND = "python"
elif _forced == "cython":
    from . import _dkernel as _impl  # noqa: F401 - ImportError is the intended failure

    KERNEL_BACKEND = "cython"
else:
    try:
        from . import _dkernel as _impl

        KERNEL_BACKEND = "cython"
    except ImportError:
        _impl = _dkernel_py
        KERNEL_BACKEND = "python"

dmatrix_pi_half = _impl.dmatrix_pi_half


def kernel_backend() -> str:
    """Name of the active recursion kernel ("cython" or "python")."""
    return KERNEL_BACKEND
