"""Selects the compiled decode kernels, falling back to pure Python.

Set ATTRASR_PURE_PYTHON=1 to force the fallback even when the compiled
extension is available (useful for benchmarking and equivalence tests).
"""

from __future__ import annotations

import os

from . import _kernel_py

if os.environ.get("ATTRASR_PURE_PYTHON", "").strip() not in ("", "0"):
    _impl = _kernel_py
else:
    try:
        from . import _kernel as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernel_py

BACKEND: str = _impl.BACKEND
expand_frame = _impl.expand_frame
levenshtein = _impl.levenshtein
lm_query = _impl.lm_query

MATCH = _kernel_py.MATCH
SUB = _kernel_py.SUB
DEL = _kernel_py.DEL
INS = _kernel_py.INS


def get_backend(name: str | None = None):
    """Return a kernel module by name ("compiled", "python", or None for
    the active default)."""
    if name is None:
        return _impl
    if name == "python":
        return _kernel_py
    if name == "compiled":
        from . import _kernel  # raises ImportError if not built

        return _kernel
    raise ValueError(f"unknown kernel backend {name!r}")
