"""Kernel backend selection.

The compiled extension is preferred when importable; the pure-numpy fallback
implements the same algorithms. Set CAPSPEC_BACKEND=python (or =cython) to
force a backend at import time; forcing cython raises if the extension is
missing.
"""

import importlib
import os

from . import _pycore

_forced = os.environ.get("CAPSPEC_BACKEND", "")
if _forced not in ("", "python", "cython"):
    raise ImportError(f"CAPSPEC_BACKEND must be 'python' or 'cython', got {_forced!r}")


def _try_compiled():
    try:
        return importlib.import_module("capspec._kernels._cycore")
    except ImportError:
        return None


if _forced == "python":
    _impl = _pycore
else:
    _impl = _try_compiled()
    if _impl is None:
        if _forced == "cython":
            raise ImportError("compiled kernel backend requested but not built")
        _impl = _pycore

BACKEND = "cython" if _impl is not _pycore else "python"

cholesky_lower = _impl.cholesky_lower
jacobi_eigh = _impl.jacobi_eigh
solve_lower = _impl.solve_lower
solve_lower_t = _impl.solve_lower_t


def available_backends():
    """Importable backends, name -> module. Always contains 'python'."""
    out = {"python": _pycore}
    compiled = _try_compiled()
    if compiled is not None:
        out["cython"] = compiled
    return out
