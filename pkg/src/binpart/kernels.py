"""Backend selection for the hot kernels.

The compiled extension is used when it was built; otherwise, or when
``BINPART_PURE_PYTHON=1`` is set, the pure-Python versions are used.
"""

from __future__ import annotations

import os

from . import _pykernels

python_backend = _pykernels

try:
    from . import _ckernels as compiled_backend
except ImportError:  # extension not built
    compiled_backend = None

if compiled_backend is not None and os.environ.get("BINPART_PURE_PYTHON", "") in ("", "0"):
    _active = compiled_backend
else:
    _active = _pykernels

BACKEND: str = _active.BACKEND
next_fit = _active.next_fit
first_fit = _active.first_fit
best_fit = _active.best_fit
reachable_fills = _active.reachable_fills
cover_search = _active.cover_search


def backends() -> dict:
    """All importable backends by name."""
    out = {"python": _pykernels}
    if compiled_backend is not None:
        out["cython"] = compiled_backend
    return out
