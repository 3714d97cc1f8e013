"""Kernel backend selection: compiled extension if built, NumPy otherwise.

Set HYPERSPLIT_BACKEND=python or =compiled to force one (forcing the
compiled backend when it is not built raises ImportError).  Both expose
`probe_slab` and `outcomes_slab` with identical semantics; callers access
them through this module only.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

_forced = os.environ.get("HYPERSPLIT_BACKEND", "").strip().lower()

if _forced == "python":
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        if _forced == "compiled":
            raise ImportError(
                "HYPERSPLIT_BACKEND=compiled but the extension is not built; "
                "run `pip install -e . --no-build-isolation`"
            )
        _impl = _kernels_py

BACKEND_NAME: str = _impl.BACKEND_NAME


def probe_slab(assign: np.ndarray, outcomes: np.ndarray, tuples: np.ndarray) -> np.ndarray:
    """First killing iteration (1-based) per tuple; 0 = never killed."""
    tuples = np.ascontiguousarray(tuples, dtype=np.int32)
    return _impl.probe_slab(assign, outcomes, tuples)


def outcomes_slab(assign: np.ndarray, signatures: np.ndarray, T: int) -> np.ndarray:
    """Pooled outcome table (R, T) uint8 for one assignment table."""
    signatures = np.ascontiguousarray(signatures, dtype=np.int32)
    return _impl.outcomes_slab(assign, signatures, int(T))
