"""NumPy implementations of the two hot kernels.

Semantics are identical to the compiled versions in `_kernels.pyx`; the
backend selector treats the two as interchangeable and the test suite
asserts element-for-element equality.

probe_slab: for each candidate tuple, the 1-based index of the first
iteration in which all its blocks share a test and that test is negative
(0 if that never happens).  This is the "examined iterations" count of an
early-exit scan, computed without actually exiting early.

outcomes_slab: pooled outcome table from edge block-signatures; test t at
iteration r is positive iff some edge has all its blocks assigned to t.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

# chunk sizes keep transient fancy-index buffers around tens of MB
_PROBE_CELLS = 6_000_000
_OUTCOME_CELLS = 8_000_000


def probe_slab(assign: np.ndarray, outcomes: np.ndarray, tuples: np.ndarray) -> np.ndarray:
    """First killing iteration (1-based) per tuple, 0 when none.

    assign: (g, R) block-major test assignments, values 0..T-1
    outcomes: (R, T) uint8 outcome bits
    tuples: (P, k) int32 block ids (0-based, ascending rows)
    """
    P, k = tuples.shape
    R = assign.shape[1]
    killed = np.zeros(P, dtype=np.int32)
    if P == 0 or R == 0:
        return killed
    step = max(1, _PROBE_CELLS // max(R * k, 1))
    rows = np.arange(R)
    for lo in range(0, P, step):
        chunk = tuples[lo : lo + step]
        cols = assign[chunk]  # (p, k, R)
        t0 = cols[:, 0, :]
        co = np.all(cols[:, 1:, :] == t0[:, None, :], axis=1)
        neg = outcomes[rows[None, :], t0] == 0
        hit = co & neg
        any_hit = hit.any(axis=1)
        killed[lo : lo + step] = np.where(any_hit, hit.argmax(axis=1) + 1, 0)
    return killed


def outcomes_slab(assign: np.ndarray, signatures: np.ndarray, T: int) -> np.ndarray:
    """Outcome table (R, T) uint8 for one (level, round)."""
    R = assign.shape[1]
    out = np.zeros((R, T), dtype=np.uint8)
    m = signatures.shape[0]
    if m == 0 or R == 0:
        return out
    k = signatures.shape[1]
    step = max(1, _OUTCOME_CELLS // max(R * k, 1))
    for lo in range(0, m, step):
        sigs = signatures[lo : lo + step]
        cols = assign[sigs]  # (e, k, R)
        t0 = cols[:, 0, :]
        co = np.all(cols[:, 1:, :] == t0[:, None, :], axis=1)
        e_idx, r_idx = np.nonzero(co)
        out[r_idx, t0[e_idx, r_idx]] = 1
    return out
