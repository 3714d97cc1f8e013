"""Lexicographic rank/unrank for k-subsets of {0, ..., n-1}.

Used by the edge sampler (geometric skipping draws subset ranks, which
must be converted back to vertex tuples) and by exhaustive candidate
enumeration.  The k=3 paths are vectorised; general k falls back to a
per-rank loop, which is only exercised at smoke-test scale.
"""

from itertools import combinations
from math import comb

import numpy as np


def _unrank_pairs(ranks: np.ndarray, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Unrank lexicographic 2-subsets of {0..q-1}.

    Rank of (b, c) with b < c is C(q,2) - C(q-b,2) + (c - b - 1).  The
    first coordinate comes from the quadratic root, then an integer
    fix-up absorbs float rounding.
    """
    r = ranks.astype(np.int64)
    # solve b(2q-1-b)/2 <= r for the largest integer b
    disc = (2 * q - 1) ** 2 - 8 * r
    b = ((2 * q - 1) - np.sqrt(disc.astype(np.float64))) // 2
    b = b.astype(np.int64)
    np.clip(b, 0, q - 2, out=b)

    def offset(bv):
        return bv * (2 * q - 1 - bv) // 2

    # fix-up: move b until offset(b) <= r < offset(b+1)
    for _ in range(3):
        too_high = offset(b) > r
        b[too_high] -= 1
        too_low = offset(b + 1) <= r
        b[too_low] += 1
        if not (too_high.any() or too_low.any()):
            break
    c = r - offset(b) + b + 1
    return b, c


def unrank_triples(ranks: np.ndarray, n: int) -> np.ndarray:
    """Vectorised unrank of lexicographic 3-subsets of {0..n-1}.

    Returns an (len(ranks), 3) int64 array with ascending rows.
    """
    ranks = np.asarray(ranks, dtype=np.int64)
    if ranks.size == 0:
        return np.empty((0, 3), dtype=np.int64)
    # cumulative block starts for the first coordinate:
    # S[a] = C(n,3) - C(n-a,3), monotone increasing
    a_vals = np.arange(n, dtype=np.int64)
    s = comb(n, 3) - np.array([comb(n - int(a), 3) for a in a_vals], dtype=np.int64)
    a = np.searchsorted(s, ranks, side="right") - 1
    rem = ranks - s[a]
    q = n - a - 1  # pairs are drawn from the q elements after a
    # _unrank_pairs is scalar in q, so group by q (few distinct values touched)
    b = np.empty_like(a)
    c = np.empty_like(a)
    for qv in np.unique(q):
        mask = q == qv
        bb, cc = _unrank_pairs(rem[mask], int(qv))
        b[mask] = bb
        c[mask] = cc
    out = np.stack([a, a + 1 + b, a + 1 + c], axis=1)
    return out


def unrank_ktuple(rank: int, n: int, k: int) -> tuple[int, ...]:
    """Unrank a single lexicographic k-subset of {0..n-1}."""
    out = []
    r = rank
    base = 0
    remaining = n
    for depth in range(k, 0, -1):
        # choose the next element: first x with C(remaining-1-x, depth-1) blocks covering r
        x = 0
        while True:
            block = comb(remaining - 1 - x, depth - 1)
            if r < block:
                break
            r -= block
            x += 1
        out.append(base + x)
        base += x + 1
        remaining -= x + 1
    return tuple(out)


def all_triples(n: int) -> np.ndarray:
    """All C(n,3) ascending triples over {0..n-1}, lexicographic order."""
    if n < 3:
        return np.empty((0, 3), dtype=np.int64)
    counts = np.array([comb(n - 1 - a, 2) for a in range(n)], dtype=np.int64)
    total = int(counts.sum())
    a = np.repeat(np.arange(n, dtype=np.int64), counts)
    offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])
    within = np.arange(total, dtype=np.int64) - offsets[a]
    b = np.empty(total, dtype=np.int64)
    c = np.empty(total, dtype=np.int64)
    for qv in range(2, n):
        mask = (n - a - 1) == qv
        if mask.any():
            bb, cc = _unrank_pairs(within[mask], qv)
            b[mask] = bb
            c[mask] = cc
    return np.stack([a, a + 1 + b, a + 1 + c], axis=1)


def all_ktuples(n: int, k: int) -> np.ndarray:
    """All ascending k-tuples over {0..n-1} (loop-based; small n only)."""
    if k == 3:
        return all_triples(n)
    rows = list(combinations(range(n), k))
    if not rows:
        return np.empty((0, k), dtype=np.int64)
    return np.array(rows, dtype=np.int64)
