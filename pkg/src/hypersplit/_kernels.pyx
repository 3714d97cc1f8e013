# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: elimination probing and outcome evaluation.

Must stay semantically identical to `_kernels_py.py`; the suite checks
equality.  Tuples are scanned iteration by iteration with an early break,
which is where the speed comes from.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

ctypedef fused assign_t:
    short
    int

DEF MAX_K = 16

BACKEND_NAME = "compiled"


def probe_slab(assign_t[:, ::1] assign, const unsigned char[:, ::1] outcomes,
               const int[:, ::1] tuples):
    """First killing iteration (1-based) per tuple, 0 when none."""
    cdef Py_ssize_t P = tuples.shape[0]
    cdef Py_ssize_t k = tuples.shape[1]
    cdef Py_ssize_t R = assign.shape[1]
    cdef cnp.ndarray[cnp.int32_t, ndim=1] killed = np.zeros(P, dtype=np.int32)
    if P == 0 or R == 0:
        return killed
    if k > MAX_K:
        raise ValueError(f"tuple width {k} exceeds compiled limit {MAX_K}")

    cdef int[::1] killed_v = killed
    cdef assign_t *rows[MAX_K]
    cdef Py_ssize_t p, r, x
    cdef assign_t t
    cdef bint same
    with nogil:
        for p in range(P):
            for x in range(k):
                rows[x] = &assign[tuples[p, x], 0]
            for r in range(R):
                t = rows[0][r]
                same = True
                for x in range(1, k):
                    if rows[x][r] != t:
                        same = False
                        break
                if same and outcomes[r, <Py_ssize_t>t] == 0:
                    killed_v[p] = <int>(r + 1)
                    break
    return killed


def outcomes_slab(assign_t[:, ::1] assign, const int[:, ::1] signatures, int T):
    """Outcome table (R, T) uint8 for one (level, round)."""
    cdef Py_ssize_t R = assign.shape[1]
    cdef Py_ssize_t m = signatures.shape[0]
    cdef Py_ssize_t k = signatures.shape[1]
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] out = np.zeros((R, T), dtype=np.uint8)
    if m == 0 or R == 0:
        return out
    if k > MAX_K:
        raise ValueError(f"edge width {k} exceeds compiled limit {MAX_K}")

    cdef unsigned char[:, ::1] out_v = out
    cdef assign_t *rows[MAX_K]
    cdef Py_ssize_t e, r, x
    cdef assign_t t
    cdef bint same
    with nogil:
        for e in range(m):
            for x in range(k):
                rows[x] = &assign[signatures[e, x], 0]
            for r in range(R):
                t = rows[0][r]
                same = True
                for x in range(1, k):
                    if rows[x][r] != t:
                        same = False
                        break
                if same:
                    out_v[r, <Py_ssize_t>t] = 1
    return out
