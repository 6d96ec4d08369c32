# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled sparse Jacobi kernels.

Same flat table layout as the numpy fallback: for i < j the expansion of
[e_i, e_j] sits at ptr[i*n+j] .. ptr[i*n+j+1] in (idx, val).  Values are
int64 residues (p > 0) or common-denominator scaled integers (p == 0);
the caller guarantees the accumulators stay below 2^63.
"""

import numpy as np

from libc.stdint cimport int64_t


cdef inline int64_t _jacobiate(
    int n, int64_t[::1] ptr, int64_t[::1] idx, int64_t[::1] val,
    int i, int j, int k,
    int64_t[::1] acc, int64_t[::1] stamp, int64_t cur, int64_t p,
) nogil:
    """Accumulate the Jacobiator of (e_i, e_j, e_k); return 1 if nonzero."""
    cdef int perm, a, b, c, m, u
    cdef int64_t sgn, sgn2, cm, t1, t2, s, s2
    cdef int64_t bad = 0
    # touched slots are stamped and lazily zeroed
    for perm in range(3):
        if perm == 0:
            a = i; b = j; c = k
        elif perm == 1:
            a = j; b = k; c = i
        else:
            a = k; b = i; c = j
        if a < b:
            s = a * n + b; sgn = 1
        else:
            s = b * n + a; sgn = -1
        for t1 in range(ptr[s], ptr[s + 1]):
            m = <int>idx[t1]
            cm = sgn * val[t1]
            if m == c:
                continue
            if m < c:
                s2 = m * n + c; sgn2 = 1
            else:
                s2 = c * n + m; sgn2 = -1
            for t2 in range(ptr[s2], ptr[s2 + 1]):
                u = <int>idx[t2]
                if stamp[u] != cur:
                    stamp[u] = cur
                    acc[u] = 0
                acc[u] += cm * sgn2 * val[t2]
    # verify touched entries vanish
    for u in range(n):
        if stamp[u] == cur:
            if p:
                if acc[u] % p != 0:
                    bad = 1
            elif acc[u] != 0:
                bad = 1
    return bad


def jacobi_full(int n, ptr_arr, idx_arr, val_arr, int64_t p, int max_witnesses=5):
    """All-triples Jacobi check; returns violating (i, j, k) triples."""
    cdef int64_t[::1] ptr = ptr_arr
    cdef int64_t[::1] idx = idx_arr
    cdef int64_t[::1] val = val_arr
    cdef int64_t[::1] acc = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] stamp = np.zeros(n, dtype=np.int64)
    cdef int64_t cur = 0
    cdef int i, j, k
    witnesses = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                cur += 1
                if _jacobiate(n, ptr, idx, val, i, j, k, acc, stamp, cur, p):
                    witnesses.append((i, j, k))
                    if len(witnesses) >= max_witnesses:
                        return witnesses
    return witnesses


def jacobi_sampled(int n, ptr_arr, idx_arr, val_arr, int64_t p, triples_arr):
    """Jacobi check on an explicit (m, 3) array of basis triples."""
    cdef int64_t[::1] ptr = ptr_arr
    cdef int64_t[::1] idx = idx_arr
    cdef int64_t[::1] val = val_arr
    cdef int64_t[:, ::1] triples = triples_arr
    cdef int64_t[::1] acc = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] stamp = np.zeros(n, dtype=np.int64)
    cdef int64_t cur = 0
    cdef Py_ssize_t t
    witnesses = []
    for t in range(triples.shape[0]):
        cur += 1
        if _jacobiate(
            n, ptr, idx, val,
            <int>triples[t, 0], <int>triples[t, 1], <int>triples[t, 2],
            acc, stamp, cur, p,
        ):
            witnesses.append((int(triples[t, 0]), int(triples[t, 1]), int(triples[t, 2])))
    return witnesses
