"""Numpy implementations of the hot kernels.

The Jacobi verifier works on the flat sparse table layout produced by
liealg.LieAlgebra.flat_table(): for each ordered pair slot i*n + j with
i < j, ptr[slot]..ptr[slot+1] indexes into (idx, val) giving the expansion
of [e_i, e_j].  Values are int64: structure constants times a common
denominator for characteristic 0, or residues for F_p.

Strategy here: form dense ad matrices and check the homomorphism identity
ad([e_i, e_j]) = [ad_i, ad_j] with batched matrix products, one row block
per i.  Float arithmetic is exact as long as p*p*n (or V*V*n in the scaled
integer case) stays below 2^53, which the caller checks.
"""

import numpy as np


def _dense_ads(n, ptr, idx, val):
    """ads[i][j] column expansion: ads[i, :, j] = [e_i, e_j]."""
    ads = np.zeros((n, n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if i < j:
                s, sgn = i * n + j, 1
            else:
                s, sgn = j * n + i, -1
            lo, hi = ptr[s], ptr[s + 1]
            ads[i, idx[lo:hi], j] = sgn * val[lo:hi]
    return ads


def jacobi_full(n, ptr, idx, val, p, max_witnesses=5):
    """All-triples Jacobi check.  Returns list of violating (i, j, k)."""
    ads = _dense_ads(n, ptr, idx, val)
    if p:
        ads %= p
        dtype = np.float32 if p * p * n < (1 << 24) else np.float64
    else:
        dtype = np.float64
    f = ads.astype(dtype)
    witnesses = []
    for i in range(n - 1):
        rest = f[i + 1 :]
        # E[j] = [ad_i, ad_j] - ad([e_i, e_j]); zero iff Jacobi holds at (i, j, *)
        E = np.matmul(f[i][None, :, :], rest)
        E -= np.matmul(rest, f[i][None, :, :])
        E -= np.tensordot(ads[i, :, i + 1 :].T.astype(dtype), f, axes=(1, 0))
        if p:
            E %= p
        bad = np.nonzero(E)
        if bad[0].size:
            seen = set()
            for joff, _row, k in zip(*bad):
                t = (i, int(joff) + i + 1, int(k))
                if t not in seen:
                    seen.add(t)
                    witnesses.append(t)
                    if len(witnesses) >= max_witnesses:
                        return witnesses
    return witnesses


def jacobi_sampled(n, ptr, idx, val, p, triples):
    """Check the Jacobi identity on an explicit list of triples."""

    def row(i, j):
        if i == j:
            return (), ()
        if i < j:
            s, sgn = i * n + j, 1
        else:
            s, sgn = j * n + i, -1
        lo, hi = ptr[s], ptr[s + 1]
        return idx[lo:hi], sgn * val[lo:hi]

    witnesses = []
    acc = np.zeros(n, dtype=np.int64)
    for (i, j, k) in triples:
        acc[:] = 0
        for (a, b, c) in ((i, j, k), (j, k, i), (k, i, j)):
            ks, vs = row(a, b)
            for m, cm in zip(ks, vs):
                ks2, vs2 = row(m, c)
                if len(ks2) == 0:
                    continue
                acc[ks2] += int(cm) * vs2
        if p:
            acc %= p
        if np.any(acc):
            witnesses.append((i, j, k))
    return witnesses


def echelon_update(rows, pivrows, pivcols, p):
    """Reduce a chunk of rows by existing unit-pivot echelon rows mod p."""
    if len(pivcols) == 0:
        return rows % p
    coeff = rows[:, pivcols].astype(np.float64)
    out = rows.astype(np.float64) - coeff @ pivrows.astype(np.float64)
    return np.mod(out, p).astype(np.int64)
