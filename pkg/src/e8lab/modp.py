"""Numpy mod-p linear algebra and multi-modular exact certificates.

Dense elimination mod p is done in float arrays with BLAS doing the heavy
updates; a panel size B is chosen so B*p*p stays below the float mantissa
(2^24 single, 2^53 double), which makes every arithmetic step exact.

Two consumers:
  * rank/nullity certificates mod p (lower bounds for ranks over Q after
    clearing denominators, exact values over F_p);
  * IntRowSolver, which expands vectors over a fixed rational or F_p basis
    exactly: candidate coefficients are read off pivot columns of the
    reduced basis and the expansion is certified by checking the residual
    against enough 22-bit prime moduli to exceed an a priori height bound.
"""

from __future__ import annotations

import math

import numpy as np
from sympy import prevprime

from .linear import Echelon, vec_add_into

# fixed 22-bit certificate primes, largest first
_CERT_PRIMES = []
_q = 1 << 22
for _ in range(12):
    _q = int(prevprime(_q))
    _CERT_PRIMES.append(_q)


def _dtype(p, inner):
    if inner * p * p < (1 << 24):
        return np.float32
    if inner * p * p < (1 << 53):
        return np.float64
    raise ValueError(f"modulus {p} too large for exact float elimination")


def echelon_forward(A, p, panel=128):
    """Forward elimination mod p (blocked).  Returns (W, pivcols).

    W ends in row echelon form with unit pivots; only correctness of the
    pivot structure is guaranteed (no back substitution).
    """
    W = np.asarray(A, dtype=np.int64) % p
    m, n = W.shape
    W = W.astype(_dtype(p, panel))
    pivcols = []
    r = 0
    for c0 in range(0, n, panel):
        if r >= m:
            break
        c1 = min(c0 + panel, n)
        prows, pcols = [], []
        for c in range(c0, c1):
            if r >= m:
                break
            col = W[r:, c]
            nz = np.flatnonzero(col)
            if nz.size == 0:
                continue
            pr = r + int(nz[0])
            if pr != r:
                W[[r, pr], :] = W[[pr, r], :]
            if pcols:
                # bring the trailing part of the new pivot row up to date
                mults = W[r, pcols].copy()
                if np.any(mults):
                    W[r, c1:] -= mults @ W[prows, c1:]
                    np.mod(W[r, c1:], p, out=W[r, c1:])
                    W[r, pcols] = 0
            inv = pow(int(W[r, c]), -1, p)
            W[r, c:] = np.mod(W[r, c:] * inv, p)
            if r + 1 < m:
                f = W[r + 1 :, c].copy()
                if np.any(f):
                    sub = W[r + 1 :, c + 1 : c1]
                    sub -= np.outer(f, W[r, c + 1 : c1])
                    np.mod(sub, p, out=sub)
                    W[r + 1 :, c] = f  # stash multipliers for the block update
            prows.append(r)
            pcols.append(c)
            pivcols.append(c)
            r += 1
        if pcols and c1 < n and r < m:
            L = W[r:, pcols]
            if np.any(L):
                W[r:, c1:] -= L @ W[prows, c1:]
                np.mod(W[r:, c1:], p, out=W[r:, c1:])
        if pcols and r < m:
            W[r:, pcols] = 0
    return W, pivcols


def rank_modp(A, p):
    return len(echelon_forward(A, p)[1])


def rref_modp(A, p, panel=128):
    """Reduced row echelon form mod p: returns (R, pivcols)."""
    W, pivcols = echelon_forward(A, p, panel=panel)
    r = len(pivcols)
    for k in range(r - 1, 0, -1):
        c = pivcols[k]
        col = W[:k, c].copy()
        if np.any(col):
            W[:k, c:] -= np.outer(col, W[k, c:])
            np.mod(W[:k, c:], p, out=W[:k, c:])
    return W[:r], pivcols


def nullspace_modp(A, p, panel=128):
    """Basis of the right kernel mod p, as rows of an (n - rank) x n array.

    Back-substitutes only the free columns against the forward echelon,
    in row blocks sized so the f64 dot products stay exact.
    """
    A = np.asarray(A)
    n = A.shape[1]
    W, pivcols = echelon_forward(A, p, panel=panel)
    r = len(pivcols)
    free = [j for j in range(n) if j not in set(pivcols)]
    nf = len(free)
    N = np.zeros((nf, n), dtype=np.float64)
    if nf == 0:
        return N
    if r:
        R = W[:r].astype(np.float64)
        Rf = np.ascontiguousarray(R[:, free])
        Rp = np.ascontiguousarray(R[:, pivcols])
        X = np.zeros((r, nf), dtype=np.float64)
        kmax = max(1, int(2 ** 53 // (p * p)))
        for i in range(r - 1, -1, -1):
            acc = Rf[i].copy()
            j = i + 1
            while j < r:
                k2 = min(r, j + kmax)
                acc += Rp[i, j:k2] @ X[j:k2]
                np.mod(acc, p, out=acc)
                j = k2
            X[i] = np.mod(-acc, p)
        for t, c in enumerate(pivcols):
            N[:, c] = X[t]
    for t, j in enumerate(free):
        N[t, j] = 1
    return N


def nullity_modp(A, p):
    A = np.asarray(A)
    return A.shape[1] - rank_modp(A, p)


class IncrementalEchelon:
    """Reduced row echelon mod p, grown row chunks at a time.

    Designed for small final rank against wide rows: each chunk is first
    cleared against the existing reduced rows with one matrix product,
    then swept scalar-style for new pivots.
    """

    def __init__(self, ncols, p, max_rank=None):
        self.n = ncols
        self.p = p
        self.cap = max_rank or min(ncols, 512)
        self.R = np.zeros((self.cap, ncols), dtype=np.float64)
        self.pivcols = []

    @property
    def rank(self):
        return len(self.pivcols)

    def _gemm_reduce(self, A):
        if self.pivcols:
            coeff = A[:, self.pivcols].copy()
            if np.any(coeff):
                A -= coeff @ self.R[: self.rank]
                np.mod(A, self.p, out=A)
        return A

    def add_rows(self, rows):
        """Returns the positions (within this chunk) of independent rows."""
        p = self.p
        A = np.asarray(rows, dtype=np.int64) % p
        A = self._gemm_reduce(A.astype(np.float64))
        added = []
        start_rank = self.rank
        for i in range(A.shape[0]):
            v = A[i]
            for k in range(start_rank, self.rank):
                c = self.pivcols[k]
                if v[c]:
                    v -= v[c] * self.R[k]
                    np.mod(v, p, out=v)
            nz = np.flatnonzero(v)
            if nz.size == 0:
                continue
            c = int(nz[0])
            v = np.mod(v * pow(int(v[c]), -1, p), p)
            r = self.rank
            if r >= self.cap:
                self.cap *= 2
                R = np.zeros((self.cap, self.n), dtype=np.float64)
                R[:r] = self.R[:r]
                self.R = R
            # back-eliminate the new pivot from stored rows
            colvals = self.R[:r, c].copy()
            if np.any(colvals):
                self.R[:r] -= np.outer(colvals, v)
                np.mod(self.R[:r], p, out=self.R[:r])
            self.R[r] = v
            self.pivcols.append(c)
            added.append(i)
        return added

    def coords(self, row):
        """Coefficients over the stored reduced rows, or None."""
        v = np.asarray(row, dtype=np.int64) % self.p
        v = v.astype(np.float64)
        c = v[self.pivcols].copy() if self.pivcols else np.zeros(0)
        if self.pivcols:
            v -= c @ self.R[: self.rank]
            np.mod(v, self.p, out=v)
        if np.any(v):
            return None
        return c.astype(np.int64)


def sparse_rows_to_dense(rows, width, dtype=object):
    out = np.zeros((len(rows), width), dtype=dtype)
    for i, r in enumerate(rows):
        for j, v in r.items():
            out[i, j] = v
    return out


def sparse_rows_modp(rows, width, p, field):
    """Sparse raw-valued rows to a dense int64 array reduced mod p."""
    out = np.zeros((len(rows), width), dtype=np.int64)
    rational = field.kind == "rational"
    for i, r in enumerate(rows):
        for j, v in r.items():
            out[i, j] = _fraction_mod(v, p) if rational else v % p
    return out


def _fraction_mod(x, q):
    num, den = x.numerator, x.denominator
    if den == 1:
        return num % q
    if den % q == 0:
        raise ZeroDivisionError
    return num * pow(den, -1, q) % q


class IntRowSolver:
    """Exact expansion of sparse vectors over a fixed independent basis.

    Basis rows are sparse dicts over Q (Fraction raws) or F_p (int raws).
    The basis is put in exact reduced echelon form once; a solve reads the
    candidate coefficients off the pivot columns, maps them back to the
    original basis, and certifies the expansion residual is exactly zero
    (multi-modular with a height bound over Q, directly mod p over F_p).
    Returns None when the vector is outside the span.
    """

    def __init__(self, field, rows, width):
        if field.kind not in ("rational", "prime"):
            raise ValueError("IntRowSolver needs a rational or prime base field")
        self.F = field
        self.width = width
        self.nbasis = len(rows)
        e = Echelon(field, track=True)
        for r in rows:
            if e.add(r) is None:
                raise ValueError("basis rows are dependent")
        # back-substitute to full RREF, updating coefficient tracking
        order = sorted(range(e.rank), key=lambda k: min(e.rows[k]))
        piv = [min(e.rows[k]) for k in order]
        for pos in range(e.rank - 1, -1, -1):
            k = order[pos]
            c = piv[pos]
            for pos2 in range(pos):
                j = order[pos2]
                f = e.rows[j].get(c)
                if f is not None and not field.is_zero(f):
                    vec_add_into(field, e.rows[j], e.rows[k], field.neg(f))
                    vec_add_into(field, e.coeffs[j], e.coeffs[k], field.neg(f))
        self.rref = [e.rows[k] for k in order]
        self.coeffs = [e.coeffs[k] for k in order]
        self.pivcols = piv
        self.rank = e.rank

        if field.kind == "prime":
            self.moduli = [field.p]
        else:
            self.moduli = list(_CERT_PRIMES)
        self._dense = {}
        # height data for the residual bound: max |numerator| and the lcm
        # of all denominators across the reduced basis
        self._num_max = 1
        self._den_lcm = 1
        if field.kind == "rational":
            for r in self.rref:
                for v in r.values():
                    self._num_max = max(self._num_max, abs(v.numerator))
                    self._den_lcm = math.lcm(self._den_lcm, v.denominator)

    def _reduce_basis(self, q):
        D = np.zeros((self.rank, self.width), dtype=np.float64)
        for i, r in enumerate(self.rref):
            for j, v in r.items():
                D[i, j] = _fraction_mod(v, q) if self.F.kind == "rational" else v % q
        return D

    def solve(self, vec):
        """Expansion of vec over the original basis rows, or None.

        The result is a dict {basis index: raw coefficient}.
        """
        F = self.F
        cand = [vec.get(c, F.zero()) for c in self.pivcols]
        if F.kind == "prime":
            ok = self._check(vec, cand, F.p)
        else:
            bound = self._height_bound(vec)
            prod, ok, i = 1, True, 0
            while ok and prod <= bound:
                if i >= len(self.moduli):
                    self.moduli.append(int(prevprime(self.moduli[-1])))
                q = self.moduli[i]
                i += 1
                try:
                    ok = self._check(vec, cand, q)
                except ZeroDivisionError:  # q divides a denominator: skip
                    continue
                prod *= q
        if not ok:
            return None
        out = {}
        for ck, coeff in zip(cand, self.coeffs):
            if not F.is_zero(ck):
                vec_add_into(F, out, coeff, ck)
        return out

    def _height_bound(self, vec):
        # The residual vec - sum(cand_k * rref_k) has, entrywise, a common
        # denominator dividing dv * den_lcm and numerator bounded by
        # dv * den_lcm * nv * (1 + rank * num_max); candidate coefficients
        # are themselves entries of vec.
        nv, dv = 1, 1
        for v in vec.values():
            nv = max(nv, abs(v.numerator))
            dv = math.lcm(dv, v.denominator)
        return dv * self._den_lcm * nv * (1 + self.rank * self._num_max)

    def batch_member(self, rows):
        """Span membership for a batch of sparse vectors, as a list of bools.

        Same certification as solve(), but the residual checks run as one
        dense matrix product per modulus.  Callers should chunk the batch
        (a few hundred rows) to bound the dense scratch size.
        """
        F = self.F
        if not rows:
            return []
        ok = np.ones(len(rows), dtype=bool)
        if F.kind == "prime":
            self._batch_check(rows, F.p, ok)
            return list(ok)
        bound = max(self._height_bound(r) for r in rows)
        prod, i = 1, 0
        while bool(ok.any()) and prod <= bound:
            if i >= len(self.moduli):
                self.moduli.append(int(prevprime(self.moduli[-1])))
            q = self.moduli[i]
            i += 1
            try:
                self._batch_check(rows, q, ok)
            except ZeroDivisionError:
                continue
            prod *= q
        return list(ok)

    def batch_solve(self, rows):
        """Exact expansions for a batch of sparse vectors (None = outside).

        Certification runs batched as in batch_member; the coefficients of
        vectors that certify are read off the pivot columns exactly, as in
        solve().  Callers should chunk the batch.
        """
        F = self.F
        if not rows:
            return []
        ok = np.ones(len(rows), dtype=bool)
        if F.kind == "prime":
            self._batch_check(rows, F.p, ok)
        else:
            bound = max(self._height_bound(r) for r in rows)
            prod, i = 1, 0
            while prod <= bound:
                if i >= len(self.moduli):
                    self.moduli.append(int(prevprime(self.moduli[-1])))
                q = self.moduli[i]
                i += 1
                try:
                    self._batch_check(rows, q, ok)
                except ZeroDivisionError:
                    continue
                prod *= q
        out = []
        for r, good in zip(rows, ok):
            if not good:
                out.append(None)
                continue
            coords = {}
            for c, coeff in zip(self.pivcols, self.coeffs):
                ck = r.get(c)
                if ck is not None and not F.is_zero(ck):
                    vec_add_into(F, coords, coeff, ck)
            out.append(coords)
        return out

    def _batch_check(self, rows, q, ok):
        if self.rank * q * q >= 2 ** 53:
            raise ValueError("rank too large for exact f64 residuals")
        if q not in self._dense:
            self._dense[q] = self._reduce_basis(q)
        D = self._dense[q]
        rational = self.F.kind == "rational"
        V = np.zeros((len(rows), self.width), dtype=np.float64)
        for i, r in enumerate(rows):
            if not ok[i]:
                continue
            for j, v in r.items():
                V[i, j] = _fraction_mod(v, q) if rational else v % q
        piv = np.array(self.pivcols, dtype=np.intp)
        res = V - V[:, piv] @ D
        np.mod(res, q, out=res)
        np.logical_and(ok, ~res.any(axis=1), out=ok)

    def _check(self, vec, cand, q):
        if q not in self._dense:
            self._dense[q] = self._reduce_basis(q)
        D = self._dense[q]
        if self.F.kind == "rational":
            cm = np.array([_fraction_mod(x, q) for x in cand], dtype=np.float64)
        else:
            cm = np.array([x % q for x in cand], dtype=np.float64)
        res = -(cm @ D)
        for j, v in vec.items():
            res[j] += _fraction_mod(v, q) if self.F.kind == "rational" else v % q
        np.mod(res, q, out=res)
        return not np.any(res)
