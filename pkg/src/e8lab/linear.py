"""Field-generic exact sparse linear algebra.

Vectors are dicts {index: raw value} with no stored zeros.  Operators are
column-sparse: op[j] is the dict expansion of op(e_j), so applying to a
sparse vector touches only its support.  Everything here works over any
Field from scalars and covers the small exact computations: derivation
bases, membership solves, Gram diagonalization, subalgebra spans.  Large
rank and nullity certificates go through the numpy routines in modp.
"""

from __future__ import annotations


def vec_scale(F, c, u):
    if F.is_zero(c):
        return {}
    out = {}
    for i, v in u.items():
        w = F.mul(c, v)
        if not F.is_zero(w):
            out[i] = w
    return out


def vec_add_into(F, acc, u, c=None):
    """acc += c*u in place (c defaults to 1)."""
    for i, v in u.items():
        w = v if c is None else F.mul(c, v)
        if i in acc:
            s = F.add(acc[i], w)
            if F.is_zero(s):
                del acc[i]
            else:
                acc[i] = s
        elif not F.is_zero(w):
            acc[i] = w
    return acc


def vec_sub(F, u, v):
    return vec_add_into(F, dict(u), v, F.from_int(-1))


def vec_eq(F, u, v):
    return not vec_sub(F, u, v)


def vec_dot(F, u, v):
    if len(v) < len(u):
        u, v = v, u
    acc = F.zero()
    for i, a in u.items():
        b = v.get(i)
        if b is not None:
            acc = F.add(acc, F.mul(a, b))
    return acc


def op_identity(F, n):
    one = F.one()
    return [{j: one} for j in range(n)]


def op_zero(n):
    return [dict() for _ in range(n)]


def op_add(F, A, B, c=None):
    return [vec_add_into(F, dict(a), b, c) for a, b in zip(A, B)]


def op_scale(F, c, A):
    return [vec_scale(F, c, col) for col in A]


def op_apply(F, A, v):
    acc = {}
    for j, c in v.items():
        vec_add_into(F, acc, A[j], c)
    return acc


def op_compose(F, A, B):
    """(A o B)(e_j) = A(B(e_j))."""
    return [op_apply(F, A, col) for col in B]


def op_commutator(F, A, B):
    return op_add(F, op_compose(F, A, B), op_compose(F, B, A), F.from_int(-1))


def op_trace(F, A):
    acc = F.zero()
    for j, col in enumerate(A):
        v = col.get(j)
        if v is not None:
            acc = F.add(acc, v)
    return acc


def op_trace_product(F, A, B):
    """tr(A o B) without forming the composite."""
    acc = F.zero()
    for j, col in enumerate(B):
        for i, v in col.items():
            a = A[i].get(j)
            if a is not None:
                acc = F.add(acc, F.mul(a, v))
    return acc


def op_flatten(A, width):
    """Operator -> single sparse vector keyed i*width + j (i output index)."""
    out = {}
    for j, col in enumerate(A):
        for i, v in col.items():
            out[i * width + j] = v
    return out


def op_unflatten(vec, n, width):
    A = [dict() for _ in range(n)]
    for k, v in vec.items():
        A[k % width][k // width] = v
    return A


def op_is_zero(A):
    return all(not col for col in A)


def op_eq(F, A, B):
    return all(vec_eq(F, a, b) for a, b in zip(A, B))


class Echelon:
    """Incremental sparse row echelon with optional coefficient tracking.

    Stored rows are normalized to leading coefficient 1 at their pivot
    (the smallest index).  With track=True each stored row also carries
    its expansion over the successfully added input rows, so solve() can
    return exact coordinates over the caller's basis.
    """

    def __init__(self, field, track=False):
        self.F = field
        self.track = track
        self.rows = []
        self.coeffs = []
        self.pivots = {}
        self.nadded = 0

    @property
    def rank(self):
        return len(self.rows)

    def reduce(self, vec):
        """Return (residual, combo) with vec = combo over added rows + residual."""
        F = self.F
        res = dict(vec)
        combo = {} if self.track else None
        while True:
            hit = None
            for c in res:
                r = self.pivots.get(c)
                if r is not None and (hit is None or c < hit[0]):
                    hit = (c, r)
            if hit is None:
                return res, combo
            c, r = hit
            f = res[c]
            vec_add_into(F, res, self.rows[r], F.neg(f))
            res.pop(c, None)
            if self.track:
                vec_add_into(F, combo, self.coeffs[r], f)

    def add(self, vec):
        """Insert a row; returns its input id if independent, else None."""
        F = self.F
        res, combo = self.reduce(vec)
        rid = self.nadded
        self.nadded += 1
        if not res:
            return None
        c = min(res)
        f = F.inv(res[c])
        self.pivots[c] = len(self.rows)
        self.rows.append(vec_scale(F, f, res))
        if self.track:
            cf = vec_scale(F, F.neg(f), combo)
            vec_add_into(F, cf, {rid: f})
            self.coeffs.append(cf)
        return rid

    def solve(self, vec):
        """Exact coordinates of vec over the added rows, or None."""
        if not self.track:
            raise ValueError("echelon built without coefficient tracking")
        res, combo = self.reduce(vec)
        if res:
            return None
        return combo

    def contains(self, vec):
        res, _ = self.reduce(vec)
        return not res


def rank_of(F, vectors):
    e = Echelon(F)
    for v in vectors:
        e.add(v)
    return e.rank


def gram_diagonalize(F, G):
    """Symmetric congruence diagonalization, char != 2.

    G is a dense list of lists.  Returns (diag, T, radical) with
    T G T^t = diag(diag ++ zeros(radical)); diag holds the nonzero
    entries only, T is a dense basis-change matrix.
    """
    n = len(G)
    A = [[F.coerce(x) for x in row] for row in G]
    T = [[F.one() if i == j else F.zero() for j in range(n)] for i in range(n)]

    def rowcol_op(dst, src, c):
        for j in range(n):
            A[dst][j] = F.add(A[dst][j], F.mul(c, A[src][j]))
        for i in range(n):
            A[i][dst] = F.add(A[i][dst], F.mul(c, A[i][src]))
        for j in range(n):
            T[dst][j] = F.add(T[dst][j], F.mul(c, T[src][j]))

    def swap(i, j):
        A[i], A[j] = A[j], A[i]
        for r in A:
            r[i], r[j] = r[j], r[i]
        T[i], T[j] = T[j], T[i]

    diag = []
    for k in range(n):
        if F.is_zero(A[k][k]):
            piv = next((l for l in range(k + 1, n) if not F.is_zero(A[l][l])), None)
            if piv is not None:
                swap(k, piv)
            else:
                off = next(
                    (
                        (i, j)
                        for i in range(k, n)
                        for j in range(i + 1, n)
                        if not F.is_zero(A[i][j])
                    ),
                    None,
                )
                if off is None:
                    # remaining block is identically zero: the radical
                    return diag, T, n - k
                i, j = off
                rowcol_op(i, j, F.one())
                if i != k:
                    swap(k, i)
        p = A[k][k]
        pinv = F.inv(p)
        for l in range(k + 1, n):
            if not F.is_zero(A[l][k]):
                rowcol_op(l, k, F.neg(F.mul(A[l][k], pinv)))
        diag.append(p)
    return diag, T, 0
