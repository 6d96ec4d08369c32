"""Finite-dimensional Lie algebras over exact fields.

Structure constants are stored sparsely for i < j only, so the
antisymmetry c[i][j] = -c[j][i] is derived rather than duplicated.  An
optional grading assigns each basis vector a label in (Z/2) x (Z/2) and
is enforced on the table at construction time.  Jacobi verification runs
on a flat int64 encoding of the table through the compiled kernel when
it is available and the numpy fallback otherwise; fields without an
integer encoding get a slow exact path.  Killing forms, orthogonal
algebras so(q), subalgebra closures, centers and ad^2 spectra are exact.
"""

from __future__ import annotations

import json
import random
from fractions import Fraction
from math import lcm

import numpy as np

from ._kernels import HAVE_SPEEDUPS, _speedups, fallback
from .linear import Echelon, op_flatten, op_trace_product, rank_of, vec_add_into
from .quadform import GramForm

GRADES = ((0, 0), (0, 1), (1, 0), (1, 1))

# headroom guards for the int64 and float64 kernel paths
_INT64_LIMIT = 1 << 62
_FLOAT_LIMIT = 1 << 53


class LieAlgebra:
    """dim-dimensional Lie algebra with sparse structure constants.

    table maps (i, j) with i < j to the sparse expansion {k: scalar} of
    [e_i, e_j]; the reversed order is obtained by negation.  grading, if
    given, lists one (Z/2) x (Z/2) label per basis vector, and the
    constructor rejects any table entry landing outside the component
    grade(i) + grade(j).
    """

    def __init__(self, field, dim, table, labels=None, grading=None):
        self.F = field
        self.dim = int(dim)
        if self.dim < 0:
            raise ValueError("dimension must be nonnegative")
        if labels is None:
            labels = [("e", k) for k in range(self.dim)]
        if len(labels) != self.dim:
            raise ValueError("one label per basis vector")
        self.labels = list(labels)
        if grading is not None:
            grading = [tuple(g) for g in grading]
            if len(grading) != self.dim or any(g not in GRADES for g in grading):
                raise ValueError("grading needs a (Z/2) x (Z/2) label per basis vector")
        self.grading = grading
        clean = {}
        for (i, j), cell in table.items():
            if not (0 <= i < j < self.dim):
                raise ValueError(f"table key ({i}, {j}) must satisfy 0 <= i < j < dim")
            row = {}
            for k, v in cell.items():
                if not 0 <= k < self.dim:
                    raise ValueError(f"table target {k} out of range")
                v = field.coerce(v)
                if field.is_zero(v):
                    continue
                if grading is not None:
                    want = (
                        (grading[i][0] + grading[j][0]) % 2,
                        (grading[i][1] + grading[j][1]) % 2,
                    )
                    if grading[k] != want:
                        raise ValueError(
                            f"[e_{i}, e_{j}] hits e_{k} outside component {want}"
                        )
                row[k] = v
            if row:
                clean[(i, j)] = row
        self.table = clean
        self._cache = {}

    def pair(self, i, j):
        """Sparse expansion of [e_i, e_j]; treat the result as read-only."""
        if i == j:
            return {}
        if i < j:
            return self.table.get((i, j), {})
        cell = self.table.get((j, i))
        if not cell:
            return {}
        F = self.F
        return {k: F.neg(v) for k, v in cell.items()}

    def coerce_vec(self, xs):
        F = self.F
        out = {}
        if isinstance(xs, dict):
            items = xs.items()
        else:
            xs = list(xs)
            if len(xs) != self.dim:
                raise ValueError(f"expected {self.dim} coordinates, got {len(xs)}")
            items = enumerate(xs)
        for k, x in items:
            if not 0 <= k < self.dim:
                raise ValueError(f"coordinate index {k} out of range")
            x = F.coerce(x)
            if not F.is_zero(x):
                out[k] = x
        return out

    def bracket(self, x, y):
        """[x, y] by bilinear extension of the table."""
        F = self.F
        x = self.coerce_vec(x)
        y = self.coerce_vec(y)
        acc = {}
        for i, xi in x.items():
            for j, yj in y.items():
                if i == j:
                    continue
                c = F.mul(xi, yj)
                if i < j:
                    cell = self.table.get((i, j))
                else:
                    cell = self.table.get((j, i))
                    c = F.neg(c)
                if cell:
                    vec_add_into(F, acc, cell, c)
        return acc

    def ad(self, x):
        """Column-sparse operator [x, -]."""
        x = self.coerce_vec(x)
        F = self.F
        cols = []
        for j in range(self.dim):
            acc = {}
            for i, xi in x.items():
                cell = self.pair(i, j)
                if cell:
                    vec_add_into(F, acc, cell, xi)
            cols.append(acc)
        return cols

    def grading_blocks(self):
        """Basis indices grouped by grading label (one block if ungraded)."""
        if self.grading is None:
            return [(None, list(range(self.dim)))]
        groups = {}
        for k, g in enumerate(self.grading):
            groups.setdefault(g, []).append(k)
        return [(g, groups[g]) for g in GRADES if g in groups]

    def flat_table(self):
        """Int64 kernel encoding (ptr, idx, val, p, denom), or None.

        Prime fields store residues with p > 0; the rationals scale every
        constant by the common denominator denom and set p = 0.  Other
        fields have no integer encoding and return None.
        """
        if "flat" in self._cache:
            return self._cache["flat"]
        kind = getattr(self.F, "kind", None)
        if kind == "prime":
            p, denom = self.F.p, 1

            def enc(v):
                return int(v) % p

        elif kind == "rational":
            p, denom = 0, 1
            for cell in self.table.values():
                for v in cell.values():
                    denom = lcm(denom, v.denominator)

            def enc(v):
                return int(v.numerator) * (denom // v.denominator)

        else:
            self._cache["flat"] = None
            return None
        n = self.dim
        counts = np.zeros(n * n, dtype=np.int64)
        for (i, j), cell in self.table.items():
            counts[i * n + j] = len(cell)
        ptr = np.zeros(n * n + 1, dtype=np.int64)
        np.cumsum(counts, out=ptr[1:])
        idx = np.zeros(int(ptr[-1]), dtype=np.int64)
        val = np.zeros(int(ptr[-1]), dtype=np.int64)
        for (i, j), cell in self.table.items():
            lo = int(ptr[i * n + j])
            for t, k in enumerate(sorted(cell)):
                idx[lo + t] = k
                val[lo + t] = enc(cell[k])
        flat = (ptr, idx, val, p, denom)
        self._cache["flat"] = flat
        return flat

    def __repr__(self):
        g = "graded" if self.grading is not None else "ungraded"
        return f"LieAlgebra(dim={self.dim}, {g}, over {self.F.fmt_field()})"


def _all_triples(n):
    for i in range(n - 2):
        for j in range(i + 1, n - 1):
            for k in range(j + 1, n):
                yield (i, j, k)


def _jacobi_exact(L, triples, max_witnesses):
    F = L.F
    one = F.one()
    witnesses = []
    for (i, j, k) in triples:
        acc = {}
        for (a, b, c) in ((i, j, k), (j, k, i), (k, i, j)):
            inner = L.pair(a, b)
            if inner:
                vec_add_into(F, acc, L.bracket(inner, {c: one}))
        if acc:
            witnesses.append((i, j, k))
            if len(witnesses) >= max_witnesses:
                break
    return witnesses


def _kernel_bounds(flat, n):
    """(int64 ok, float64 ok) accumulator-exactness guards."""
    ptr, _, val, p, _ = flat
    if len(val) == 0:
        return True, True
    rowmax = int(np.max(np.diff(ptr)))
    vmax = max(int(np.max(np.abs(val))), p)
    int_ok = 3 * rowmax * rowmax * vmax * vmax < _INT64_LIMIT
    float_ok = n * vmax * vmax < _FLOAT_LIMIT
    return int_ok, float_ok


def jacobi_check(L, mode=None, count=100_000, seed=20240603, max_witnesses=5):
    """Verify the Jacobi identity on basis triples.

    mode "full" iterates all i < j < k and is the default over prime
    fields; everywhere else the default is "sample", drawing count
    seeded random triples.  Returns {"mode", "backend", "checked",
    "witnesses", "ok"}; witnesses holds the first violating triples.
    """
    n = L.dim
    if mode is None:
        mode = "full" if getattr(L.F, "kind", None) == "prime" else "sample"
    if mode not in ("full", "sample"):
        raise ValueError("mode must be 'full' or 'sample'")
    if mode == "full":
        triples = None
        checked = n * (n - 1) * (n - 2) // 6
    else:
        rng = random.Random(seed)
        triples = (
            [tuple(sorted(rng.sample(range(n), 3))) for _ in range(count)]
            if n >= 3
            else []
        )
        checked = len(triples)

    flat = L.flat_table()
    backend = "exact"
    if flat is not None:
        ptr, idx, val, p, _ = flat
        int_ok, float_ok = _kernel_bounds(flat, n)
        if HAVE_SPEEDUPS and int_ok:
            backend = "cython"
            if triples is None:
                wit = _speedups.jacobi_full(n, ptr, idx, val, p, max_witnesses)
            else:
                arr = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
                wit = _speedups.jacobi_sampled(n, ptr, idx, val, p, arr)
        elif not HAVE_SPEEDUPS and (int_ok if triples is not None else float_ok):
            backend = "numpy"
            if triples is None:
                wit = fallback.jacobi_full(n, ptr, idx, val, p, max_witnesses)
            else:
                wit = fallback.jacobi_sampled(n, ptr, idx, val, p, triples)
    if backend == "exact":
        wit = _jacobi_exact(L, triples if triples is not None else _all_triples(n), max_witnesses)
    wit = [tuple(int(t) for t in w) for w in wit][:max_witnesses]
    return {
        "mode": mode,
        "backend": backend,
        "checked": checked,
        "witnesses": wit,
        "ok": not wit,
    }


def _dense_ads_int(L, rows, flat):
    """Dense scaled-integer ad matrices for the given basis rows."""
    ptr, idx, val, _, _ = flat
    n = L.dim
    out = np.zeros((len(rows), n, n), dtype=np.int64)
    for t, a in enumerate(rows):
        for j in range(n):
            if a == j:
                continue
            if a < j:
                s, sgn = a * n + j, 1
            else:
                s, sgn = j * n + a, -1
            lo, hi = int(ptr[s]), int(ptr[s + 1])
            out[t, idx[lo:hi], j] = sgn * val[lo:hi]
    return out


def killing_gram(L, spot_checks=4, seed=20240604):
    """Killing form kappa(e_a, e_b) = tr(ad_a ad_b) as a GramForm.

    With a grading, entries across distinct components vanish because
    ad_a ad_b shifts every graded piece; those blocks are skipped and a
    few are recomputed exactly as a spot check.  Within blocks the trace
    runs over the flat integer encoding when one exists (exact: the
    accumulators are guarded) and over sparse exact operators otherwise.
    """
    F = L.F
    n = L.dim
    mat = [[F.zero()] * n for _ in range(n)]
    blocks = L.grading_blocks()
    flat = L.flat_table()
    use_int = False
    if flat is not None:
        _, _, val, p, denom = flat
        vmax = max(int(np.max(np.abs(val))), p) if len(val) else 0
        # int64 matmul: each trace sums at most n*n products of two values
        use_int = n * n * vmax * vmax < _INT64_LIMIT

    if use_int:
        den2 = denom * denom
        for _, rows in blocks:
            ads = _dense_ads_int(L, rows, flat)
            k = len(rows)
            a_flat = ads.reshape(k, n * n)
            b_flat = ads.transpose(0, 2, 1).reshape(k, n * n)
            ints = a_flat @ b_flat.T
            for s, a in enumerate(rows):
                for t, b in enumerate(rows):
                    c = int(ints[s, t])
                    mat[a][b] = F.from_int(c) if p else F.coerce(Fraction(c, den2))
    else:
        for _, rows in blocks:
            ads = {a: L.ad({a: F.one()}) for a in rows}
            for s, a in enumerate(rows):
                for b in rows[: s + 1]:
                    v = op_trace_product(F, ads[a], ads[b])
                    mat[a][b] = v
                    mat[b][a] = v

    if L.grading is not None and len(blocks) > 1 and spot_checks:
        rng = random.Random(seed)
        for _ in range(spot_checks):
            (_, rows1), (_, rows2) = rng.sample(blocks, 2)
            a, b = rng.choice(rows1), rng.choice(rows2)
            v = op_trace_product(F, L.ad({a: F.one()}), L.ad({b: F.one()}))
            if not F.is_zero(v):
                raise ArithmeticError(
                    f"Killing entry ({a}, {b}) across grading components is nonzero"
                )
    return GramForm(F, mat)


def so_matrix(q, u, v):
    """Generator of so(q): x -> b(v, x) u - b(u, x) v, doubled polar b.

    Returned as a column-sparse operator on q.dim coordinates.  The
    doubling (b = polar of q, so b(e_u, e_u) = 2 q_u) makes the matrix
    commutators close on these generators with the classical
    coefficients; see so_algebra.
    """
    F = q.F
    qu, qv = q.entries[u], q.entries[v]
    cols = [dict() for _ in range(q.dim)]
    # columns: M(e_v) = 2 b(v, e_v) u picks up 4 q_v, likewise at u
    cols[v][u] = F.mul(F.from_int(4), qv)
    cols[u][v] = F.neg(F.mul(F.from_int(4), qu))
    return cols


def so_algebra(q):
    """Orthogonal Lie algebra so(q) on antisymmetric-matrix generators.

    Basis M_(u,v) for u < v, realized by so_matrix; the structure
    constants come from the matrix commutators, which stay in the span
    because each generator is antisymmetric for the polar form of q.
    dim = m (m - 1) / 2 for m = q.dim.
    """
    F = q.F
    m = q.dim
    pairs = [(u, v) for u in range(m) for v in range(u + 1, m)]
    index = {p: t for t, p in enumerate(pairs)}
    four = F.from_int(4)

    def coeff_of(cvals, r, s):
        # commutator column s holds 4 q_s * c_(r,s) at row r
        return F.div(cvals, F.mul(four, q.entries[s]))

    table = {}
    for tP, (u, v) in enumerate(pairs):
        MP = so_matrix(q, u, v)
        for tQ in range(tP + 1, len(pairs)):
            up, vp = pairs[tQ]
            MQ = so_matrix(q, up, vp)
            # sparse commutator: columns touched are u, v, u', v'
            cell = {}
            for s in {u, v, up, vp}:
                col = {}
                for jj, x in MQ[s].items():
                    vec_add_into(F, col, MP[jj], x)
                for jj, x in MP[s].items():
                    neg = F.neg(x)
                    vec_add_into(F, col, MQ[jj], neg)
                for r, x in col.items():
                    if r < s:
                        cell[index[(r, s)]] = coeff_of(x, r, s)
            cell = {k: c for k, c in cell.items() if not F.is_zero(c)}
            if cell:
                table[(tP, tQ)] = cell
    labels = [("M",) + p for p in pairs]
    return LieAlgebra(F, len(pairs), table, labels=labels)


def subalgebra_closure(L, vectors):
    """(dim, basis, is_closed) for the Lie subalgebra generated by vectors.

    Iterates span-and-bracket until stable; is_closed reports whether the
    input span was already closed under the bracket.
    """
    F = L.F
    ech = Echelon(F)
    rows = []
    for v in vectors:
        w = L.coerce_vec(v)
        if w and ech.add(w) is not None:
            rows.append(ech.rows[-1])
    input_rank = ech.rank
    done = 0
    while done < len(rows):
        r = rows[done]
        done += 1
        for s in rows[:done]:
            w = L.bracket(r, s)
            if w and ech.add(w) is not None:
                rows.append(ech.rows[-1])
    return ech.rank, [dict(r) for r in ech.rows], ech.rank == input_rank


def center_dimension(L):
    """dim of the center: exact corank of the stacked adjoint rows."""
    F = L.F
    rows = [op_flatten(L.ad({a: F.one()}), L.dim) for a in range(L.dim)]
    return L.dim - rank_of(F, rows)


def _block_nullity(F, cols, block, shift):
    """Exact nullity of (S - shift * id) restricted to the block indices."""
    local = {g: t for t, g in enumerate(block)}
    rows = []
    for g in block:
        row = {local[i]: v for i, v in cols[g].items()}
        if shift is not None:
            cur = row.get(local[g], F.zero())
            cur = F.sub(cur, shift)
            if F.is_zero(cur):
                row.pop(local[g], None)
            else:
                row[local[g]] = cur
        if row:
            rows.append(row)
    return len(block) - rank_of(F, rows)


def ad_square_spectrum(L, x, eigenvalues=(), blocks=None):
    """Kernel and candidate-eigenspace dimensions of ad_x^2 per block.

    blocks defaults to the grading components (the whole space when
    ungraded).  Each block must be invariant under ad_x^2; leakage
    raises ArithmeticError.  Returns one report per block with the exact
    kernel dimension and the eigenspace dimension for every candidate.
    """
    F = L.F
    ad = L.ad(x)
    cols = []
    for j in range(L.dim):
        acc = {}
        for i, v in ad[j].items():
            vec_add_into(F, acc, ad[i], v)
        cols.append(acc)
    if blocks is None:
        named = L.grading_blocks()
    else:
        named = [(t, list(b)) for t, b in enumerate(blocks)]
    reports = []
    for label, block in named:
        members = set(block)
        for g in block:
            if not members.issuperset(cols[g]):
                raise ArithmeticError(
                    f"ad_x^2 maps index {g} outside its declared block"
                )
        rep = {
            "label": label,
            "dim": len(block),
            "kernel": _block_nullity(F, cols, block, None),
            "eigen": [
                (lam, _block_nullity(F, cols, block, F.coerce(lam)))
                for lam in eigenvalues
            ],
        }
        reports.append(rep)
    return reports


def export_lines(L):
    """Deterministic "i j k value" lines with JSON-encoded scalars."""
    F = L.F
    out = []
    for (i, j) in sorted(L.table):
        cell = L.table[(i, j)]
        for k in sorted(cell):
            enc = json.dumps(F.to_json(cell[k]), separators=(",", ":"))
            out.append(f"{i} {j} {k} {enc}")
    return out


def import_table(field, dim, lines, labels=None, grading=None):
    """Rebuild a LieAlgebra from export_lines output."""
    table = {}
    for line in lines:
        line = line.strip()
        if not line:
            continue
        i, j, k, enc = line.split(None, 3)
        cell = table.setdefault((int(i), int(j)), {})
        cell[int(k)] = field.from_json(json.loads(enc))
    return LieAlgebra(field, dim, table, labels=labels, grading=grading)
