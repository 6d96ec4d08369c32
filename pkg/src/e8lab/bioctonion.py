"""Bi-octonion algebras with involution and their Lie related triples.

A bi-octonion algebra over K is either a decomposable tensor product
C1 (x)_K C2 of two octonion algebras or the multiplicative transfer
N_{E/K}(C) of an octonion algebra C over a quadratic field extension
E = K(sqrt d).  Both are 64-dimensional K-algebras with involution; the
transfer case is realized concretely as the fixed space of the switch
x (x) y -> y (x) x on iota(C) (x)_E C, with the same fixed K-basis used
for the multiplicative transfer of quadratic forms (t_uu, then
t_uv + t_vu and s_uv - s_vu for u < v), so Gram comparisons are
entrywise exact.

The module also builds the 56-dimensional Lie algebra of related
triples T_I spanned by the generators T^i_{a,b}, its structural
description T' in terms of Der(A,-) and skew left/right
multiplications, and the certified equality T_I = T'.
"""

import random

import numpy as np

from .composition import cayley_dickson, derivation_basis
from .linear import (
    Echelon,
    op_add,
    op_apply,
    op_compose,
    op_eq,
    op_flatten,
    op_is_zero,
    op_scale,
    op_trace_product,
    op_zero,
    vec_add_into,
    vec_eq,
    vec_scale,
    vec_sub,
)
from .modp import (
    IncrementalEchelon,
    IntRowSolver,
    _fraction_mod,
    nullspace_modp,
    sparse_rows_modp,
)
from .quadform import GramForm, diagonalize
from .scalars import FieldError, FieldMismatchError

DIM = 64
ENDO = DIM * DIM
_SPAN_PRIME = 4194301
_DER_PRIME = 65521


class BiOctonion:
    """64-dimensional algebra with involution over the base field K.

    Elements are sparse dicts {basis index: raw scalar}; the structure
    table holds table[i][j] = e_i * e_j as a sparse dict, and the
    involution is diagonal on the basis with signs inv_signs.
    """

    def __init__(self, field, table, inv_signs, labels, kind, parts):
        self.F = field
        self.dim = DIM
        self.table = table
        self.inv_signs = inv_signs
        self.labels = labels
        self.kind = kind
        self.parts = parts
        self.skew_indices = tuple(
            k for k, s in enumerate(inv_signs) if s < 0
        )
        self.herm_indices = tuple(
            k for k, s in enumerate(inv_signs) if s > 0
        )
        self._skew_set = frozenset(self.skew_indices)
        self._cache = {}

    # -- element helpers ----------------------------------------------------

    def one(self):
        return {0: self.F.one()}

    def basis(self, k):
        return {k: self.F.one()}

    def coerce_vec(self, xs):
        F = self.F
        out = {}
        for k, x in enumerate(xs):
            x = F.coerce(x)
            if not F.is_zero(x):
                out[k] = x
        return out

    def mul(self, x, y):
        F = self.F
        acc = {}
        for i, a in x.items():
            row = self.table[i]
            for j, b in y.items():
                vec_add_into(F, acc, row[j], F.mul(a, b))
        return acc

    def conj(self, x):
        F = self.F
        return {
            k: (v if self.inv_signs[k] > 0 else F.neg(v))
            for k, v in x.items()
        }

    def is_skew(self, x):
        return all(k in self._skew_set for k in x)

    # -- operators ----------------------------------------------------------

    def left_mult(self, x):
        F = self.F
        cols = []
        for j in range(DIM):
            acc = {}
            for i, a in x.items():
                vec_add_into(F, acc, self.table[i][j], a)
            cols.append(acc)
        return cols

    def right_mult(self, x):
        F = self.F
        cols = []
        for j in range(DIM):
            acc = {}
            for i, a in x.items():
                vec_add_into(F, acc, self.table[j][i], a)
            cols.append(acc)
        return cols

    def descriptor(self):
        if self.kind == "decomposable":
            c1, c2 = self.parts
            return {
                "kind": "decomposable",
                "factors": [c1.descriptor(), c2.descriptor()],
            }
        E, C = self.parts
        return {
            "kind": "transfer",
            "etale": E.descriptor(),
            "octonion": C.descriptor(),
        }

    def __repr__(self):
        return "BiOctonion(%s over %s)" % (self.kind, self.F.fmt_field())


def build_decomposable(C1, C2):
    """C1 (x)_K C2 on the basis e_u (x) f_v at index 8u + v."""
    if C1.F.descriptor() != C2.F.descriptor():
        raise FieldMismatchError("octonion factors over different fields")
    if C1.dim != 8 or C2.dim != 8:
        raise ValueError("bi-octonions need two octonion factors")
    F = C1.F
    table = [[None] * DIM for _ in range(DIM)]
    for u in range(8):
        for up in range(8):
            cu = C1.coef[u][up]
            for v in range(8):
                for vp in range(8):
                    w = F.mul(cu, C2.coef[v][vp])
                    k = 8 * (u ^ up) + (v ^ vp)
                    cell = {} if F.is_zero(w) else {k: w}
                    table[8 * u + v][8 * up + vp] = cell
    signs = [_eps(u) * _eps(v) for u in range(8) for v in range(8)]
    labels = [("t", u, v) for u in range(8) for v in range(8)]
    return BiOctonion(F, table, signs, labels, "decomposable", (C1, C2))


def build_transfer(E, C):
    """N_{E/K}(C) for an octonion algebra C over quadratic etale E.

    Field case: the switch-fixed K-subspace of iota(C) (x)_E C with
    multiplication restricted to it.  Split case: C is a pair of
    octonion algebras over K and the transfer is just their tensor
    product, so this delegates to build_decomposable.
    """
    if E.kind != "quad_etale":
        raise FieldError("transfer needs a quadratic etale extension")
    if C.F.descriptor() != E.descriptor():
        raise FieldMismatchError("octonion algebra is not over E")
    K = E.base
    if E.split:
        C1 = cayley_dickson(K, [g[0] for g in C.params])
        C2 = cayley_dickson(K, [g[1] for g in C.params])
        return build_decomposable(C1, C2)

    labels = [("uu", u) for u in range(8)]
    pos = {}
    for u in range(8):
        for v in range(u + 1, 8):
            pos[u, v] = len(labels)
            labels.append(("v", u, v))
            labels.append(("w", u, v))
    sqrt_d = (K.zero(), K.one())

    # Monomial normal form: alpha * t_uv stands for (alpha e_u) (x) e_v,
    # scalars pulled to the left slot; the switch acts as
    # alpha t_uv -> conj(alpha) t_vu.  The fixed-basis vector w_uv is
    # e_u (x) sqrt(d) e_v - e_v (x) sqrt(d) e_u (sqrt(d) on the right
    # slot, matching the multiplicative transfer of the norm form),
    # which is -sqrt(d) t_uv + sqrt(d) t_vu in left-normalized form.
    def expand(i):
        lab = labels[i]
        if lab[0] == "uu":
            return {(lab[1], lab[1]): E.one()}
        _, u, v = lab
        if lab[0] == "v":
            return {(u, v): E.one(), (v, u): E.one()}
        return {(u, v): E.neg(sqrt_d), (v, u): sqrt_d}

    def fold(mono):
        out = {}
        seen = set()
        for (u, v), c in mono.items():
            if (u, v) in seen:
                continue
            if u == v:
                x, y = c
                assert K.is_zero(y), "switch symmetry broken on a diagonal"
                if not K.is_zero(x):
                    out[u] = x
                continue
            p, q = (u, v) if u < v else (v, u)
            cp = mono.get((p, q), E.zero())
            cq = mono.get((q, p), E.zero())
            seen.add((p, q))
            seen.add((q, p))
            assert E.eq(cq, E.conj(cp)), "switch symmetry broken on a pair"
            x, y = cp
            if not K.is_zero(x):
                out[pos[p, q]] = x
            if not K.is_zero(y):
                out[pos[p, q] + 1] = K.neg(y)
        return out

    def mono_mul(m1, m2):
        acc = {}
        for (u1, v1), a in m1.items():
            for (u2, v2), b in m2.items():
                c = E.mul(a, b)
                c = E.mul(c, C.coef[u1][u2])
                c = E.mul(c, E.conj(C.coef[v1][v2]))
                key = (u1 ^ u2, v1 ^ v2)
                s = E.add(acc.get(key, E.zero()), c)
                if E.is_zero(s):
                    acc.pop(key, None)
                else:
                    acc[key] = s
        return acc

    table = [[None] * DIM for _ in range(DIM)]
    for i in range(DIM):
        mi = expand(i)
        for j in range(DIM):
            table[i][j] = fold(mono_mul(mi, expand(j)))
    signs = []
    for lab in labels:
        if lab[0] == "uu":
            signs.append(1)
        else:
            signs.append(_eps(lab[1]) * _eps(lab[2]))
    A = BiOctonion(K, table, signs, labels, "transfer", (E, C))
    A._expand = expand
    A._fold = fold
    return A


def _eps(u):
    return 1 if u == 0 else -1


# ---------------------------------------------------------------------------
# trace forms


def _left_trace_vec(A):
    F = A.F
    if "trL" not in A._cache:
        trL = []
        for k in range(DIM):
            acc = F.zero()
            for j in range(DIM):
                v = A.table[k][j].get(j)
                if v is not None:
                    acc = F.add(acc, v)
            trL.append(acc)
        A._cache["trL"] = trL
    return A._cache["trL"]


def trace_form(A):
    """Gram of the normalized trace form (x,y) -> tr(L_{x conj(y) + y conj(x)})/128."""
    F = A.F
    trL = _left_trace_vec(A)
    s = F.inv(F.from_int(128))
    mat = [[F.zero()] * DIM for _ in range(DIM)]
    for i in range(DIM):
        for j in range(i + 1):
            z = dict(vec_scale(F, F.from_int(A.inv_signs[j]), A.table[i][j]))
            vec_add_into(F, z, A.table[j][i], F.from_int(A.inv_signs[i]))
            acc = F.zero()
            for k, v in z.items():
                acc = F.add(acc, F.mul(v, trL[k]))
            val = F.mul(s, acc)
            mat[i][j] = val
            mat[j][i] = val
    return GramForm(F, mat)


def normalized_trace_form(A):
    """The normalized trace form as a diagonalized quadratic form."""
    return diagonalize(trace_form(A))


# ---------------------------------------------------------------------------
# derivations


def kron_left_op(D):
    """D (x) 1 on the decomposable basis index 8u + v."""
    cols = [dict() for _ in range(DIM)]
    for u in range(8):
        col = D[u]
        for v in range(8):
            cols[8 * u + v] = {8 * p + v: w for p, w in col.items()}
    return cols


def kron_right_op(D):
    """1 (x) D on the decomposable basis index 8u + v."""
    cols = [dict() for _ in range(DIM)]
    for v in range(8):
        col = D[v]
        for u in range(8):
            cols[8 * u + v] = {8 * u + q: w for q, w in col.items()}
    return cols


def transfer_op(A, D):
    """Transport an E-linear map D of C to the fixed space of iota(C) (x) C.

    D acts as D (x) 1 + 1 (x) D on the tensor square; this commutes with
    the switch, so it restricts to the fixed K-basis.
    """
    E, _ = A.parts
    cols = []
    for i in range(DIM):
        acc = {}
        for (u, v), a in A._expand(i).items():
            for p, w in D[u].items():
                key = (p, v)
                s = E.add(acc.get(key, E.zero()), E.mul(a, w))
                if E.is_zero(s):
                    acc.pop(key, None)
                else:
                    acc[key] = s
            for q, w in D[v].items():
                key = (u, q)
                s = E.add(acc.get(key, E.zero()), E.mul(a, E.conj(w)))
                if E.is_zero(s):
                    acc.pop(key, None)
                else:
                    acc[key] = s
        cols.append(A._fold(acc))
    return cols


def derivation_space(A):
    """A 28-dim basis of Der(A,-), from octonion derivations.

    Decomposable case: D (x) 1 and 1 (x) D' over the two factors.
    Transfer case: the transported D and (sqrt d)D for D in Der(C).
    Each member is exactly a derivation commuting with the involution;
    completeness (no 29th derivation) is certified separately by
    derivation_nullity.
    """
    if "ders" in A._cache:
        return A._cache["ders"]
    if A.kind == "decomposable":
        C1, C2 = A.parts
        out = [kron_left_op(D) for D in derivation_basis(C1)]
        out += [kron_right_op(D) for D in derivation_basis(C2)]
    else:
        E, C = A.parts
        sqrt_d = (E.base.zero(), E.base.one())
        out = []
        for D in derivation_basis(C):
            out.append(transfer_op(A, D))
            out.append(transfer_op(A, op_scale(E, sqrt_d, D)))
    if len(out) != 28:
        raise ArithmeticError("expected 28 structural derivations")
    e = Echelon(A.F)
    for D in out:
        if e.add(op_flatten(D, DIM)) is None:
            raise ArithmeticError("structural derivations are dependent")
    A._cache["ders"] = out
    return out


def derivation_nullity(A, prime=_DER_PRIME, max_gens=4, seed=20240601):
    """Upper bound for dim Der(A,-) by a mod-p nullity certificate.

    Stacks the involution-equivariance constraints (as a restriction of
    the unknowns) with the Leibniz constraints D(a e_n) = D(a)e_n + a D(e_n)
    for a few fixed elements a, and intersects kernels mod p.  Since
    Der(A,-) lies in the rational kernel and rational nullity is at most
    the mod-p nullity, the result bounds dim Der(A,-) from above.
    """
    F = A.F
    p = prime
    rational = F.kind == "rational"
    if not rational and F.kind != "prime":
        raise ValueError("certificate needs a rational or prime field")
    if not rational:
        p = F.p

    def red(x):
        return _fraction_mod(x, p) if rational else x % p

    eq_cols = np.array(
        [
            64 * a + b
            for a in range(DIM)
            for b in range(DIM)
            if A.inv_signs[a] == A.inv_signs[b]
        ],
        dtype=np.intp,
    )
    R3 = np.zeros((DIM, DIM, DIM), dtype=np.float64)
    for u in range(DIM):
        for n in range(DIM):
            for m, w in A.table[u][n].items():
                R3[n, m, u] = red(w)
    eye = np.eye(DIM, dtype=np.float64)

    rng = random.Random(seed)
    N = None
    used = 0
    while used < max_gens:
        support = rng.sample(range(DIM), 4)
        a = {k: F.one() for k in support}
        La = np.zeros((DIM, DIM), dtype=np.float64)
        for j, col in enumerate(A.left_mult(a)):
            for i, w in col.items():
                La[i, j] = red(w)
        av = np.zeros(DIM, dtype=np.float64)
        for k in support:
            av[k] = 1.0
        M = np.kron(eye, La.T)
        M -= (
            R3.transpose(1, 0, 2).reshape(ENDO, DIM)[:, :, None]
            * av[None, None, :]
        ).reshape(ENDO, ENDO)
        M -= np.kron(La, eye)
        np.mod(M, p, out=M)
        M = np.ascontiguousarray(M[:, eq_cols])
        used += 1
        if N is None:
            N = nullspace_modp(M, p)
        else:
            NS = nullspace_modp(np.mod(M @ N.T, p), p)
            N = np.mod(NS @ N, p)
        if len(N) <= 28:
            break
    return {"nullity_bound": len(N), "prime": p, "generators": used}


# ---------------------------------------------------------------------------
# related triples


class RelatedTriple:
    """Triple (T1, T2, T3) of endomorphisms of A, stored at slots 0..2."""

    __slots__ = ("A", "ops")

    def __init__(self, A, ops):
        self.A = A
        self.ops = tuple(ops)

    def add(self, other, c=None):
        F = self.A.F
        return RelatedTriple(
            self.A,
            [op_add(F, a, b, c) for a, b in zip(self.ops, other.ops)],
        )

    def scale(self, c):
        F = self.A.F
        return RelatedTriple(self.A, [op_scale(F, c, a) for a in self.ops])

    def commutator(self, other):
        F = self.A.F
        out = []
        for a, b in zip(self.ops, other.ops):
            ab = op_compose(F, a, b)
            out.append(op_add(F, ab, op_compose(F, b, a), F.from_int(-1)))
        return RelatedTriple(self.A, out)

    def is_zero(self):
        return all(op_is_zero(a) for a in self.ops)

    def eq(self, other):
        F = self.A.F
        return all(op_eq(F, a, b) for a, b in zip(self.ops, other.ops))

    def flatten(self):
        out = {}
        for k, a in enumerate(self.ops):
            for key, v in op_flatten(a, DIM).items():
                out[k * ENDO + key] = v
        return out

    def identity_defect(self, x, y):
        """Defects of the related-triple identity at (x, y), per rotation.

        For each cyclic (i j k) of (1 2 3) this returns
        conj(T_i(conj(xy))) - T_j(x)y - x T_k(y) as a vector.
        """
        A, F = self.A, self.A.F
        xy_bar = A.conj(A.mul(x, y))
        out = []
        for r in range(3):
            lhs = A.conj(op_apply(F, self.ops[r], xy_bar))
            rhs = A.mul(op_apply(F, self.ops[(r + 1) % 3], x), y)
            vec_add_into(
                F, rhs, A.mul(x, op_apply(F, self.ops[(r + 2) % 3], y))
            )
            out.append(vec_sub(F, lhs, rhs))
        return out

    def check_identity(self, pairs=None):
        """True when the related-triple identity holds at the given
        basis pairs (default: all 64 x 64)."""
        A = self.A
        if pairs is None:
            pairs = (
                (i, j) for i in range(DIM) for j in range(DIM)
            )
        for i, j in pairs:
            defs = self.identity_defect(A.basis(i), A.basis(j))
            if any(d for d in defs):
                return False
        return True

    def to_json(self):
        F = self.A.F
        return [
            [[i, j, F.to_json(v)] for j, col in enumerate(a) for i, v in col.items()]
            for a in self.ops
        ]


def make_triple(A, i, a, b):
    """The generator triple T^i_{a,b}; slots hold (indices mod 3)
    T_i = L_bb L_a - L_ab L_b, T_{i+1} = R_bb R_a - R_ab R_b,
    T_{i+2} = R_{ab b - bb a} + L_b L_ab - L_a L_bb."""
    if i not in (1, 2, 3):
        raise ValueError("triple index must be 1, 2 or 3")
    F = A.F
    neg = F.from_int(-1)
    ab = A.conj(a)
    bb = A.conj(b)
    La, Lb = A.left_mult(a), A.left_mult(b)
    Lab, Lbb = A.left_mult(ab), A.left_mult(bb)
    Ra, Rb = A.right_mult(a), A.right_mult(b)
    Rab, Rbb = A.right_mult(ab), A.right_mult(bb)
    w = vec_sub(F, A.mul(ab, b), A.mul(bb, a))
    t_i = op_add(F, op_compose(F, Lbb, La), op_compose(F, Lab, Lb), neg)
    t_i1 = op_add(F, op_compose(F, Rbb, Ra), op_compose(F, Rab, Rb), neg)
    t_i2 = op_add(
        F,
        op_add(F, A.right_mult(w), op_compose(F, Lb, Lab)),
        op_compose(F, La, Lbb),
        neg,
    )
    ops = [None, None, None]
    ops[(i - 1) % 3] = t_i
    ops[i % 3] = t_i1
    ops[(i + 1) % 3] = t_i2
    return RelatedTriple(A, ops)


def der_triple(A, D):
    return RelatedTriple(A, (D, D, D))


def skew_triples(A, s):
    """The two independent triple families at a skew element s:
    (s_1,s_2,s_3) = (s,-s,0) and (s,0,-s) in Eq-style slots
    (L_{s2} - R_{s3}, L_{s3} - R_{s1}, L_{s1} - R_{s2})."""
    F = A.F
    neg = F.from_int(-1)
    Ls, Rs = A.left_mult(s), A.right_mult(s)
    fam1 = RelatedTriple(
        A,
        (
            op_scale(F, neg, Ls),
            op_scale(F, neg, Rs),
            op_add(F, Ls, Rs),
        ),
    )
    fam2 = RelatedTriple(
        A,
        (
            Rs,
            op_scale(F, neg, op_add(F, Ls, Rs)),
            Ls,
        ),
    )
    return fam1, fam2


def tri_prime_basis(A):
    """The 56 structural triples spanning T': (D,D,D) over Der(A,-)
    plus both skew families over a basis of Skew(A,-)."""
    if "tri_prime" in A._cache:
        return A._cache["tri_prime"]
    out = [der_triple(A, D) for D in derivation_space(A)]
    for k in A.skew_indices:
        fam1, fam2 = skew_triples(A, A.basis(k))
        out.append(fam1)
        out.append(fam2)
    A._cache["tri_prime"] = out
    return out


def _tri_prime_solver(A):
    if "tri_solver" not in A._cache:
        rows = [t.flatten() for t in tri_prime_basis(A)]
        A._cache["tri_solver"] = IntRowSolver(A.F, rows, 3 * ENDO)
    return A._cache["tri_solver"]


def decompose_triple(T):
    """Write T as (D,D,D) + (L_{s2}-R_{s3}, L_{s3}-R_{s1}, L_{s1}-R_{s2}).

    Returns (D, s1, s2, s3) with s_i skew summing to zero and D a
    derivation commuting with the involution; raises ArithmeticError
    when T is outside T'.  Uses T_k(1) = s_{k+1} - s_{k+2} to peel off
    the skew part, then certifies D in Der(A,-) by exact linear solve.
    """
    A = T.A
    F = A.F
    if F.char == 3:
        raise ArithmeticError("decomposition divides by 3")
    third = F.inv(F.from_int(3))
    one = A.one()
    u = [op_apply(F, T.ops[k], one) for k in range(3)]
    s1 = vec_scale(F, third, vec_sub(F, u[2], u[1]))
    s2 = vec_scale(F, third, vec_sub(F, u[0], u[2]))
    s3 = vec_scale(F, third, vec_sub(F, u[1], u[0]))
    ss = (s1, s2, s3)
    for s in ss:
        if not A.is_skew(s):
            raise ArithmeticError("triple is outside T': nonskew residue")
    neg = F.from_int(-1)
    D = None
    for k in range(3):
        Lk = A.left_mult(ss[(k + 1) % 3])
        Rk = A.right_mult(ss[(k + 2) % 3])
        cand = op_add(F, op_add(F, T.ops[k], Lk, neg), Rk)
        if D is None:
            D = cand
        elif not op_eq(F, D, cand):
            raise ArithmeticError("triple is outside T': slot mismatch")
    solver = _derivation_solver(A)
    if solver.solve(op_flatten(D, DIM)) is None:
        raise ArithmeticError("triple is outside T': D not a derivation")
    return D, s1, s2, s3


def _derivation_solver(A):
    if "der_solver" not in A._cache:
        rows = [op_flatten(D, DIM) for D in derivation_space(A)]
        A._cache["der_solver"] = IntRowSolver(A.F, rows, ENDO)
    return A._cache["der_solver"]


def _triple_generators(A):
    for i in (1, 2, 3):
        for r in range(DIM):
            er = A.basis(r)
            for s in range(r + 1, DIM):
                yield make_triple(A, i, er, A.basis(s))


def span_TI(A, report=False, chunk=256):
    """A basis (56 generator triples) of T_I = span{T^i_{a,b}}.

    Certifies the span exactly: a mod-p echelon picks 56 independent
    generators (so dim >= 56 over the base field), and every generator
    is certified to lie in the exact rational span of the structural
    basis of T' (so T_I <= T', and both are 56-dimensional).  Raises
    ArithmeticError if either half fails.
    """
    key = "span_ti"
    if key in A._cache:
        basis, rep = A._cache[key]
        return (basis, rep) if report else basis
    F = A.F
    p = _SPAN_PRIME if F.kind != "prime" else F.p
    solver = _tri_prime_solver(A)
    ech = IncrementalEchelon(3 * ENDO, p)
    picked = []
    pending_triples = []
    pending_rows = []
    checked = 0

    def flush():
        nonlocal checked
        if not pending_rows:
            return
        member = solver.batch_member(pending_rows)
        if not all(member):
            bad = member.index(False)
            raise ArithmeticError(
                "generator %d is outside T'" % (checked + bad)
            )
        checked += len(pending_rows)
        if ech.rank < 56:
            dense = sparse_rows_modp(pending_rows, 3 * ENDO, p, F)
            for pos in ech.add_rows(dense):
                if len(picked) < 56:
                    picked.append(pending_triples[pos])
        pending_triples.clear()
        pending_rows.clear()

    for T in _triple_generators(A):
        pending_triples.append(T)
        pending_rows.append(T.flatten())
        if len(pending_rows) >= chunk:
            flush()
    flush()
    if ech.rank != 56:
        raise ArithmeticError("T_I has rank %d, expected 56" % ech.rank)
    rep = {
        "dim": 56,
        "generators_checked": checked,
        "prime": p,
        "equals_tri_prime": True,
    }
    A._cache[key] = (picked, rep)
    return (picked, rep) if report else picked


def check_triality(basis):
    """Report for the three slot projections of a 56-dim triple basis:
    each must have rank 56 (injectivity) and the three trace forms
    tr(T_i S_i) must agree entrywise."""
    A = basis[0].A
    F = A.F
    p = _SPAN_PRIME if F.kind != "prime" else F.p
    ranks = []
    for k in range(3):
        rows = [op_flatten(t.ops[k], DIM) for t in basis]
        ech = IncrementalEchelon(ENDO, p)
        ech.add_rows(sparse_rows_modp(rows, ENDO, p, F))
        ranks.append(ech.rank)
    n = len(basis)
    grams = []
    for k in range(3):
        ops = [t.ops[k] for t in basis]
        mat = [[F.zero()] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1):
                v = op_trace_product(F, ops[i], ops[j])
                mat[i][j] = v
                mat[j][i] = v
        grams.append(mat)
    forms_equal = all(
        F.eq(grams[0][i][j], grams[k][i][j])
        for k in (1, 2)
        for i in range(n)
        for j in range(n)
    )
    return {
        "ranks": tuple(ranks),
        "injective": all(r == len(basis) for r in ranks),
        "trace_forms_equal": forms_equal,
        "tau": GramForm(F, grams[0]),
    }


def bracket_closure_check(A, basis, samples=100, seed=20240602):
    """Componentwise commutators of random basis pairs stay in span(T')."""
    rng = random.Random(seed)
    solver = _tri_prime_solver(A)
    rows = []
    for _ in range(samples):
        i = rng.randrange(len(basis))
        j = rng.randrange(len(basis))
        rows.append(basis[i].commutator(basis[j]).flatten())
        if len(rows) >= 64:
            if not all(solver.batch_member(rows)):
                return False
            rows = []
    return not rows or all(solver.batch_member(rows))
