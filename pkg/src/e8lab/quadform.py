"""Diagonal quadratic forms and their standard constructions.

A QuadForm is an ordered diagonal form <x_1,...,x_n> over one field, all
entries invertible.  GramForm holds a symmetric matrix before reduction.
Operations: orthogonal sum, tensor, scaling, lambda^2, Pfister forms, the
Scharlau trace transfer and the multiplicative norm transfer along a
quadratic etale extension, and classification by complete invariants where
the field supports them (discriminant over finite fields; discriminant,
signature and Hasse symbols over Q).  Bilinear convention: the Gram matrix
of <x_1,...,x_n> is diag(x_1,...,x_n), so q(v) = b(v,v).
"""

from __future__ import annotations

import math

from .linear import gram_diagonalize
from .scalars import FieldMismatchError

UNDECIDED = "undecided"


class DegenerateFormError(ValueError):
    """Raised when a Gram matrix has a nonzero radical."""

    def __init__(self, radical):
        super().__init__(f"degenerate form: radical dimension {radical}")
        self.radical = radical


def _check_unit(F, x):
    if F.is_zero(x):
        raise ValueError("form entries must be nonzero")
    try:
        F.inv(x)
    except ZeroDivisionError:
        raise ValueError("form entry is a zero divisor") from None
    return x


class QuadForm:
    """Diagonal quadratic form; entries are raw field values, all units."""

    __slots__ = ("F", "entries")

    def __init__(self, field, entries):
        self.F = field
        self.entries = tuple(_check_unit(field, field.coerce(x)) for x in entries)

    @property
    def dim(self):
        return len(self.entries)

    def det(self):
        acc = self.F.one()
        for x in self.entries:
            acc = self.F.mul(acc, x)
        return acc

    def disc(self):
        return self.F.square_class(self.det())

    def gram(self):
        F, n = self.F, self.dim
        return [
            [self.entries[i] if i == j else F.zero() for j in range(n)] for i in range(n)
        ]

    def __repr__(self):
        return "<" + ",".join(self.F.fmt(x) for x in self.entries) + ">"

    def __eq__(self, other):
        """Literal equality (same field, same ordered entries); see isometric()."""
        if not isinstance(other, QuadForm):
            return NotImplemented
        return (
            self.F.descriptor() == other.F.descriptor()
            and self.dim == other.dim
            and all(self.F.eq(a, b) for a, b in zip(self.entries, other.entries))
        )

    def __hash__(self):
        return hash(("quadform", self.dim, self.F.kind))

    def to_json(self):
        return {
            "field": self.F.descriptor(),
            "entries": [self.F.to_json(x) for x in self.entries],
        }


def quadform_from_json(obj, field=None):
    from .scalars import field_from_json

    F = field if field is not None else field_from_json(obj["field"])
    return QuadForm(F, [F.from_json(x) for x in obj["entries"]])


class GramForm:
    """Symmetric matrix of raw field values, prior to diagonalization."""

    __slots__ = ("F", "mat")

    def __init__(self, field, mat):
        self.F = field
        n = len(mat)
        self.mat = [[field.coerce(x) for x in row] for row in mat]
        for row in self.mat:
            if len(row) != n:
                raise ValueError("Gram matrix must be square")
        for i in range(n):
            for j in range(i):
                if not field.eq(self.mat[i][j], self.mat[j][i]):
                    raise ValueError("Gram matrix must be symmetric")

    @property
    def dim(self):
        return len(self.mat)

    def value(self, u, v):
        """Bilinear value u^t G v; vectors are sparse dicts or dense lists."""
        F = self.F
        if not isinstance(u, dict):
            u = {i: x for i, x in enumerate(u)}
        if not isinstance(v, dict):
            v = {j: x for j, x in enumerate(v)}
        acc = F.zero()
        for i, a in u.items():
            row = self.mat[i]
            for j, b in v.items():
                acc = F.add(acc, F.mul(a, F.mul(row[j], b)))
        return acc


def diagonalize(g):
    """Congruence-diagonalize a GramForm (char != 2).

    Raises DegenerateFormError (carrying the radical dimension) when the
    matrix is singular.
    """
    diag, _, radical = gram_diagonalize(g.F, g.mat)
    if radical:
        raise DegenerateFormError(radical)
    return QuadForm(g.F, diag)


def perp(q1, q2):
    _same_field(q1, q2)
    return QuadForm(q1.F, q1.entries + q2.entries)


def tensor(q1, q2):
    _same_field(q1, q2)
    F = q1.F
    return QuadForm(F, [F.mul(a, b) for a in q1.entries for b in q2.entries])


def scale(lam, q):
    F = q.F
    lam = F.coerce(lam)
    return QuadForm(F, [F.mul(lam, x) for x in q.entries])


def combine(op, q1, q2=None, lam=None):
    if op == "perp":
        return perp(q1, q2)
    if op == "tensor":
        return tensor(q1, q2)
    if op == "scale":
        return scale(lam, q1)
    raise ValueError(f"unknown combine op {op!r}")


def _same_field(q1, q2):
    if q1.F.descriptor() != q2.F.descriptor():
        raise FieldMismatchError("forms live over different fields")


def lambda2(q):
    """<x_i x_j> for i < j in lexicographic order; dim n(n-1)/2."""
    F, xs = q.F, q.entries
    out = []
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            out.append(F.mul(xs[i], xs[j]))
    return QuadForm(F, out)


def pfister(field, slots):
    """<<a_1,...,a_m>>: iterated <1,-a_i> tensor, dim 2^m.

    Built slot by slot as q -> q perp (-a)q, so <<a,b>> = <1,-a,-b,ab>.
    """
    q = QuadForm(field, [field.one()])
    for a in slots:
        a = field.coerce(a)
        if field.is_zero(a):
            raise ValueError("Pfister slots must be nonzero")
        q = perp(q, scale(field.neg(a), q))
    return q


def trace_transfer(E, q):
    """Scharlau transfer tr_{E/K} of a form over a quadratic etale E.

    Composes the bilinear form with the trace on the K-basis {1, sqrt d}
    of each E-line (idempotent basis in the split case gives q1 perp q2).
    Output dimension 2 dim(q).
    """
    _check_etale(E, q)
    return _diag_blocks(E.base, [b for _, b in _trace_transfer_blocks(E, q)])


def _trace_transfer_blocks(E, q):
    """Labeled Gram blocks of tr_{E/K}(q): label ("i", i) for the block on
    the K-basis {e_i, sqrt(d) e_i} (idempotent basis when split)."""
    K = E.base
    blocks = []
    for i, x in enumerate(q.entries):
        if E.split:
            blocks.append((("i", i), [[x[0], K.zero()], [K.zero(), x[1]]]))
        else:
            a, b = x
            two = K.from_int(2)
            blocks.append(
                (
                    ("i", i),
                    [
                        [K.mul(two, a), K.mul(two, K.mul(b, E.d))],
                        [K.mul(two, K.mul(b, E.d)), K.mul(two, K.mul(a, E.d))],
                    ],
                )
            )
    return blocks


def mult_transfer(E, q):
    """Multiplicative (norm) transfer N_{E/K} of a form over etale E.

    Split case: q1 tensor q2.  Field case E = K(sqrt d): the switch
    x (x) y -> y (x) x on iota(V) (x)_E V is K-semilinear with fixed space
    of K-dimension n^2, spanned by t_uu, t_uv + t_vu and s_uv - s_vu
    (t_uv = e_u (x) e_v, s_uv = e_u (x) sqrt(d) e_v, u < v); the restricted
    form is K-valued with Gram blocks [N(x_u)] and, for u < v with
    z = conj(x_u) x_v, [[tr z, 2d im z], [2d im z, d tr z]].
    Output dimension dim(q)^2.
    """
    _check_etale(E, q)
    K = E.base
    if E.split:
        q1, q2 = split_components(q)
        return tensor(q1, q2)
    return _diag_blocks(K, [b for _, b in _mult_transfer_blocks(E, q)])


def mult_transfer_gram(E, q):
    """N_{E/K}(q) as an undiagonalized GramForm on the switch-fixed basis.

    Basis order: the 8 lines t_uu, then for each u < v (lexicographic) the
    pair (t_uv + t_vu, s_uv - s_vu).  Field case only; the split case has
    no distinguished fixed basis (use mult_transfer).
    """
    _check_etale(E, q)
    if E.split:
        raise FieldMismatchError("fixed-basis Gram needs a field extension")
    K = E.base
    blocks = _mult_transfer_blocks(E, q)
    n = len(q.entries)
    dim = n * n
    zero = K.zero()
    mat = [[zero] * dim for _ in range(dim)]
    pos = {}
    at = n
    for u in range(n):
        pos["uu", u] = u
    for u in range(n):
        for v in range(u + 1, n):
            pos["uv", u, v] = at
            at += 2
    for label, B in blocks:
        base = pos[label]
        for i, row in enumerate(B):
            for j, x in enumerate(row):
                mat[base + i][base + j] = x
    return GramForm(K, mat)


def _mult_transfer_blocks(E, q):
    """Labeled Gram blocks of N_{E/K}(q) on the switch-fixed basis:
    ("uu", u) for the line through t_uu, ("uv", u, v) for the plane
    spanned by t_uv + t_vu and s_uv - s_vu."""
    K = E.base
    xs = q.entries
    blocks = [(("uu", u), [[E.norm_raw(x)]]) for u, x in enumerate(xs)]
    for u in range(len(xs)):
        for v in range(u + 1, len(xs)):
            zr, zi = E.mul(E.conj(xs[u]), xs[v])
            trz = K.add(zr, zr)
            cross = K.mul(K.from_int(2), K.mul(E.d, zi))
            blocks.append(
                (("uv", u, v), [[trz, cross], [cross, K.mul(E.d, trz)]])
            )
    return blocks


def _check_etale(E, q):
    if E.kind != "quad_etale":
        raise FieldMismatchError("transfer needs a quadratic etale extension")
    if q.F.descriptor() != E.descriptor():
        raise FieldMismatchError("form is not over the given extension")


def _diag_blocks(K, blocks):
    out = []
    for B in blocks:
        diag, _, radical = gram_diagonalize(K, B)
        if radical:
            raise DegenerateFormError(radical)
        out.extend(diag)
    return QuadForm(K, out)


# ---------------------------------------------------------------------------
# classification


def _sqfree_class(x):
    """Square class of a nonzero Fraction as a signed squarefree int."""
    from .scalars import QQ

    return int(QQ.square_class(x))


def _class_mul(a, b):
    """Product of signed squarefree ints, reduced to squarefree."""
    g = math.gcd(abs(a), abs(b))
    return (a // g) * (b // g)


def _hilbert_data_odd(c, p):
    """(valuation mod 2, legendre flag) of a squarefree int at odd p."""
    alpha = 1 if c % p == 0 else 0
    u = c // p if alpha else c
    leg = pow(u % p, (p - 1) // 2, p)
    return alpha, 0 if leg == 1 else 1


def hasse_symbol(entries, place):
    """Product of Hilbert symbols (x_i, x_j)_place over i < j.

    entries: squarefree-int square classes; place: odd prime, 2, or "inf".
    Uses the closed-form pair count in each case.
    """
    n = len(entries)
    if place == "inf":
        m = sum(1 for c in entries if c < 0)
        exp = m * (m - 1) // 2
    elif place == 2:
        # (a,b)_2 = (-1)^(eps(u)eps(v) + alpha.omega(v) + beta.omega(u))
        eps, alp, omg = [], [], []
        for c in entries:
            a = 1 if c % 2 == 0 else 0
            u = c // 2 if a else c
            alp.append(a)
            eps.append(((u - 1) // 2) % 2)
            omg.append(((u * u - 1) // 8) % 2)
        E, A, W = sum(eps), sum(alp), sum(omg)
        exp = E * (E - 1) // 2 + A * W - sum(a * w for a, w in zip(alp, omg))
        # cross terms eps_i eps_j for i<j equal (E^2 - sum eps^2)/2 = E(E-1)/2
    else:
        epsp = ((place - 1) // 2) % 2
        alp, leg = [], []
        for c in entries:
            a, l = _hilbert_data_odd(c, place)
            alp.append(a)
            leg.append(l)
        A, L = sum(alp), sum(leg)
        exp = epsp * (A * (A - 1) // 2) + A * L - sum(a * l for a, l in zip(alp, leg))
    return -1 if exp % 2 else 1


def _rational_invariants(q):
    classes = [_sqfree_class(x) for x in q.entries]
    disc = 1
    for c in classes:
        disc = _class_mul(disc, c)
    pos = sum(1 for c in classes if c > 0)
    primes = set()
    for c in classes:
        c = abs(c)
        d = 2
        while d * d <= c:
            if c % d == 0:
                primes.add(d)
                c //= d
            else:
                d += 1
        if c > 1:
            primes.add(c)
    places = [2, "inf"] + sorted(p for p in primes if p != 2)
    hasse = frozenset(pl for pl in places if hasse_symbol(classes, pl) == -1)
    return disc, (pos, len(classes) - pos), hasse


class InvariantKey(tuple):
    """(kind, dim, disc token, extra); equal keys of a complete kind
    are isometric forms.  The complete flag is the last component."""

    __slots__ = ()

    @property
    def complete(self):
        return self[-1]


def _disc_token(F, disc):
    if F.kind == "rational":
        return int(disc)
    if F.kind == "prime":
        return int(disc)
    if F.kind == "quad_etale" and F.split:
        return (_disc_token(F.base, disc[0]), _disc_token(F.base, disc[1]))
    if F.kind == "quad_etale":
        return bool(F.is_square(disc))
    if F.kind == "laurent":
        unit, exps = disc
        return (_disc_token(F.base, unit), tuple(exps))
    return F.fmt(disc)


def classify(q):
    """Complete invariants where available, else (dim, disc) tagged incomplete.

    Q: (dim, disc, signature, Hasse places) -- complete by Hasse-Minkowski.
    F_p and finite quadratic extensions of F_p: (dim, disc) -- complete.
    Split etale: componentwise keys, complete iff both components are.
    Laurent and other fields: (dim, disc), incomplete here (the Springer
    decision in the invariants module refines laurent fields).
    """
    F = q.F
    if F.kind == "rational":
        disc, sig, hasse = _rational_invariants(q)
        return InvariantKey(("rational", q.dim, disc, sig, tuple(sorted(hasse, key=str)), True))
    if F.kind == "prime":
        return InvariantKey(("prime", q.dim, _disc_token(F, q.disc()), True))
    if F.kind == "quad_etale" and F.split:
        k1, k2 = (classify(c) for c in split_components(q))
        return InvariantKey(("split", k1, k2, k1.complete and k2.complete))
    if F.kind == "quad_etale" and F.base.kind == "prime":
        return InvariantKey(("finite_ext", q.dim, _disc_token(F, q.disc()), True))
    return InvariantKey((F.kind, q.dim, _disc_token(F, q.disc()), False))


def split_components(q):
    """The pair of base-field forms of a form over a split etale algebra."""
    F = q.F
    if F.kind != "quad_etale" or not F.split:
        raise FieldMismatchError("not a split etale form")
    K = F.base
    return QuadForm(K, [x[0] for x in q.entries]), QuadForm(K, [x[1] for x in q.entries])


def isometric(q1, q2):
    """True / False / UNDECIDED.

    Decisions are exact: False needs only one differing invariant; True
    needs a complete invariant set for the field.
    """
    _same_field(q1, q2)
    F = q1.F
    if q1.dim != q2.dim:
        return False
    if q1 == q2:
        return True
    if F.kind == "quad_etale" and F.split:
        a1, b1 = split_components(q1)
        a2, b2 = split_components(q2)
        ra, rb = isometric(a1, a2), isometric(b1, b2)
        if ra is False or rb is False:
            return False
        if ra is True and rb is True:
            return True
        return UNDECIDED
    if not F.same_square_class(q1.det(), q2.det()):
        return False
    if F.kind == "rational":
        return classify(q1) == classify(q2)
    if F.kind == "prime":
        return True
    if F.kind == "quad_etale" and F.base.kind == "prime":
        return True
    return UNDECIDED
