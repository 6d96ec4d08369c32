"""Quadratic form constructions and classification.

The transfer tests evaluate the constructed Gram blocks pointwise against
direct arithmetic in the extension, which checks the fixed-basis derivation
rather than re-running it.  Hasse symbols are checked against the Hilbert
product formula.
"""

import random
from fractions import Fraction

import pytest

from e8lab.quadform import (
    UNDECIDED,
    DegenerateFormError,
    GramForm,
    QuadForm,
    _mult_transfer_blocks,
    _trace_transfer_blocks,
    classify,
    combine,
    diagonalize,
    hasse_symbol,
    isometric,
    lambda2,
    mult_transfer,
    perp,
    pfister,
    quadform_from_json,
    scale,
    split_components,
    tensor,
    trace_transfer,
)
from e8lab.scalars import GF, QQ, FieldMismatchError, laurent, quad_etale

F7 = GF(7)
E2 = quad_etale(QQ, d=2)
ES = quad_etale(QQ, split=True)


def fq(F, ints):
    return QuadForm(F, [F.from_int(k) for k in ints])


def test_diagonalize_examples():
    assert diagonalize(GramForm(QQ, [[1, 0], [0, 1]])).entries == (1, 1)
    hyp = diagonalize(GramForm(QQ, [[0, 1], [1, 0]]))
    assert classify(hyp) == classify(fq(QQ, [2, -2]))
    assert QQ.eq(hyp.disc(), Fraction(-1))
    got = diagonalize(GramForm(F7, [[1, 1], [1, 2]]))
    assert got.entries == (1, 1)


def test_diagonalize_degenerate():
    with pytest.raises(DegenerateFormError) as exc:
        diagonalize(GramForm(QQ, [[1, 1], [1, 1]]))
    assert exc.value.radical == 1
    with pytest.raises(ValueError):
        GramForm(QQ, [[0, 1], [2, 0]])


def test_lambda2():
    assert lambda2(fq(QQ, [1, 1, 1])).entries == (1, 1, 1)
    assert lambda2(fq(QQ, [2, 3])).entries == (6,)
    rng = random.Random(20240820)
    for _ in range(10):
        n = rng.randint(1, 9)
        q = fq(QQ, [rng.choice([1, -1, 2, 3]) for _ in range(n)])
        assert lambda2(q).dim == n * (n - 1) // 2
    assert lambda2(fq(QQ, [1] * 8)).dim == 28


def test_pfister():
    a, b = Fraction(2), Fraction(3)
    assert pfister(QQ, [a]).entries == (1, -2)
    assert pfister(QQ, [1]).entries == (1, -1)
    assert pfister(QQ, [a, b]).entries == (1, -2, -3, 6)
    assert pfister(QQ, [a, b, 5]).dim == 8
    with pytest.raises(ValueError):
        pfister(QQ, [0])


def test_combine():
    assert scale(-1, fq(QQ, [1, 2])).entries == (-1, -2)
    assert tensor(fq(QQ, [1, -1]), fq(QQ, [2, 3])).entries == (2, 3, -2, -3)
    q = perp(fq(QQ, [1] * 56), fq(QQ, [-1] * 192))
    assert q.dim == 248
    assert combine("scale", fq(QQ, [1, 2]), lam=Fraction(-1)).entries == (-1, -2)
    with pytest.raises(FieldMismatchError):
        perp(fq(QQ, [1]), fq(F7, [1]))


def test_trace_transfer_examples():
    q = QuadForm(ES, [(Fraction(3), Fraction(5))])
    assert trace_transfer(ES, q).entries == (3, 5)
    q1 = QuadForm(E2, [(Fraction(1), Fraction(0))])
    assert trace_transfer(E2, q1).entries == (2, 4)
    qbig = QuadForm(E2, [(Fraction(k), Fraction(1)) for k in range(1, 29)])
    assert trace_transfer(E2, qbig).dim == 56


def test_trace_transfer_pointwise():
    # evaluate the Gram blocks against tr(q(v)) computed in E directly
    rng = random.Random(20240821)
    for E in (E2, ES):
        K = E.base
        for _ in range(60):
            n = rng.randint(1, 4)
            xs = []
            while len(xs) < n:
                x = (Fraction(rng.randint(-5, 5)), Fraction(rng.randint(-5, 5)))
                if not E.is_zero(x):
                    try:
                        E.inv(x)
                    except ZeroDivisionError:
                        continue
                    xs.append(x)
            q = QuadForm(E, xs)
            coords = [(Fraction(rng.randint(-4, 4)), Fraction(rng.randint(-4, 4))) for _ in range(n)]
            val = Fraction(0)
            for (_, B), (c, cp) in zip(_trace_transfer_blocks(E, q), coords):
                val += c * c * B[0][0] + 2 * c * cp * B[0][1] + cp * cp * B[1][1]
            qv = E.zero()
            for x, (c, cp) in zip(xs, coords):
                if E.split:
                    v = E.add(E.mul(E.embed(c), (Fraction(1), Fraction(0))),
                              E.mul(E.embed(cp), (Fraction(0), Fraction(1))))
                else:
                    v = (c, cp)
                qv = E.add(qv, E.mul(x, E.mul(v, v)))
            assert K.eq(val, E.trace_raw(qv))


def test_mult_transfer_examples():
    q = QuadForm(ES, [(Fraction(1), Fraction(1)), (Fraction(-1), Fraction(1))])
    assert mult_transfer(ES, q).entries == (1, 1, -1, -1)
    lam = (Fraction(3), Fraction(1))  # 3 + sqrt(2)
    out = mult_transfer(E2, QuadForm(E2, [lam]))
    assert out.entries == (7,)
    assert mult_transfer(E2, QuadForm(E2, [(Fraction(k), Fraction(0)) for k in (1, 2, 5)])).dim == 9


def test_mult_transfer_pointwise():
    # value of the transfer at the fixed vector v(x)v equals N_{E/K}(q(v))
    rng = random.Random(20240822)
    E, K = E2, QQ
    for _ in range(80):
        n = rng.randint(1, 3)
        xs = []
        while len(xs) < n:
            x = (Fraction(rng.randint(-5, 5)), Fraction(rng.randint(-5, 5)))
            if not E.is_zero(x) and not K.is_zero(E.norm_raw(x)):
                xs.append(x)
        q = QuadForm(E, xs)
        avec = [(Fraction(rng.randint(-4, 4)), Fraction(rng.randint(-4, 4))) for _ in range(n)]
        blocks = dict(_mult_transfer_blocks(E, q))
        val = Fraction(0)
        for u in range(n):
            Nu = E.norm_raw(avec[u])
            val += Nu * Nu * blocks[("uu", u)][0][0]
            for w in range(u + 1, n):
                r, s = E.mul(E.conj(avec[u]), avec[w])
                B = blocks[("uv", u, w)]
                val += r * r * B[0][0] + 2 * r * s * B[0][1] + s * s * B[1][1]
        qv = E.zero()
        for x, a in zip(xs, avec):
            qv = E.add(qv, E.mul(x, E.mul(a, a)))
        assert K.eq(val, E.norm_raw(qv))


def test_mult_transfer_split_matches_tensor():
    rng = random.Random(20240823)
    for _ in range(50):
        n = rng.randint(1, 4)
        xs = []
        while len(xs) < n:
            x = (Fraction(rng.randint(-6, 6)), Fraction(rng.randint(-6, 6)))
            if x[0] and x[1]:
                xs.append(x)
        q = QuadForm(ES, xs)
        q1, q2 = split_components(q)
        assert mult_transfer(ES, q) == tensor(q1, q2)
        assert mult_transfer(ES, q).dim == n * n


def test_hilbert_product_formula():
    rng = random.Random(20240824)
    for _ in range(200):
        a = int(QQ.square_class(Fraction(rng.choice([k for k in range(-60, 61) if k]))))
        b = int(QQ.square_class(Fraction(rng.choice([k for k in range(-60, 61) if k]))))
        places = {2, "inf"}
        for c in (a, b):
            c = abs(c)
            if c % 2 == 0:
                c //= 2
            d = 3
            while d * d <= c:
                if c % d == 0:
                    places.add(d)
                    c //= d
                d += 2
            if c > 1:
                places.add(c)
        prod = 1
        for pl in places:
            prod *= hasse_symbol([a, b], pl)
        assert prod == 1
        # (a, -a) = 1 everywhere
        ma = int(QQ.square_class(Fraction(-a)))
        for pl in places:
            assert hasse_symbol([a, ma], pl) == 1


def test_classify_examples():
    assert isometric(fq(F7, [1, 1]), fq(F7, [2, 4])) is True
    assert isometric(fq(QQ, [1, 1]), fq(QQ, [1, -1])) is False
    assert isometric(fq(QQ, [1, 1, 1, 1]), fq(QQ, [2, 2, 2, 2])) is True
    assert isometric(fq(QQ, [1, 1, 1]), fq(QQ, [2, 2, 2])) is False


def test_classify_isometry_invariant():
    rng = random.Random(20240825)
    for F in (QQ, F7):
        for _ in range(40):
            n = rng.randint(1, 6)
            ints = [rng.choice([1, -1, 2, 3, 5, -6, 7, 10]) for _ in range(n)]
            raws = [F.from_int(k) for k in ints]
            if any(F.is_zero(x) for x in raws):
                continue
            q = QuadForm(F, raws)
            perm = list(range(n))
            rng.shuffle(perm)
            q2 = QuadForm(F, [q.entries[i] for i in perm])
            assert classify(q) == classify(q2)
            k = rng.randrange(n)
            sq = F.from_int(rng.choice([4, 9, 25]))
            scaled = list(q.entries)
            scaled[k] = F.mul(scaled[k], sq)
            assert classify(q) == classify(QuadForm(F, scaled))


def test_isometric_equivalence_relation():
    rng = random.Random(20240826)
    pool = []
    for _ in range(12):
        n = rng.randint(1, 3)
        pool.append(fq(QQ, [rng.choice([1, -1, 2, -2, 3]) for _ in range(n)]))
    for q in pool:
        assert isometric(q, q) is True
    for q1 in pool:
        for q2 in pool:
            if q1.dim != q2.dim:
                continue
            r = isometric(q1, q2)
            assert r is isometric(q2, q1)
            for q3 in pool:
                if r is True and q3.dim == q1.dim and isometric(q2, q3) is True:
                    assert isometric(q1, q3) is True


def test_isometric_undecided_fields():
    L = laurent(F7, ["t"])
    t = L.monomial(1, (1,))
    one = L.one()
    assert isometric(QuadForm(L, [one, t]), QuadForm(L, [t, one])) == UNDECIDED
    assert isometric(QuadForm(L, [one, t]), QuadForm(L, [one, t])) is True
    assert isometric(QuadForm(L, [one]), QuadForm(L, [t])) is False
    # over Q(sqrt 2) only the easy negative direction is decided
    s = E2.mul((Fraction(1), Fraction(1)), (Fraction(1), Fraction(1)))  # (1+sqrt2)^2
    assert isometric(QuadForm(E2, [E2.one(), E2.one()]), QuadForm(E2, [s, s])) == UNDECIDED
    r2 = (Fraction(0), Fraction(1))
    assert isometric(QuadForm(E2, [E2.one()]), QuadForm(E2, [r2])) is False
    # finite quadratic extension is a finite field: dim + disc decide
    F49 = quad_etale(F7, d=3)
    assert isometric(fq(F49, [1, 1]), fq(F49, [3, 3])) is True


def test_json_roundtrip():
    L = laurent(F7, ["t"])
    forms = [
        fq(QQ, [1, -2, 3]),
        fq(F7, [1, 3]),
        QuadForm(E2, [(Fraction(1), Fraction(2))]),
        QuadForm(L, [L.monomial(1, (3,)), L.one()]),
    ]
    for q in forms:
        assert quadform_from_json(q.to_json()) == q
