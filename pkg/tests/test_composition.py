"""Cayley-Dickson composition algebras: laws, operators, derivations."""

import random
from fractions import Fraction

import pytest

from e8lab.composition import cayley_dickson, composition_from_json, derivation_basis
from e8lab.linear import (
    op_add,
    op_apply,
    op_compose,
    op_eq,
    op_identity,
    op_scale,
    vec_add_into,
    vec_eq,
    vec_scale,
)
from e8lab.quadform import classify, pfister
from e8lab.scalars import GF, QQ, quad_etale

F7 = GF(7)
E2 = quad_etale(QQ, d=2)

ALGEBRAS = {
    "split-QQ": cayley_dickson(QQ, [1, 1, 1]),
    "compact-QQ": cayley_dickson(QQ, [-1, -1, -1]),
    "mixed-QQ": cayley_dickson(QQ, [2, 3, 5]),
    "split-F7": cayley_dickson(F7, [1, 1, 1]),
    "mixed-F7": cayley_dickson(F7, [3, 5, 6]),
    "etale-E2": cayley_dickson(
        E2, [(Fraction(0), Fraction(1)), E2.from_int(-1), E2.from_int(-1)]
    ),
}


def rand_elt(C, rng, sparse=False):
    out = {}
    for k in range(C.dim):
        if sparse and rng.random() < 0.5:
            continue
        v = C.F.rand(rng)
        if not C.F.is_zero(v):
            out[k] = v
    return out


@pytest.fixture(params=sorted(ALGEBRAS), ids=sorted(ALGEBRAS))
def algebra(request):
    return ALGEBRAS[request.param]


def test_unit_and_dim(algebra):
    C, F = algebra, algebra.F
    assert C.dim == 8
    rng = random.Random(20240830)
    for _ in range(10):
        x = rand_elt(C, rng)
        assert vec_eq(F, C.mul(C.one(), x), x)
        assert vec_eq(F, C.mul(x, C.one()), x)
    assert F.eq(C.norm(C.one()), F.one())
    assert F.eq(C.polar(C.one(), C.one()), F.from_int(2))
    for k in range(1, 8):
        assert F.is_zero(C.trace(C.basis(k)))


def test_norm_form_convention():
    split = ALGEBRAS["split-QQ"]
    assert split.norm_entries == (1, -1, -1, 1, -1, 1, 1, -1)
    compact = ALGEBRAS["compact-QQ"]
    assert compact.norm_entries == (1,) * 8
    # split algebra has an explicit zero divisor
    x = {0: Fraction(1), 1: Fraction(1)}
    assert QQ.is_zero(split.norm(x)) and x
    for C in ALGEBRAS.values():
        assert C.norm_form() == pfister(C.F, C.params)


def test_composition_law(algebra):
    C, F = algebra, algebra.F
    rng = random.Random(20240831)
    for _ in range(200):
        x, y = rand_elt(C, rng, sparse=True), rand_elt(C, rng, sparse=True)
        assert F.eq(C.norm(C.mul(x, y)), F.mul(C.norm(x), C.norm(y)))


def test_conjugation_identities(algebra):
    C, F = algebra, algebra.F
    rng = random.Random(20240901)
    for _ in range(50):
        x = rand_elt(C, rng)
        y = rand_elt(C, rng)
        # x + xbar = tr(x) 1 and x xbar = n(x) 1
        s = dict(x)
        vec_add_into(F, s, C.conj(x))
        assert vec_eq(F, s, vec_scale(F, C.trace(x), C.one()))
        assert vec_eq(F, C.mul(x, C.conj(x)), vec_scale(F, C.norm(x), C.one()))
        # conj is an antiautomorphism
        assert vec_eq(F, C.conj(C.mul(x, y)), C.mul(C.conj(y), C.conj(x)))


def test_alternative_and_moufang(algebra):
    C, F = algebra, algebra.F
    rng = random.Random(20240902)

    def assoc(a, b, c):
        out = C.mul(C.mul(a, b), c)
        vec_add_into(F, out, C.mul(a, C.mul(b, c)), F.from_int(-1))
        return out

    for _ in range(100):
        x, y, z = (rand_elt(C, rng, sparse=True) for _ in range(3))
        assert not assoc(x, x, y)
        assert not assoc(y, x, x)
        lhs = C.mul(C.mul(C.mul(x, y), x), z)
        rhs = C.mul(x, C.mul(y, C.mul(x, z)))
        assert vec_eq(F, lhs, rhs)


def test_mult_operators(algebra):
    C, F = algebra, algebra.F
    rng = random.Random(20240903)
    assert op_eq(F, C.left_mult(C.one()), op_identity(F, 8))
    for _ in range(30):
        x, xp = rand_elt(C, rng), rand_elt(C, rng)
        L, Lb = C.left_mult(x), C.left_mult(C.conj(x))
        nx = op_scale(F, C.norm(x), op_identity(F, 8))
        assert op_eq(F, op_compose(F, L, Lb), nx)
        # L_x L_{x'bar} + L_{x'} L_{xbar} = n(x, x') id
        Lp, Lpb = C.left_mult(xp), C.left_mult(C.conj(xp))
        s = op_add(F, op_compose(F, L, Lpb), op_compose(F, Lp, Lb))
        assert op_eq(F, s, op_scale(F, C.polar(x, xp), op_identity(F, 8)))
        R, Rb = C.right_mult(x), C.right_mult(C.conj(x))
        assert op_eq(F, op_compose(F, R, Rb), nx)
        # operators agree with multiplication
        y = rand_elt(C, rng)
        assert vec_eq(F, op_apply(F, L, y), C.mul(x, y))
        assert vec_eq(F, op_apply(F, R, y), C.mul(y, x))


def test_trace_form_is_twice_norm(algebra):
    C, F = algebra, algebra.F
    for i in range(8):
        for j in range(8):
            v = C.polar(C.basis(i), C.basis(j))
            if i == j:
                assert F.eq(v, F.add(C.norm_entries[i], C.norm_entries[i]))
            else:
                assert F.is_zero(v)


def test_derivation_basis(algebra):
    C, F = algebra, algebra.F
    ders = derivation_basis(C)
    assert len(ders) == 14
    rng = random.Random(20240904)
    for D in ders[:5] + ders[-2:]:
        assert not op_apply(F, D, C.one())
        for _ in range(10):
            x, y = rand_elt(C, rng, sparse=True), rand_elt(C, rng, sparse=True)
            lhs = op_apply(F, D, C.mul(x, y))
            rhs = C.mul(op_apply(F, D, x), y)
            vec_add_into(F, rhs, C.mul(x, op_apply(F, D, y)))
            assert vec_eq(F, lhs, rhs)
            # derivations are skew for the polar norm form
            s = F.add(C.polar(op_apply(F, D, x), y), C.polar(x, op_apply(F, D, y)))
            assert F.is_zero(s)


def test_iota_conjugates_structure():
    C = ALGEBRAS["etale-E2"]
    Ci = C.iota()
    for i in range(8):
        for j in range(8):
            assert E2.eq(Ci.coef[i][j], E2.conj(C.coef[i][j]))
    with pytest.raises(ValueError):
        ALGEBRAS["split-QQ"].iota()


def test_zero_param_rejected():
    with pytest.raises(ValueError):
        cayley_dickson(QQ, [1, 0, 1])
    ES = quad_etale(QQ, split=True)
    with pytest.raises(ValueError):
        cayley_dickson(ES, [(Fraction(1), Fraction(0)), ES.one(), ES.one()])


def test_json_roundtrip(algebra):
    C = algebra
    C2 = composition_from_json(C.descriptor())
    assert C2.dim == C.dim
    for i in range(8):
        for j in range(8):
            assert C.F.eq(C2.coef[i][j], C.coef[i][j])
