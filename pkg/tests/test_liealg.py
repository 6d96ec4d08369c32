"""Lie algebra container: brackets, Jacobi backends, Killing forms, so(q)."""

import random
from fractions import Fraction

import pytest

from e8lab._kernels import HAVE_SPEEDUPS, fallback
from e8lab.composition import cayley_dickson
from e8lab.liealg import (
    GRADES,
    LieAlgebra,
    ad_square_spectrum,
    center_dimension,
    export_lines,
    import_table,
    jacobi_check,
    killing_gram,
    so_algebra,
    so_matrix,
    subalgebra_closure,
    _jacobi_exact,
)
from e8lab.linear import op_apply, op_commutator, op_eq, vec_add_into, vec_eq
from e8lab.quadform import QuadForm, diagonalize, isometric, lambda2, scale
from e8lab.scalars import GF, QQ, quad_etale

F7 = GF(7)
E2 = quad_etale(QQ, d=2)

SL2 = {(0, 1): {1: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}}


def sl2(field=QQ):
    return LieAlgebra(field, 3, SL2)


def so3_graded(field=QQ):
    # [x, y] = z, [y, z] = x, [x, z] = -y with grades (1,0), (0,1), (1,1)
    table = {(0, 1): {2: 1}, (1, 2): {0: 1}, (0, 2): {1: -1}}
    return LieAlgebra(
        field, 3, table, labels=["x", "y", "z"], grading=[(1, 0), (0, 1), (1, 1)]
    )


def rand_vec(L, rng, size=3):
    out = {}
    for _ in range(size):
        out[rng.randrange(L.dim)] = L.F.rand(rng)
    return L.coerce_vec(out)


def test_bracket_table_values():
    L = sl2()
    h, e, f = {0: 1}, {1: 1}, {2: 1}
    assert L.bracket(h, e) == {1: Fraction(2)}
    assert L.bracket(h, f) == {2: Fraction(-2)}
    assert L.bracket(e, f) == {0: Fraction(1)}
    assert L.bracket(f, e) == {0: Fraction(-1)}


def test_bracket_alternating_and_bilinear():
    L = sl2()
    rng = random.Random(20240701)
    for _ in range(25):
        x = rand_vec(L, rng)
        y = rand_vec(L, rng)
        z = rand_vec(L, rng)
        assert L.bracket(x, x) == {}
        xy = L.bracket(x, y)
        yx = L.bracket(y, x)
        assert vec_eq(QQ, xy, {k: -v for k, v in yx.items()})
        lhs = L.bracket(x, vec_add_into(QQ, dict(y), z))
        rhs = vec_add_into(QQ, dict(xy), L.bracket(x, z))
        assert vec_eq(QQ, lhs, rhs)


def test_bracket_input_validation():
    L = sl2()
    with pytest.raises(ValueError):
        L.bracket([1, 0, 0, 0], {0: 1})
    with pytest.raises(ValueError):
        L.bracket({5: 1}, {0: 1})
    assert L.bracket([0, 1, 0], [0, 0, 1]) == {0: Fraction(1)}


def test_table_validation():
    with pytest.raises(ValueError):
        LieAlgebra(QQ, 3, {(1, 1): {0: 1}})
    with pytest.raises(ValueError):
        LieAlgebra(QQ, 3, {(2, 1): {0: 1}})
    with pytest.raises(ValueError):
        LieAlgebra(QQ, 3, {(0, 1): {3: 1}})
    # zero entries are dropped, empty cells too
    L = LieAlgebra(QQ, 3, {(0, 1): {2: 0}})
    assert L.table == {}


def test_grading_enforced():
    L = so3_graded()
    assert L.grading == [(1, 0), (0, 1), (1, 1)]
    # [x, y] = x would land outside the (1, 1) component
    with pytest.raises(ValueError):
        LieAlgebra(QQ, 3, {(0, 1): {0: 1}}, grading=[(1, 0), (0, 1), (1, 1)])
    with pytest.raises(ValueError):
        LieAlgebra(QQ, 3, {}, grading=[(1, 0), (0, 1)])
    with pytest.raises(ValueError):
        LieAlgebra(QQ, 3, {}, grading=[(2, 0), (0, 1), (1, 1)])
    assert [g for g, _ in L.grading_blocks()] == [(0, 1), (1, 0), (1, 1)]
    assert list(GRADES) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_jacobi_abelian_and_sl2():
    ab = LieAlgebra(QQ, 6, {})
    rep = jacobi_check(ab, mode="full")
    assert rep["ok"] and rep["checked"] == 20 and rep["witnesses"] == []
    rep = jacobi_check(sl2(), mode="full")
    assert rep["ok"] and rep["checked"] == 1
    rep = jacobi_check(sl2(F7), mode=None)
    assert rep["mode"] == "full" and rep["ok"]


def test_jacobi_default_mode_rational_is_sampled():
    L = sl2()
    rep = jacobi_check(L, count=40, seed=11)
    assert rep["mode"] == "sample" and rep["checked"] == 40 and rep["ok"]


def test_jacobi_negative_control_locates_triple():
    # corrupt [h, e] so the only triple fails
    bad = LieAlgebra(QQ, 3, {(0, 1): {2: 2}, (0, 2): {2: -2}, (1, 2): {0: 1}})
    rep = jacobi_check(bad, mode="full")
    assert not rep["ok"] and rep["witnesses"] == [(0, 1, 2)]
    rep = jacobi_check(bad, mode="sample", count=30, seed=3)
    assert not rep["ok"] and all(w == (0, 1, 2) for w in rep["witnesses"])


def test_jacobi_backends_agree_with_exact():
    # corrupt one so(q) constant over GF(7); every backend's witnesses
    # must be genuine violations under the exact evaluator
    base = so_algebra(QuadForm(F7, [1, 2, 3, 4, 5, 6, 1, 2]))
    table = {k: dict(v) for k, v in base.table.items()}
    key = sorted(table)[0]
    k0 = sorted(table[key])[0]
    table[key][k0] = (table[key][k0] + 1) % 7
    bad = LieAlgebra(F7, base.dim, table)
    flat = bad.flat_table()
    rep = jacobi_check(bad, mode="full", max_witnesses=4)
    assert not rep["ok"]
    wit_np = fallback.jacobi_full(bad.dim, *flat[:3], flat[3], max_witnesses=4)
    wit_np = [tuple(map(int, w)) for w in wit_np]
    assert wit_np
    for w in rep["witnesses"] + wit_np:
        assert _jacobi_exact(bad, [w], 1) == [w]
    wit_s = fallback.jacobi_sampled(bad.dim, *flat[:3], flat[3], rep["witnesses"])
    assert [tuple(map(int, w)) for w in wit_s] == rep["witnesses"]


def test_jacobi_exact_backend_on_etale_field():
    L = sl2(E2)
    rep = jacobi_check(L, mode="full")
    assert rep["backend"] == "exact" and rep["ok"]
    bad = LieAlgebra(
        E2, 3, {(0, 1): {2: E2.from_int(2)}, (0, 2): {2: E2.from_int(-2)}, (1, 2): {0: E2.one()}}
    )
    rep = jacobi_check(bad, mode="full")
    assert rep["backend"] == "exact" and rep["witnesses"] == [(0, 1, 2)]


def test_jacobi_overflow_guard_falls_back_to_exact():
    big = 1 << 40
    L = LieAlgebra(QQ, 3, {(0, 1): {2: big}})
    rep = jacobi_check(L, mode="full")
    assert rep["backend"] == "exact" and rep["ok"]


def test_flat_table_encodings():
    L = LieAlgebra(
        QQ, 3, {(0, 1): {2: Fraction(3, 2)}, (0, 2): {1: Fraction(-1, 3)}, (1, 2): {0: 1}}
    )
    ptr, idx, val, p, denom = L.flat_table()
    assert p == 0 and denom == 6
    assert list(val) == [9, -2, 6]
    assert list(idx) == [2, 1, 0]
    Lp = sl2(F7)
    ptr, idx, val, p, denom = Lp.flat_table()
    assert p == 7 and denom == 1 and sorted(val) == [1, 2, 5]
    assert sl2(E2).flat_table() is None


def test_killing_sl2_textbook():
    K = killing_gram(sl2())
    expect = [[8, 0, 0], [0, 0, 4], [0, 4, 0]]
    assert all(
        QQ.eq(K.mat[i][j], Fraction(expect[i][j])) for i in range(3) for j in range(3)
    )


def test_killing_abelian_zero():
    K = killing_gram(LieAlgebra(QQ, 5, {}))
    assert all(QQ.is_zero(v) for row in K.mat for v in row)


def test_killing_exact_and_int_paths_agree():
    L = so3_graded()
    K1 = killing_gram(L)
    twin = LieAlgebra(E2, 3, {k: {t: E2.from_int(v) for t, v in c.items()} for k, c in L.table.items()})
    K2 = killing_gram(twin)
    for i in range(3):
        for j in range(3):
            assert E2.eq(E2.from_int(int(K1.mat[i][j])), K2.mat[i][j])


def test_killing_grading_blocks_match_ungraded():
    Lg = so3_graded()
    Lu = LieAlgebra(QQ, 3, Lg.table)
    Kg = killing_gram(Lg)
    Ku = killing_gram(Lu)
    assert all(
        QQ.eq(Kg.mat[i][j], Ku.mat[i][j]) for i in range(3) for j in range(3)
    )


def test_killing_ad_invariance():
    L = so_algebra(QuadForm(QQ, [1, -1, 2, -3, 5]))
    K = killing_gram(L)
    rng = random.Random(20240702)
    for _ in range(12):
        x, y, z = (rand_vec(L, rng) for _ in range(3))
        lhs = K.value(L.bracket(x, y), z)
        rhs = K.value(x, L.bracket(y, z))
        assert QQ.eq(lhs, rhs)


def test_so3_killing_formula():
    q = QuadForm(QQ, [1, 1, 1])
    K = diagonalize(killing_gram(so_algebra(q)))
    assert isometric(K, scale(QQ.from_int(-2), lambda2(q)))


def test_so8_norm_killing_formula():
    n = cayley_dickson(QQ, [1, 1, 1]).norm_form()
    L = so_algebra(n)
    assert L.dim == 28
    K = diagonalize(killing_gram(L))
    assert isometric(K, scale(QQ.from_int(-12), lambda2(n)))
    assert isometric(K, scale(QQ.from_int(-3), lambda2(n)))


def test_so16_dimension_and_killing():
    q = QuadForm(QQ, [1] * 8 + [-1] * 8)
    L = so_algebra(q)
    assert L.dim == 120
    rep = jacobi_check(L, mode="full")
    assert rep["ok"]
    K = diagonalize(killing_gram(L))
    assert isometric(K, scale(QQ.from_int(4 - 2 * 16), lambda2(q)))


def test_so_matrix_antisymmetric_for_polar():
    q = QuadForm(QQ, [1, -2, 3, 5])
    rng = random.Random(20240703)

    def polar(x, y):
        acc = QQ.zero()
        for i, a in x.items():
            b = y.get(i)
            if b is not None:
                acc = QQ.add(acc, QQ.mul(QQ.mul(QQ.from_int(2), q.entries[i]), QQ.mul(a, b)))
        return acc

    for u in range(4):
        for v in range(u + 1, 4):
            M = so_matrix(q, u, v)
            for _ in range(6):
                x = {rng.randrange(4): QQ.rand(rng) for _ in range(3)}
                y = {rng.randrange(4): QQ.rand(rng) for _ in range(3)}
                assert QQ.is_zero(
                    QQ.add(polar(op_apply(QQ, M, x), y), polar(x, op_apply(QQ, M, y)))
                )


def _signed_pair(index, a, b):
    if a == b:
        return {}
    if a < b:
        return {index[(a, b)]: Fraction(1)}
    return {index[(b, a)]: Fraction(-1)}


def test_so_relations_all_generator_quadruples():
    # closed-form commutator of Clifford-style generators, doubled polar
    q = QuadForm(QQ, [1, 2, -1, 3, -2])
    L = so_algebra(q)
    m = q.dim
    pairs = [(u, v) for u in range(m) for v in range(u + 1, m)]
    index = {p: t for t, p in enumerate(pairs)}

    def b(a, c):
        return QQ.mul(QQ.from_int(2), q.entries[a]) if a == c else QQ.zero()

    for tP, (u, v) in enumerate(pairs):
        for tQ, (up, vp) in enumerate(pairs):
            got = L.bracket({tP: 1}, {tQ: 1})
            want = {}
            for coeff, pair_vec in (
                (QQ.mul(QQ.from_int(-2), b(u, up)), _signed_pair(index, v, vp)),
                (QQ.mul(QQ.from_int(2), b(u, vp)), _signed_pair(index, v, up)),
                (QQ.mul(QQ.from_int(2), b(v, up)), _signed_pair(index, u, vp)),
                (QQ.mul(QQ.from_int(-2), b(v, vp)), _signed_pair(index, u, up)),
            ):
                vec_add_into(QQ, want, pair_vec, coeff)
            assert vec_eq(QQ, got, want), (u, v, up, vp)


def test_so_construction_matches_matrix_model():
    q = QuadForm(QQ, [1, -1, 2, -3])
    L = so_algebra(q)
    pairs = [(u, v) for u in range(4) for v in range(u + 1, 4)]
    for tP, P in enumerate(pairs):
        for tQ, Q in enumerate(pairs):
            C = op_commutator(QQ, so_matrix(q, *P), so_matrix(q, *Q))
            got = [dict() for _ in range(4)]
            for t, c in L.bracket({tP: 1}, {tQ: 1}).items():
                mat = so_matrix(q, *pairs[t])
                for j, col in enumerate(mat):
                    if col:
                        vec_add_into(QQ, got[j], col, c)
            assert op_eq(QQ, C, got), (P, Q)


def test_subalgebra_closure():
    L = sl2()
    dim, basis, closed = subalgebra_closure(L, [{0: 1}, {1: 1}, {2: 1}])
    assert (dim, closed) == (3, True) and len(basis) == 3
    dim, _, closed = subalgebra_closure(L, [{1: 1}])
    assert (dim, closed) == (1, True)
    dim, _, closed = subalgebra_closure(L, [{1: 1}, {2: 1}])
    assert (dim, closed) == (3, False)
    so4 = so_algebra(QuadForm(QQ, [1, 1, 1, 1]))
    dim, _, closed = subalgebra_closure(so4, [{0: 1}, {3: 1}, {5: 1}])
    assert (dim, closed) == (6, False)


def test_center_dimensions():
    assert center_dimension(sl2()) == 0
    assert center_dimension(LieAlgebra(QQ, 4, {})) == 4
    heis = LieAlgebra(QQ, 3, {(0, 1): {2: 1}})
    assert center_dimension(heis) == 1
    assert center_dimension(so_algebra(QuadForm(F7, [1, 2, 3, 4, 5]))) == 0


def test_ad_square_spectrum_sl2():
    reports = ad_square_spectrum(sl2(), {0: 1}, eigenvalues=(4, 1))
    assert len(reports) == 1
    rep = reports[0]
    assert rep["dim"] == 3 and rep["kernel"] == 1
    assert rep["eigen"][0][1] == 2 and rep["eigen"][1][1] == 0


def test_ad_square_spectrum_graded_blocks():
    L = so3_graded()
    reports = ad_square_spectrum(L, {0: 1}, eigenvalues=(QQ.from_int(-1),))
    by_label = {r["label"]: r for r in reports}
    assert by_label[(1, 0)]["kernel"] == 1
    assert by_label[(0, 1)]["eigen"][0][1] == 1
    assert by_label[(1, 1)]["eigen"][0][1] == 1


def test_ad_square_spectrum_abelian_all_kernel():
    L = LieAlgebra(QQ, 4, {})
    rep = ad_square_spectrum(L, {0: 1, 2: 3})[0]
    assert rep["kernel"] == 4 and rep["dim"] == 4


def test_ad_square_spectrum_block_leak_rejected():
    with pytest.raises(ArithmeticError):
        ad_square_spectrum(sl2(), {1: 1}, blocks=[[0, 1], [2]])


def test_export_import_roundtrip():
    L = LieAlgebra(
        QQ,
        3,
        {(0, 1): {2: Fraction(3, 2)}, (0, 2): {1: Fraction(-1, 3)}, (1, 2): {0: 1}},
    )
    lines = export_lines(L)
    assert lines == ['0 1 2 "3/2"', '0 2 1 "-1/3"', '1 2 0 "1"']
    L2 = import_table(QQ, 3, lines)
    assert L2.table == L.table
    assert export_lines(L2) == lines
    Lg = so3_graded()
    L3 = import_table(QQ, 3, export_lines(Lg), labels=Lg.labels, grading=Lg.grading)
    assert L3.table == Lg.table and L3.grading == Lg.grading


def test_export_prime_field_roundtrip():
    L = so_algebra(QuadForm(F7, [1, 2, 3]))
    L2 = import_table(F7, L.dim, export_lines(L))
    assert L2.table == L.table
    assert jacobi_check(L2, mode="full")["ok"]


@pytest.mark.skipif(not HAVE_SPEEDUPS, reason="compiled kernels absent")
def test_compiled_backend_selected():
    assert jacobi_check(sl2(F7), mode="full")["backend"] == "cython"
