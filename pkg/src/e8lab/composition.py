"""Composition algebras by iterated Cayley-Dickson doubling.

Doubling rule: (x, y)(u, v) = (xu + g vbar y, vx + y ubar) with parameter g,
conjugation (x, y)bar = (xbar, -y), norm n((x, y)) = n(x) - g n(y).  The
basis is ordered by doubling level, so e_k e_l = c e_{k xor l} with a single
structure constant c, and the norm is diagonal with entries in the same
order as pfister(params): <1,-a> (x) <1,-b> (x) <1,-c>.

The scalar field may be a quadratic etale ring, giving octonion algebras
over E; iota() applies the nontrivial automorphism to every structure
constant (the conjugated copy of C).
"""

from __future__ import annotations

from .linear import Echelon, op_add, op_commutator, op_flatten
from .quadform import QuadForm, pfister


class CompositionAlgebra:
    """2^m-dimensional algebra with unit e_0, conjugation, diagonal norm."""

    __slots__ = ("F", "params", "dim", "coef", "norm_entries")

    def __init__(self, field, params):
        self.F = field
        self.params = tuple(field.coerce(g) for g in params)
        for g in self.params:
            if field.is_zero(g):
                raise ValueError("doubling parameters must be nonzero")
            try:
                field.inv(g)
            except ZeroDivisionError:
                raise ValueError("doubling parameter is a zero divisor") from None
        # structure constants: e_i e_j = coef[i][j] * e_{i xor j}
        coef = [[field.one()]]
        for g in self.params:
            h = len(coef)
            new = [[None] * (2 * h) for _ in range(2 * h)]
            for i in range(h):
                for j in range(h):
                    # (x,0)(u,0) = (xu, 0)
                    new[i][j] = coef[i][j]
                    # (x,0)(0,v): v x -> table order (e_j+h by e_i)
                    new[i][j + h] = coef[j][i]
                    # (0,y)(u,0): y ubar
                    new[i + h][j] = coef[i][j] if j == 0 else field.neg(coef[i][j])
                    # (0,y)(0,v): g vbar y
                    gv = field.mul(g, coef[j][i]) if j == 0 else field.neg(
                        field.mul(g, coef[j][i])
                    )
                    new[i + h][j + h] = gv
            coef = new
        self.coef = coef
        self.dim = len(coef)
        self.norm_entries = pfister(field, self.params).entries

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
            row = self.coef[i]
            for j, b in y.items():
                k = i ^ j
                w = F.mul(row[j], F.mul(a, b))
                if k in acc:
                    s = F.add(acc[k], w)
                    if F.is_zero(s):
                        del acc[k]
                    else:
                        acc[k] = s
                elif not F.is_zero(w):
                    acc[k] = w
        return acc

    def conj(self, x):
        F = self.F
        return {k: (v if k == 0 else F.neg(v)) for k, v in x.items()}

    def trace(self, x):
        v = x.get(0)
        return self.F.zero() if v is None else self.F.add(v, v)

    def norm(self, x):
        F = self.F
        acc = F.zero()
        for k, v in x.items():
            acc = F.add(acc, F.mul(self.norm_entries[k], F.mul(v, v)))
        return acc

    def polar(self, x, y):
        F = self.F
        acc = F.zero()
        for k, v in x.items():
            w = y.get(k)
            if w is not None:
                c = F.mul(self.norm_entries[k], F.mul(v, w))
                acc = F.add(acc, F.add(c, c))
        return acc

    # -- operators ----------------------------------------------------------

    def left_mult(self, x):
        return [self.mul(x, self.basis(j)) for j in range(self.dim)]

    def right_mult(self, x):
        return [self.mul(self.basis(j), x) for j in range(self.dim)]

    def norm_form(self):
        return QuadForm(self.F, self.norm_entries)

    def iota(self):
        """The conjugated copy over an etale ring: iota applied to params."""
        if self.F.kind != "quad_etale":
            raise ValueError("iota needs an etale scalar ring")
        return CompositionAlgebra(self.F, [self.F.conj(g) for g in self.params])

    def descriptor(self):
        return {
            "field": self.F.descriptor(),
            "params": [self.F.to_json(g) for g in self.params],
        }

    def __repr__(self):
        ps = ",".join(self.F.fmt(g) for g in self.params)
        return f"CayleyDickson({ps}; dim {self.dim})"


def cayley_dickson(field, params):
    return CompositionAlgebra(field, params)


def composition_from_json(obj, field=None):
    from .scalars import field_from_json

    F = field if field is not None else field_from_json(obj["field"])
    return CompositionAlgebra(F, [F.from_json(g) for g in obj["params"]])


def derivation_basis(C):
    """A basis of Der(C) from the standard inner derivations.

    D_{x,y} = [L_x, L_y] + [L_x, R_y] + [R_x, R_y] is a derivation of any
    alternative algebra; over the pure basis pairs these span the full
    14-dimensional derivation algebra of an octonion algebra.  Returned
    as column-sparse operators, linearly independent.
    """
    F = C.F
    basis = []
    e = Echelon(F)
    for i in range(1, C.dim):
        Li, Ri = C.left_mult(C.basis(i)), C.right_mult(C.basis(i))
        for j in range(i + 1, C.dim):
            Lj, Rj = C.left_mult(C.basis(j)), C.right_mult(C.basis(j))
            D = op_commutator(F, Li, Lj)
            D = op_add(F, D, op_commutator(F, Li, Rj))
            D = op_add(F, D, op_commutator(F, Ri, Rj))
            if e.add(op_flatten(D, C.dim)) is not None:
                basis.append(D)
    return basis
