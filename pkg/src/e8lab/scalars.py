"""Exact arithmetic for the field tower used by every other module.

Supported fields, with the raw value representation used internally:

* rationals               -- fractions.Fraction
* prime fields F_p        -- int in [0, p); p prime, p not in {2, 3}
* quadratic etale E/K     -- pair (x, y) of base raws; x + y*sqrt(d) in the
                             field case K(sqrt d), componentwise in the split
                             case K x K (a ring with zero divisors)
* iterated Laurent series -- None for zero, else (unit, exps) with unit a
  K((t1))...((tm))           nonzero base raw and exps a tuple of integer
                             exponents; only monomials u*t1^e1*...*tm^em

Laurent elements are restricted to monomials: diagonal-form entries are
monomial square-class representatives, and the restriction keeps square
classes and residue-form splitting finite and exact.  Adding monomials with
different exponent vectors raises LaurentAddError instead of approximating.

Field objects double as descriptors: they are immutable, hashable, compare
by construction data, and round-trip through JSON via descriptor() /
field_from_json().  Scalar is a thin wrapper (field, raw value) providing
operator syntax and the JSON element encoding; hot loops elsewhere operate
on raw values through the field's methods directly.
"""

from __future__ import annotations

import math
from fractions import Fraction

from sympy import factorint, isprime


class FieldError(Exception):
    pass


class FieldMismatchError(FieldError):
    pass


class LaurentAddError(FieldError):
    """Sum of monomials with different exponent vectors is not a monomial."""


def _as_field_op(other):
    return other if isinstance(other, Scalar) else None


class Field:
    """Abstract base: exact operations on raw values plus descriptor data."""

    kind = None
    char = 0

    # -- raw operations (subclasses override) --

    def zero(self):
        raise NotImplementedError

    def one(self):
        return self.from_int(1)

    def from_int(self, n):
        raise NotImplementedError

    def coerce(self, x):
        """Accept ints, Scalars over this field, or raw values."""
        if isinstance(x, Scalar):
            if x.field != self:
                raise FieldMismatchError(f"scalar over {x.field} used in {self}")
            return x.v
        if isinstance(x, int):
            return self.from_int(x)
        return self.normalize(x)

    def normalize(self, a):
        return a

    def add(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a):
        raise NotImplementedError

    def eq(self, a, b):
        return self.is_zero(self.sub(a, b))

    # -- squares --

    def is_square(self, a):
        raise NotImplementedError

    def square_class(self, a):
        """Canonical square-class representative where one exists."""
        raise NotImplementedError

    def same_square_class(self, a, b):
        if self.is_zero(a) or self.is_zero(b):
            raise ZeroDivisionError("square class of zero")
        return self.is_square(self.mul(a, b))

    def sqrt(self, a):
        """Exact square root raw value, or None."""
        raise NotImplementedError

    def minus_one_two_squares(self):
        """(a, b) with a^2 + b^2 = -1, or None if no such pair exists."""
        return None

    # -- misc --

    def rand(self, rng, nonzero=False):
        raise NotImplementedError

    def scalar(self, x):
        return Scalar(self, self.coerce(x))

    def descriptor(self):
        raise NotImplementedError

    def to_json(self, a):
        raise NotImplementedError

    def from_json(self, obj):
        raise NotImplementedError

    def fmt(self, a):
        return str(a)

    def __eq__(self, other):
        return isinstance(other, Field) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def _key(self):
        raise NotImplementedError

    def __repr__(self):
        return self.fmt_field()

    def fmt_field(self):
        return self.kind


class RationalField(Field):
    kind = "rational"
    char = 0

    def zero(self):
        return Fraction(0)

    def from_int(self, n):
        return Fraction(n)

    def normalize(self, a):
        if isinstance(a, Fraction):
            return a
        if isinstance(a, int):
            return Fraction(a)
        if isinstance(a, str):
            return Fraction(a)
        raise FieldError(f"bad rational raw {a!r}")

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return 1 / a

    def div(self, a, b):
        if b == 0:
            raise ZeroDivisionError("division by 0")
        return a / b

    def is_zero(self, a):
        return a == 0

    def eq(self, a, b):
        return a == b

    def is_square(self, a):
        if a < 0:
            return False
        if a == 0:
            return True
        n, d = a.numerator, a.denominator
        return math.isqrt(n) ** 2 == n and math.isqrt(d) ** 2 == d

    def sqrt(self, a):
        if not self.is_square(a):
            return None
        return Fraction(math.isqrt(a.numerator), math.isqrt(a.denominator))

    def square_class(self, a):
        if a == 0:
            raise ZeroDivisionError("square class of zero")
        n = a.numerator * a.denominator
        sign = -1 if n < 0 else 1
        sf = 1
        for p, e in factorint(abs(n)).items():
            if e % 2:
                sf *= p
        return Fraction(sign * sf)

    def rand(self, rng, nonzero=False):
        while True:
            v = Fraction(rng.randint(-24, 24), rng.randint(1, 12))
            if not nonzero or v != 0:
                return v

    def descriptor(self):
        return {"kind": "rational"}

    def to_json(self, a):
        return str(a)

    def from_json(self, obj):
        return Fraction(str(obj))

    def fmt_field(self):
        return "QQ"

    def _key(self):
        return ("rational",)


class PrimeField(Field):
    """F_p for prime p >= 5.  p = 5 is allowed but kills the Killing form."""

    kind = "prime"

    def __init__(self, p):
        p = int(p)
        if p in (2, 3) or not isprime(p):
            raise FieldError(f"prime field needs a prime p not in {{2, 3}}, got {p}")
        self.p = p
        self.char = p
        self._nonresidue = None

    def zero(self):
        return 0

    def from_int(self, n):
        return n % self.p

    def normalize(self, a):
        return int(a) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, -1, self.p)

    def is_zero(self, a):
        return a % self.p == 0

    def eq(self, a, b):
        return (a - b) % self.p == 0

    def is_square(self, a):
        a %= self.p
        if a == 0:
            return True
        return pow(a, (self.p - 1) // 2, self.p) == 1

    def nonresidue(self):
        if self._nonresidue is None:
            n = 2
            while self.is_square(n):
                n += 1
            self._nonresidue = n
        return self._nonresidue

    def square_class(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("square class of zero")
        return 1 if self.is_square(a) else self.nonresidue()

    def sqrt(self, a):
        """Tonelli-Shanks."""
        p = self.p
        a %= p
        if a == 0:
            return 0
        if not self.is_square(a):
            return None
        if p % 4 == 3:
            return pow(a, (p + 1) // 4, p)
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = self.nonresidue()
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            t2, i = t, 0
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
        return r

    def minus_one_two_squares(self):
        for a in range(self.p):
            b = self.sqrt((-1 - a * a) % self.p)
            if b is not None:
                return (a, b)
        return None

    def rand(self, rng, nonzero=False):
        return rng.randrange(1 if nonzero else 0, self.p)

    def descriptor(self):
        return {"kind": "prime", "p": self.p}

    def to_json(self, a):
        return a % self.p

    def from_json(self, obj):
        return int(obj) % self.p

    def fmt_field(self):
        return f"GF({self.p})"

    def _key(self):
        return ("prime", self.p)


class QuadraticEtale(Field):
    """Quadratic etale extension of a base field: K(sqrt d) or split K x K.

    Raw values are pairs (x, y) of base raws: x + y*sqrt(d), or the two
    components in the split case.  The split case has zero divisors; inv
    raises on them.
    """

    kind = "quad_etale"

    def __init__(self, base, d=None, split=False):
        if split == (d is not None):
            raise FieldError("give exactly one of d=... or split=True")
        self.base = base
        self.split = split
        self.char = base.char
        if not split:
            d = base.coerce(d)
            if base.is_zero(d) or base.is_square(d):
                raise FieldError("d must be a nonsquare of the base")
        self.d = d

    def zero(self):
        z = self.base.zero()
        return (z, z)

    def from_int(self, n):
        if self.split:
            return (self.base.from_int(n), self.base.from_int(n))
        return (self.base.from_int(n), self.base.zero())

    def normalize(self, a):
        x, y = a
        return (self.base.normalize(x), self.base.normalize(y))

    def embed(self, x):
        """Base raw -> etale raw (diagonal in the split case)."""
        x = self.base.coerce(x)
        return (x, x) if self.split else (x, self.base.zero())

    def add(self, a, b):
        return (self.base.add(a[0], b[0]), self.base.add(a[1], b[1]))

    def neg(self, a):
        return (self.base.neg(a[0]), self.base.neg(a[1]))

    def sub(self, a, b):
        return (self.base.sub(a[0], b[0]), self.base.sub(a[1], b[1]))

    def mul(self, a, b):
        K = self.base
        if self.split:
            return (K.mul(a[0], b[0]), K.mul(a[1], b[1]))
        x = K.add(K.mul(a[0], b[0]), K.mul(self.d, K.mul(a[1], b[1])))
        y = K.add(K.mul(a[0], b[1]), K.mul(a[1], b[0]))
        return (x, y)

    def inv(self, a):
        K = self.base
        if self.split:
            if K.is_zero(a[0]) or K.is_zero(a[1]):
                raise ZeroDivisionError("not a unit in the split etale ring")
            return (K.inv(a[0]), K.inv(a[1]))
        n = self.norm_raw(a)
        if K.is_zero(n):
            raise ZeroDivisionError("inverse of 0")
        ninv = K.inv(n)
        return (K.mul(a[0], ninv), K.neg(K.mul(a[1], ninv)))

    def is_zero(self, a):
        return self.base.is_zero(a[0]) and self.base.is_zero(a[1])

    def eq(self, a, b):
        return self.base.eq(a[0], b[0]) and self.base.eq(a[1], b[1])

    def conj(self, a):
        """The nonidentity K-automorphism: (x,y) -> (x,-y), or swap if split."""
        if self.split:
            return (a[1], a[0])
        return (a[0], self.base.neg(a[1]))

    def trace_raw(self, a):
        if self.split:
            return self.base.add(a[0], a[1])
        return self.base.add(a[0], a[0])

    def norm_raw(self, a):
        K = self.base
        if self.split:
            return K.mul(a[0], a[1])
        return K.sub(K.mul(a[0], a[0]), K.mul(self.d, K.mul(a[1], a[1])))

    def is_square(self, a):
        K = self.base
        if self.split:
            return K.is_square(a[0]) and K.is_square(a[1])
        # Solve (u + v sqrt d)^2 = x + y sqrt d in the base representation.
        x, y = a
        if K.is_zero(y):
            return K.is_square(x) or K.is_square(K.mul(x, self.d))
        r = K.sqrt(K.sub(K.mul(x, x), K.mul(self.d, K.mul(y, y))))
        if r is None:
            return False
        half = K.inv(K.from_int(2))
        for s in (r, K.neg(r)):
            if K.is_square(K.mul(K.add(x, s), half)):
                return True
        return False

    def sqrt(self, a):
        K = self.base
        if self.is_zero(a):
            return self.zero()
        if self.split:
            r0, r1 = K.sqrt(a[0]), K.sqrt(a[1])
            if r0 is None or r1 is None:
                return None
            return (r0, r1)
        x, y = a
        if K.is_zero(y):
            r = K.sqrt(x)
            if r is not None:
                return (r, K.zero())
            r = K.sqrt(K.div(x, self.d))
            if r is not None:
                return (K.zero(), r)
            return None
        r = K.sqrt(K.sub(K.mul(x, x), K.mul(self.d, K.mul(y, y))))
        if r is None:
            return None
        half = K.inv(K.from_int(2))
        for s in (r, K.neg(r)):
            u = K.sqrt(K.mul(K.add(x, s), half))
            if u is not None and not K.is_zero(u):
                v = K.div(K.mul(y, half), u)
                return (u, v)
        return None

    def square_class(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("square class of zero")
        if self.split:
            K = self.base
            return (K.square_class(a[0]), K.square_class(a[1]))
        return self.one() if self.is_square(a) else self.normalize(a)

    def minus_one_two_squares(self):
        pair = self.base.minus_one_two_squares()
        if pair is None:
            return None
        return (self.embed(pair[0]), self.embed(pair[1]))

    def rand(self, rng, nonzero=False):
        while True:
            v = (self.base.rand(rng), self.base.rand(rng))
            if not nonzero or not self.is_zero(v):
                return v

    def descriptor(self):
        d = {"kind": "quad_etale", "base": self.base.descriptor()}
        if self.split:
            d["split"] = True
        else:
            d["d"] = self.base.to_json(self.d)
        return d

    def to_json(self, a):
        return {
            "split": self.split,
            "pair": [self.base.to_json(a[0]), self.base.to_json(a[1])],
        }

    def from_json(self, obj):
        if isinstance(obj, dict):
            if bool(obj.get("split", False)) != self.split:
                raise FieldError("split flag mismatch in etale scalar")
            x, y = obj["pair"]
        else:
            x, y = obj
        return (self.base.from_json(x), self.base.from_json(y))

    def fmt(self, a):
        if self.split:
            return f"({self.base.fmt(a[0])}, {self.base.fmt(a[1])})"
        return f"{self.base.fmt(a[0])} + {self.base.fmt(a[1])}*sqrt({self.base.fmt(self.d)})"

    def fmt_field(self):
        if self.split:
            return f"{self.base} x {self.base}"
        return f"{self.base}(sqrt {self.base.fmt(self.d)})"

    def _key(self):
        if self.split:
            return ("quad_etale", self.base._key(), "split")
        return ("quad_etale", self.base._key(), self.base.fmt(self.d))


class LaurentField(Field):
    """Iterated Laurent series over a base, restricted to monomials.

    Variables are totally ordered; the last variable is the outermost
    series variable, which is the one the Springer decision splits on.
    """

    kind = "laurent"

    def __init__(self, base, variables):
        variables = tuple(variables)
        if not variables or len(set(variables)) != len(variables):
            raise FieldError("need distinct variable names")
        self.base = base
        self.variables = variables
        self.nvars = len(variables)
        self.char = base.char

    def zero(self):
        return None

    def from_int(self, n):
        u = self.base.from_int(n)
        if self.base.is_zero(u):
            return None
        return (u, (0,) * self.nvars)

    def monomial(self, unit, exps):
        unit = self.base.coerce(unit)
        if self.base.is_zero(unit):
            return None
        exps = tuple(int(e) for e in exps)
        if len(exps) != self.nvars:
            raise FieldError("exponent tuple has wrong length")
        return (unit, exps)

    def normalize(self, a):
        if a is None:
            return None
        return (self.base.normalize(a[0]), tuple(int(e) for e in a[1]))

    def add(self, a, b):
        if a is None:
            return b
        if b is None:
            return a
        if a[1] != b[1]:
            raise LaurentAddError(
                f"monomial sum with exponents {a[1]} vs {b[1]} is not a monomial"
            )
        u = self.base.add(a[0], b[0])
        if self.base.is_zero(u):
            return None
        return (u, a[1])

    def neg(self, a):
        if a is None:
            return None
        return (self.base.neg(a[0]), a[1])

    def mul(self, a, b):
        if a is None or b is None:
            return None
        return (
            self.base.mul(a[0], b[0]),
            tuple(x + y for x, y in zip(a[1], b[1])),
        )

    def inv(self, a):
        if a is None:
            raise ZeroDivisionError("inverse of 0")
        return (self.base.inv(a[0]), tuple(-e for e in a[1]))

    def is_zero(self, a):
        return a is None

    def eq(self, a, b):
        if a is None or b is None:
            return a is None and b is None
        return a[1] == b[1] and self.base.eq(a[0], b[0])

    def is_square(self, a):
        if a is None:
            return True
        return all(e % 2 == 0 for e in a[1]) and self.base.is_square(a[0])

    def square_class(self, a):
        if a is None:
            raise ZeroDivisionError("square class of zero")
        return (self.base.square_class(a[0]), tuple(e % 2 for e in a[1]))

    def sqrt(self, a):
        if a is None:
            return None
        if any(e % 2 for e in a[1]):
            return None
        r = self.base.sqrt(a[0])
        if r is None:
            return None
        return (r, tuple(e // 2 for e in a[1]))

    def minus_one_two_squares(self):
        pair = self.base.minus_one_two_squares()
        if pair is None:
            return None
        z = (0,) * self.nvars
        lift = lambda u: None if self.base.is_zero(u) else (u, z)
        return (lift(pair[0]), lift(pair[1]))

    def rand(self, rng, nonzero=False):
        if not nonzero and rng.random() < 0.1:
            return None
        u = self.base.rand(rng, nonzero=True)
        return (u, tuple(rng.randint(-2, 2) for _ in range(self.nvars)))

    def descriptor(self):
        return {
            "kind": "laurent",
            "base": self.base.descriptor(),
            "vars": list(self.variables),
        }

    def to_json(self, a):
        if a is None:
            return {"unit": self.base.to_json(self.base.zero()), "exps": {}}
        exps = {v: e for v, e in zip(self.variables, a[1]) if e}
        return {"unit": self.base.to_json(a[0]), "exps": exps}

    def from_json(self, obj):
        u = self.base.from_json(obj["unit"])
        if self.base.is_zero(u):
            return None
        exps = tuple(int(obj.get("exps", {}).get(v, 0)) for v in self.variables)
        return (u, exps)

    def fmt(self, a):
        if a is None:
            return "0"
        parts = [self.base.fmt(a[0])]
        for v, e in zip(self.variables, a[1]):
            if e:
                parts.append(f"{v}^{e}" if e != 1 else v)
        return "*".join(parts)

    def fmt_field(self):
        inner = repr(self.base)
        for v in self.variables:
            inner = f"{inner}(({v}))"
        return inner

    def _key(self):
        return ("laurent", self.base._key(), self.variables)


QQ = RationalField()

_GF_CACHE = {}


def GF(p):
    if p not in _GF_CACHE:
        _GF_CACHE[p] = PrimeField(p)
    return _GF_CACHE[p]


def quad_etale(base, d=None, split=False):
    return QuadraticEtale(base, d=d, split=split)


def laurent(base, variables):
    return LaurentField(base, variables)


def field_from_json(obj):
    kind = obj["kind"]
    if kind == "rational":
        return QQ
    if kind == "prime":
        return GF(obj["p"])
    if kind == "quad_etale":
        base = field_from_json(obj["base"])
        if obj.get("split", False):
            return quad_etale(base, split=True)
        return quad_etale(base, d=base.from_json(obj["d"]))
    if kind == "laurent":
        return laurent(field_from_json(obj["base"]), obj["vars"])
    raise FieldError(f"unknown field kind {kind!r}")


class Scalar:
    """An element tagged with its field.  Immutable; operators are exact."""

    __slots__ = ("field", "v")

    def __init__(self, field, v):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "v", field.normalize(v))

    def __setattr__(self, *a):
        raise AttributeError("Scalar is immutable")

    def _coerce(self, other):
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldMismatchError(
                    f"mixed fields {self.field} and {other.field}"
                )
            return other.v
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Scalar(self.field, self.field.add(self.v, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Scalar(self.field, self.field.sub(self.v, o))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Scalar(self.field, self.field.sub(o, self.v))

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Scalar(self.field, self.field.mul(self.v, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Scalar(self.field, self.field.div(self.v, o))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Scalar(self.field, self.field.div(o, self.v))

    def __neg__(self):
        return Scalar(self.field, self.field.neg(self.v))

    def __pow__(self, n):
        if n < 0:
            return (1 / self) ** (-n)
        out = self.field.one()
        for _ in range(n):
            out = self.field.mul(out, self.v)
        return Scalar(self.field, out)

    def inv(self):
        return Scalar(self.field, self.field.inv(self.v))

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.field.eq(self.v, o)

    def __hash__(self):
        return hash((self.field, repr(self.v)))

    def __bool__(self):
        return not self.field.is_zero(self.v)

    def is_zero(self):
        return self.field.is_zero(self.v)

    def is_square(self):
        return self.field.is_square(self.v)

    def square_class(self):
        return Scalar(self.field, self.field.square_class(self.v))

    def sqrt(self):
        r = self.field.sqrt(self.v)
        return None if r is None else Scalar(self.field, r)

    def to_json(self):
        return self.field.to_json(self.v)

    def __repr__(self):
        return self.field.fmt(self.v)
