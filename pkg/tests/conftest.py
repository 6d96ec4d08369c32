"""Lazily built, process-shared algebra configurations for the suite.

The Allison-Faulkner cores are expensive (tens of seconds over the
rationals), so every test module draws its configurations from the
caches below; the gamma-independent core is additionally cached on each
BiOctonion instance, making per-gamma rebuilds cheap.
"""

from e8lab import allison_faulkner as afc
from e8lab.bioctonion import build_decomposable, build_transfer
from e8lab.composition import cayley_dickson
from e8lab.scalars import GF, QQ, quad_etale

GAMMAS = ((1, 1, 1), (1, -1, 1), (2, 3, 5))
AF_KINDS = ("split", "compact", "mixed", "transfer")

# least positive nonsquare (QQ: any nonsquare works; 2 is convenient)
_NONSQUARE = {"QQ": 2, "F5": 2, "F7": 3, "F11": 2}

_FIELDS = {}
_ALGEBRAS = {}
_AF = {}


def base_field(key):
    if key not in _FIELDS:
        _FIELDS[key] = QQ if key == "QQ" else GF(int(key[1:]))
    return _FIELDS[key]


def bioctonion(kind, key):
    """Test-matrix bi-octonion algebra of the given kind over base_field(key)."""
    if (kind, key) not in _ALGEBRAS:
        F = base_field(key)
        if kind == "transfer":
            E = quad_etale(F, d=_NONSQUARE[key])
            sqrt_d = (F.zero(), F.one())
            C = cayley_dickson(E, [sqrt_d, E.from_int(-1), E.from_int(-1)])
            _ALGEBRAS[kind, key] = build_transfer(E, C)
        else:
            p1 = (1, 1, 1) if kind in ("split", "mixed") else (-1, -1, -1)
            p2 = (-1, -1, -1) if kind in ("compact", "mixed") else (1, 1, 1)
            _ALGEBRAS[kind, key] = build_decomposable(
                cayley_dickson(F, p1), cayley_dickson(F, p2)
            )
    return _ALGEBRAS[kind, key]


def af_algebra(kind, key, gamma):
    """K(A,-,gamma) for a test-matrix configuration, cached."""
    k = (kind, key, gamma)
    if k not in _AF:
        _AF[k] = afc.build(bioctonion(kind, key), gamma)
    return _AF[k]
