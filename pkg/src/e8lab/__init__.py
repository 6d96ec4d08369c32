"""Exact-arithmetic laboratory for E8 Lie algebras built from octonion data.

Constructs the 248-dimensional Lie algebras K(A, -, gamma) from bi-octonion
algebras and their Tits-construction counterparts from Albert algebras,
verifies their structure (Jacobi, grading, triality, Killing form, D8
subalgebras) with exact field arithmetic, and computes the quadratic-form
invariants that decide isotropy questions.
"""

__version__ = "0.1.0"

from .scalars import (
    QQ,
    GF,
    Scalar,
    quad_etale,
    laurent,
    field_from_json,
)

__all__ = [
    "QQ",
    "GF",
    "Scalar",
    "quad_etale",
    "laurent",
    "field_from_json",
    "__version__",
]
