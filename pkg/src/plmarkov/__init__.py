"""PL simplicial manifolds: stellar moves, recognition, invariants, and
constructions tying finite group presentations to closed manifolds."""

from .complex_core import (
    Complex,
    InvalidComplexError,
    validate,
    star,
    link,
    boundary_complex,
    join,
    barycentric_subdivision,
)
from .verdict import Verdict, Budget, yes, no, unknown

__all__ = [
    "Complex",
    "InvalidComplexError",
    "validate",
    "star",
    "link",
    "boundary_complex",
    "join",
    "barycentric_subdivision",
    "Verdict",
    "Budget",
    "yes",
    "no",
    "unknown",
]

__version__ = "0.1.0"
