from .scalars import GaussianRational, I, normalize, to_exact
from .poly import Polynomial, RationalFunction, VariableMismatch, poly_arith, poly_partial
from .univariate import UniPoly, UniRat
from .laurent import (
    DOMAINS,
    DomainMismatch,
    InsufficientPrecision,
    LaurentSeries,
    compose_series,
    laurent_arith,
    laurent_coeff,
)

__all__ = [
    "GaussianRational", "I", "normalize", "to_exact",
    "Polynomial", "RationalFunction", "VariableMismatch", "poly_arith", "poly_partial",
    "UniPoly", "UniRat",
    "DOMAINS", "DomainMismatch", "InsufficientPrecision", "LaurentSeries",
    "compose_series", "laurent_arith", "laurent_coeff",
]
