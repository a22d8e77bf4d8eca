"""Arbitrary-precision cross-verification of theta-product L-values.

The package evaluates Jacobi theta products, generalized and two-variable
hypergeometric series, and the special values L(., 3) and L(., 4) they
encode, by several independent routes, then certifies digit-level agreement
of every identity in the registry.  Entry points: the
:mod:`thetal.identities` registry and the ``thetal`` command line.
"""

from .context import (
    BudgetError,
    DomainError,
    NumericsError,
    PrecisionContext,
    QuadratureError,
)

__version__ = "0.1.0"

__all__ = [
    "PrecisionContext",
    "NumericsError",
    "DomainError",
    "BudgetError",
    "QuadratureError",
    "__version__",
]
