"""Precision plumbing shared by every numeric routine in the package.

Everything numeric takes a :class:`PrecisionContext`.  The context fixes the
requested digits, the guard digits the internals actually work at, and hard
budgets for series length and quadrature depth so nothing can spin silently.

Values are mpmath ``mpf`` floats carried at ``digits + guard`` decimal places.
Routines wrap their bodies in ``with ctx.working():`` and convert inputs via
:func:`as_real` on entry.  No NaN or infinity may escape an operation; such
states surface as :class:`NumericsError` subclasses instead.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

import mpmath as mp

__all__ = [
    "PrecisionContext",
    "NumericsError",
    "DomainError",
    "BudgetError",
    "QuadratureError",
    "as_real",
    "ensure_finite",
    "parse_rational",
]


class NumericsError(Exception):
    """Base class for every failure this package raises on purpose."""


class DomainError(NumericsError):
    """Argument outside the supported domain of an operation."""


class BudgetError(NumericsError):
    """A summation hit ``max_terms`` before its tail estimate met tolerance.

    Carries the best partial result so far and the tail estimate at the point
    of giving up, so callers can degrade gracefully or report diagnostics.
    """

    def __init__(self, message, best=None, estimate=None):
        super().__init__(message)
        self.best = best
        self.estimate = estimate


class QuadratureError(NumericsError):
    """Quadrature refinement hit ``quad_level_cap`` before converging."""

    def __init__(self, message, best=None, estimate=None):
        super().__init__(message)
        self.best = best
        self.estimate = estimate


@dataclass(frozen=True)
class PrecisionContext:
    """Requested precision plus budgets, threaded through every operation.

    Parameters
    ----------
    digits : int
        Decimal significant digits the caller wants certified.  At least 10.
    guard : int
        Extra working digits; internals run at ``digits + guard``.  At least 5.
    max_terms : int
        Hard cap on the length of any single summation.
    quad_level_cap : int
        Hard cap on tanh-sinh refinement levels (step h = 2**-level).

    The dataclass is frozen (hashable) so contexts can key memoization caches.
    """

    digits: int = 20
    guard: int = 15
    max_terms: int = 2_000_000
    quad_level_cap: int = 12

    def __post_init__(self):
        if self.digits < 10:
            raise DomainError("digits must be at least 10")
        if self.guard < 5:
            raise DomainError("guard must be at least 5")
        if self.max_terms < 1:
            raise DomainError("max_terms must be positive")
        if self.quad_level_cap < 1:
            raise DomainError("quad_level_cap must be positive")

    @property
    def workdigits(self) -> int:
        return self.digits + self.guard

    def working(self):
        """Context manager setting the global mpmath precision.

        mpmath keeps precision in module state, so evaluation is process-safe
        but not thread-safe.  Parallel drivers use process pools.
        """
        return mp.workdps(self.workdigits)

    def tol(self):
        """Relative tolerance an operation must certify: 10**-digits."""
        return mp.mpf(10) ** (-self.digits)

    def worktol(self):
        """Internal stopping tolerance, below the certified one."""
        return mp.mpf(10) ** (-self.workdigits)

    def with_digits(self, digits: int, **kw) -> "PrecisionContext":
        return replace(self, digits=digits, **kw)


def as_real(x):
    """Convert to mpf at the currently active precision.

    Accepts mpf, int, Fraction, float and numeric strings.  Fractions go
    through one division at working precision rather than decimal parsing.
    """
    if isinstance(x, mp.mpf):
        return x
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    if isinstance(x, (int, float, str)):
        return mp.mpf(x)
    raise DomainError(f"cannot interpret {x!r} as a real scalar")


def ensure_finite(x, what="result"):
    if not mp.isfinite(x):
        raise NumericsError(f"{what} is not finite: {x}")
    return x


def parse_rational(text) -> Fraction:
    """Parse '5/2', '3', '0.25' into an exact Fraction.

    Exact parameter lists matter: convergence margins are computed in rational
    arithmetic and must not pick up binary rounding.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"not a rational: {text!r}") from exc
