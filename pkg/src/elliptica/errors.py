"""Exception types shared across the package.

Every failure mode maps to one of four families so that callers (and the CLI
exit-code table) can dispatch on type rather than on message text:

* DomainError      -- input outside an operation's documented domain
* BalancingError   -- series parameters off the balanced variety
* PoleError        -- a denominator theta fell below the pole guard
* ScaleError       -- a size cap (path length, matrix order, coordinate range)
"""

from __future__ import annotations


class EllipticaError(Exception):
    """Base class for all package errors."""


class DomainError(EllipticaError, ValueError):
    """Argument outside the documented domain (zero base, |p| >= 1, ...)."""


class BalancingError(DomainError):
    """Series parameters violate the required balancing condition."""


class PoleError(EllipticaError, ArithmeticError):
    """A denominator theta factor is smaller than the pole guard.

    Attributes
    ----------
    factor : str
        Human-readable description of the offending factor, e.g.
        ``"qp_shifted((2+0j); n=-3) denominator k=1"``.
    """

    def __init__(self, message: str, factor: str = ""):
        super().__init__(message)
        self.factor = factor


class ScaleError(EllipticaError, ValueError):
    """A documented size cap was exceeded (guards against runaway loops)."""
