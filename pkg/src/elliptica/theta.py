"""Multiplicative theta function and q,p-shifted factorials.

The central object is

    theta(x; p) = prod_{k>=0} (1 - x p^k) (1 - p^{k+1} / x),      |p| < 1,

evaluated by truncating the product at the smallest K >= 1 with
|p|^K < truncation_eps.  At p = 0 the same code path returns 1 - x exactly
(K = 1, and the p/x factor collapses to 1).  The function satisfies

    theta(x)   = -x * theta(1/x)            (inversion)
    theta(p x) = -(1/x) * theta(x)          (quasi-periodicity)

and the four-term addition rule checked by ``check_addition_formula``.

Shifted factorials use the three-branch definition

    (a; q, p)_n = prod_{k=0}^{n-1} theta(a q^k)           n > 0
                = 1                                        n = 0
                = 1 / prod_{k=0}^{-n-1} theta(a q^{n+k})   n < 0,

so (a)_n (a q^n)_{-n} = 1 by construction.  Integer powers of q are always
formed by binary exponentiation (`ipow`), never via log/exp, keeping results
deterministic and exact for exact inputs.

All scalar arithmetic here is duck-typed: complex and mpmath.mpc inputs both
work, which is what the extended-precision rerun in the CLI relies on.  Only
genuine ``complex`` values are memoized.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass, field
from functools import lru_cache

from .errors import DomainError, PoleError

__all__ = [
    "Nome",
    "ThetaContext",
    "QPFactorialArgs",
    "ipow",
    "theta",
    "theta_multi",
    "qp_shifted",
    "qp_shifted_multi",
    "check_addition_formula",
    "binom2",
]


def ipow(z, n):
    """z**n for integer n by exponentiation-by-squaring.

    Works for any scalar with *, /; negative n returns the reciprocal of the
    positive power.  CPython's complex ** falls back to polar log/exp for
    large exponents, which this deliberately avoids.
    """
    n = operator.index(n)
    if n < 0:
        return 1 / ipow(z, -n)
    result = z ** 0  # typed one: complex -> (1+0j), mpc -> mpc(1)
    base = z
    while n:
        if n & 1:
            result = result * base
        base = base * base
        n >>= 1
    return result


def binom2(n):
    """n*(n-1)/2 as an exact integer, valid for negative n as well."""
    n = operator.index(n)
    return n * (n - 1) // 2


@dataclass(frozen=True)
class Nome:
    """Elliptic nome p with its convergence cap.

    |p| must be strictly less than 1 and at most p_max (default 0.9), which
    bounds the truncation depth K of every theta evaluation made under this
    nome.
    """

    p: complex
    p_max: float = 0.9

    def __post_init__(self):
        if not (0 < self.p_max < 1):
            raise DomainError(f"p_max must lie in (0, 1), got {self.p_max}")
        if abs(self.p) > self.p_max:
            raise DomainError(
                f"|p| = {abs(self.p)} exceeds the cap p_max = {self.p_max}"
            )


@dataclass(frozen=True)
class ThetaContext:
    """Evaluation context: nome plus truncation and pole-guard thresholds.

    K is derived once at construction: the smallest integer >= 1 with
    |p|^K < truncation_eps.  Contexts are immutable; everything downstream
    treats them as pure configuration.
    """

    nome: Nome
    truncation_eps: float = 1e-18
    guard_eps: float = 1e-12
    K: int = field(init=False)

    def __post_init__(self):
        if not (0 < self.truncation_eps < 1):
            raise DomainError("truncation_eps must lie in (0, 1)")
        if not (0 < self.guard_eps < 1):
            raise DomainError("guard_eps must lie in (0, 1)")
        ap = float(abs(self.nome.p))
        if ap == 0.0:
            K = 1
        else:
            K = max(1, math.ceil(math.log(self.truncation_eps) / math.log(ap)))
            while ap ** K >= self.truncation_eps:
                K += 1
            while K > 1 and ap ** (K - 1) < self.truncation_eps:
                K -= 1
        object.__setattr__(self, "K", K)

    @classmethod
    def from_p(cls, p, *, p_max: float = 0.9,
               truncation_eps: float = 1e-18, guard_eps: float = 1e-12):
        return cls(Nome(p, p_max), truncation_eps, guard_eps)

    @property
    def p(self):
        return self.nome.p


@dataclass(frozen=True)
class QPFactorialArgs:
    """Arguments of a single shifted factorial (a; q, p)_n.

    ``p`` may be given as a Nome to pin the factorial to a specific nome; when
    None the evaluation context's nome is used.  a and q must be nonzero.
    """

    a: complex
    n: int
    q: complex
    p: Nome | None = None

    def __post_init__(self):
        if self.a == 0:
            raise DomainError("factorial base a must be nonzero")
        if self.q == 0:
            raise DomainError("factorial base q must be nonzero")
        operator.index(self.n)


def _theta_product(x, p, K):
    acc = (x * 0) + 1
    pk = acc          # p^0
    for _ in range(K):
        acc = acc * (1 - x * pk)
        pk = pk * p
        acc = acc * (1 - pk / x)
    return acc


@lru_cache(maxsize=1 << 18)
def _theta_product_cached(x: complex, p: complex, K: int) -> complex:
    return _theta_product(x, p, K)


def theta(x, ctx: ThetaContext):
    """Evaluate theta(x; p) under the given context.

    x = 0 is outside the domain (the p/x factor diverges).  Real/int inputs
    are promoted to complex; other scalar types (mpmath) pass through the
    uncached generic product.
    """
    if x == 0:
        raise DomainError("theta argument must be nonzero")
    p = ctx.p
    if isinstance(x, (int, float, complex)) and isinstance(p, (int, float, complex)):
        return _theta_product_cached(complex(x), complex(p), ctx.K)
    return _theta_product(x, p, ctx.K)


def theta_multi(args, ctx: ThetaContext):
    """Product of theta over an argument sequence (empty product = 1)."""
    acc = 1
    for x in args:
        acc = acc * theta(x, ctx)
    return acc


def qp_shifted(a, n=None, q=None, ctx: ThetaContext = None):
    """The q,p-shifted factorial (a; q, p)_n for integer n (any sign).

    Call either as ``qp_shifted(QPFactorialArgs(...), ctx)`` or with loose
    scalars ``qp_shifted(a, n, q, ctx)``.  a = 0 is the explicit degenerate
    flag: at p = 0 every factor is theta(0 * q^k; 0) = 1, so the value is
    exactly 1 for all n; at p != 0 a zero base is a domain error.  For n < 0
    each denominator theta is checked against guard_eps and a PoleError
    identifies the failing factor.
    """
    if isinstance(a, QPFactorialArgs):
        args, ctx = a, n
        if ctx is None:
            raise DomainError("qp_shifted(args) requires a context")
        if args.p is not None and args.p != ctx.nome:
            ctx = ThetaContext(args.p, ctx.truncation_eps, ctx.guard_eps)
        a, n, q = args.a, args.n, args.q
    n = operator.index(n)
    if a == 0:
        if ctx.p == 0:
            return 1
        raise DomainError("qp_shifted base must be nonzero when p != 0")
    if q == 0:
        raise DomainError("qp_shifted requires q != 0")
    if n == 0:
        return 1
    if n > 0:
        acc = 1
        for k in range(n):
            acc = acc * theta(a * ipow(q, k), ctx)
        return acc
    acc = 1
    for k in range(-n):
        t = theta(a * ipow(q, n + k), ctx)
        if abs(t) <= ctx.guard_eps:
            raise PoleError(
                f"(a; q, p)_n denominator theta below guard at k={k}",
                factor=f"qp_shifted(a={a!r}, n={n}) k={k}",
            )
        acc = acc * t
    return 1 / acc


def qp_shifted_multi(bases, n, q, ctx: ThetaContext):
    """Product of (b; q, p)_n over the given bases (empty product = 1)."""
    acc = 1
    for b in bases:
        acc = acc * qp_shifted(b, n, q, ctx)
    return acc


def check_addition_formula(x, y, u, v, ctx: ThetaContext) -> float:
    """Residual of the four-term theta addition rule.

    Returns |LHS - RHS| / max(|LHS|, |RHS|, 1) where

        LHS = theta(xy, x/y, uv, u/v) - theta(xv, x/v, uy, u/y)
        RHS = (u/y) * theta(yv, y/v, xu, x/u).
    """
    lhs = theta_multi((x * y, x / y, u * v, u / v), ctx) \
        - theta_multi((x * v, x / v, u * y, u / y), ctx)
    rhs = (u / y) * theta_multi((y * v, y / v, x * u, x / u), ctx)
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1.0)
