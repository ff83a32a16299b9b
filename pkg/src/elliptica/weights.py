"""Totally elliptic edge weights for monotone lattice paths.

A horizontal edge (n-1, m) -> (n, m) carries the weight

    w(n, m; a, b; q, p) =
        theta(a q^{n+2m}, b q^{2n}, b q^{2n-1}, a q^{1-n}/b, a q^{-n}/b)
      / theta(a q^n, b q^{2n+m}, b q^{2n+m-1}, a q^{1+m-n}/b, a q^{m-n}/b)
      * q^m,

vertical edges carry weight 1.  The function is invariant under a -> p a and
b -> p b (total ellipticity) and satisfies the reflection laws

    w(n, m; a, b; q, p) = w(-n, -m; 1/a, q/b; q, p)
                        = w(n, m; 1/a, 1/b; 1/q, p).

Degenerate parameter limits are explicit flags, not small numbers: a stored
zero for ``a`` (valid only at p = 0) selects the two-factor b-weight, and
a = b = 0 selects the plain q-weight q^m.  ``weight_p0`` is the standalone
rational-function form of the p = 0 weight.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from functools import lru_cache

from .errors import DomainError, PoleError, ScaleError
from .theta import Nome, ThetaContext, ipow
from .theta import _theta_product, _theta_product_cached

__all__ = ["EllipticParams", "ShiftOffset", "weight", "weight_p0", "shifted_weight"]

COORD_MAX = 10_000
_P0_GUARD = 1e-12


@dataclass(frozen=True)
class EllipticParams:
    """Weight-function parameters (a, b, q) and the nome.

    q must be nonzero and |p| < 1 (enforced by Nome).  a == 0 is the explicit
    "a -> 0 taken" flag and requires p == 0; b == 0 additionally requires
    a == 0 (the two limits only commute in that order).
    """

    a: complex
    b: complex
    q: complex
    p: Nome

    def __post_init__(self):
        if self.q == 0:
            raise DomainError("q must be nonzero")
        if not isinstance(self.p, Nome):
            raise DomainError("p must be a Nome")
        if self.a == 0 and self.p.p != 0:
            raise DomainError("a = 0 is only defined at p = 0")
        if self.b == 0 and (self.a != 0 or self.p.p != 0):
            raise DomainError("b = 0 requires a = 0 and p = 0")

    @property
    def is_b_weight(self) -> bool:
        return self.a == 0 and self.b != 0

    @property
    def is_q_weight(self) -> bool:
        return self.a == 0 and self.b == 0

    def shifted(self, s: int, t: int) -> "EllipticParams":
        """Parameters of the shifted weight: a q^{s+2t}, b q^{2s+t}."""
        return EllipticParams(
            self.a * ipow(self.q, s + 2 * t),
            self.b * ipow(self.q, 2 * s + t),
            self.q,
            self.p,
        )

    def reflected(self) -> "EllipticParams":
        """Parameters (1/a, q/b) of the point-reflection law."""
        return EllipticParams(1 / self.a, self.q / self.b, self.q, self.p)


@dataclass(frozen=True)
class ShiftOffset:
    s: int
    t: int

    def __post_init__(self):
        operator.index(self.s)
        operator.index(self.t)


_NUM_LABELS = ("a*q^(n+2m)", "b*q^(2n)", "b*q^(2n-1)", "a*q^(1-n)/b", "a*q^(-n)/b")
_DEN_LABELS = ("a*q^n", "b*q^(2n+m)", "b*q^(2n+m-1)", "a*q^(1+m-n)/b", "a*q^(m-n)/b")


def _check_coords(n: int, m: int) -> tuple[int, int]:
    n, m = operator.index(n), operator.index(m)
    if abs(n) > COORD_MAX or abs(m) > COORD_MAX:
        raise ScaleError(f"|n|, |m| must be <= {COORD_MAX}, got ({n}, {m})")
    return n, m


def _weight_args(n, m, a, b, q):
    num = (
        a * ipow(q, n + 2 * m),
        b * ipow(q, 2 * n),
        b * ipow(q, 2 * n - 1),
        a * ipow(q, 1 - n) / b,
        a * ipow(q, -n) / b,
    )
    den = (
        a * ipow(q, n),
        b * ipow(q, 2 * n + m),
        b * ipow(q, 2 * n + m - 1),
        a * ipow(q, 1 + m - n) / b,
        a * ipow(q, m - n) / b,
    )
    return num, den


def _theta_at(x, p, K):
    if isinstance(x, complex) and isinstance(p, complex):
        return _theta_product_cached(x, p, K)
    return _theta_product(x, p, K)


def _weight_eval(n, m, a, b, q, p, K, guard):
    num_args, den_args = _weight_args(n, m, a, b, q)
    acc = ipow(q, m)
    for label, x in zip(_NUM_LABELS, num_args):
        if x == 0:
            raise DomainError(f"weight factor {label} is zero at (n,m)=({n},{m})")
        acc = acc * _theta_at(x, p, K)
    for label, x in zip(_DEN_LABELS, den_args):
        if x == 0:
            raise DomainError(f"weight factor {label} is zero at (n,m)=({n},{m})")
        t = _theta_at(x, p, K)
        if abs(t) <= guard:
            raise PoleError(
                f"weight denominator theta({label}) below guard at (n,m)=({n},{m})",
                factor=label,
            )
        acc = acc / t
    return acc


@lru_cache(maxsize=1 << 16)
def _weight_cached(n: int, m: int, a: complex, b: complex, q: complex,
                   p: complex, K: int, guard: float) -> complex:
    return _weight_eval(n, m, a, b, q, p, K, guard)


def check_context(params: EllipticParams, ctx: ThetaContext) -> None:
    """Reject a context whose nome disagrees with the parameter set.

    The truncation depth in ctx is computed for ctx's own nome; letting
    a different nome slip through via params would silently evaluate
    theta products at the wrong depth.
    """
    if params.p.p != ctx.p:
        raise DomainError(
            f"context nome {ctx.p!r} differs from parameter nome "
            f"{params.p.p!r}")


def weight(n: int, m: int, params: EllipticParams, ctx: ThetaContext):
    """Weight of the horizontal edge (n-1, m) -> (n, m)."""
    check_context(params, ctx)
    n, m = _check_coords(n, m)
    if params.a == 0:
        return weight_p0(n, m, params.a, params.b, params.q)
    a, b, q = params.a, params.b, params.q
    p = params.p.p
    numeric = (a, b, q, p)
    if all(isinstance(v, (int, float, complex)) for v in numeric):
        return _weight_cached(n, m, complex(a), complex(b), complex(q),
                              complex(p), ctx.K, ctx.guard_eps)
    # non-double backend (mpmath): evaluate directly, no cache
    return _weight_eval(n, m, a, b, q, p, ctx.K, ctx.guard_eps)


def weight_p0(n: int, m: int, a, b, q):
    """The p = 0 weight as a rational function of (a, b, q).

    a = 0 selects the two-factor b-weight; a = b = 0 the plain q-weight q^m.
    b = 0 with a != 0 is undefined (the limits do not commute that way).
    """
    n, m = _check_coords(n, m)
    if q == 0:
        raise DomainError("q must be nonzero")
    if b == 0:
        if a != 0:
            raise DomainError("b = 0 requires a = 0 (limits taken in order)")
        return ipow(q, m)
    num_args, den_args = _weight_args(n, m, a, b, q)
    acc = ipow(q, m)
    for x in num_args:
        acc = acc * (1 - x)
    for label, x in zip(_DEN_LABELS, den_args):
        d = 1 - x
        if abs(d) <= _P0_GUARD:
            raise PoleError(
                f"weight_p0 denominator (1 - {label}) vanishes at (n,m)=({n},{m})",
                factor=label,
            )
        acc = acc / d
    return acc


def shifted_weight(n: int, m: int, offset: ShiftOffset, params: EllipticParams,
                   ctx: ThetaContext):
    """w_{(s,t)}(n, m): the weight with a -> a q^{s+2t}, b -> b q^{2s+t}."""
    return weight(n, m, params.shifted(offset.s, offset.t), ctx)
