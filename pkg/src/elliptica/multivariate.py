"""r-fold path convolutions and multivariate summation identities.

Families of r nonintersecting paths with corners on antidiagonals can
be cut along a vertical, horizontal, or antidiagonal line just like a
single path; each cut turns the generating-function determinant into a
sum over strictly ordered crossing tuples of products of two smaller
determinants (plus crossing-edge weights for the vertical cut). Those
determinants all factor in closed form, and after continuation the
three cuts lead to an r-fold very-well-poised summation and, one level
up, an r-fold transformation. This module checks the convolutions at
integer points and evaluates both r-fold identities directly.

The printed form of the r-fold transformation carries one slip: the
partner sum's seventh denominator parameter appears as ef q^{r-1-m}
over the partner's own special parameter, but the very-well-poised
pairing (and the r = 1 case, which must be the classical univariate
transformation) force ef q^{r-1-m}/a. The corrected form is
implemented; see TRANSCRIPTION.md for the evidence.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

from ._linalg import det
from .closed_forms import EllipticBinomialArgs, elliptic_binomial
from .errors import DomainError, PoleError, ScaleError
from .series import (
    _accumulate,
    _check_nome,
    _denominator_factorials,
    _numerator_factorials,
    _tag_pole,
)
from .theta import Nome, ThetaContext, ipow, theta
from .weights import EllipticParams, check_context, weight

# Each cut contributes binom(window, r) tuples with two r x r
# determinants per tuple; past r = 3 the check is all noise and cost.
CONVOLUTION_MAX_ORDER = 3

_CUT_WINDOWS = {
    "a": ("l + r + 1 <= nu <= n + 1",
          lambda s: s.l + s.r + 1 <= s.nu <= s.n + 1),
    "b": ("k <= nu <= m - r", lambda s: s.k <= s.nu <= s.m - s.r),
    "c": ("l + k <= nu <= n + m", lambda s: s.l + s.k <= s.nu <= s.n + s.m),
}


@dataclass(frozen=True)
class ConvolutionSpec:
    """A choice of cut for a family of r nonintersecting paths.

    The family runs from (l+j, k-j), j = 1..r, to (n+i, m-i), i = 1..r.
    variant "a" cuts at the vertical line x = nu, "b" at the horizontal
    line y = nu, "c" at the antidiagonal x + y = nu.
    """

    variant: str
    l: int
    k: int
    n: int
    m: int
    r: int
    nu: int

    def __post_init__(self):
        if self.variant not in _CUT_WINDOWS:
            raise DomainError(
                f"variant must be one of 'a', 'b', 'c', got "
                f"{self.variant!r}")
        if self.r < 1:
            raise DomainError("r must be a positive integer")
        if self.n - self.l + self.m - self.k < 0:
            raise DomainError("need n - l + m - k >= 0")
        label, ok = _CUT_WINDOWS[self.variant]
        if not ok(self):
            raise DomainError(
                f"cut position violates {label} for variant "
                f"{self.variant!r}: got nu = {self.nu}")
        if self.variant == "a":
            empty = self.m < self.k
        else:
            empty = self.n < self.l
        if empty:
            raise DomainError(
                "the crossing-tuple range is empty for these corners")


def _path_det(starts, ends, params, ctx):
    """det of generating functions, rows indexed by ends."""
    rows = [
        [elliptic_binomial(EllipticBinomialArgs(sl, sk, el, ek, params),
                           ctx)
         for (sl, sk) in starts]
        for (el, ek) in ends
    ]
    return det(rows)


def verify_convolution(spec: ConvolutionSpec, params: EllipticParams,
                       ctx: ThetaContext):
    """Both sides of the chosen r-fold convolution at integer corners.

    Returns (lhs, rhs): lhs is the single determinant for the whole
    family, rhs the sum over strictly ordered crossing tuples of the
    two partial determinants (times crossing weights for variant "a").
    """
    check_context(params, ctx)
    if spec.r > CONVOLUTION_MAX_ORDER:
        raise ScaleError(
            f"convolution check capped at r <= {CONVOLUTION_MAX_ORDER}, "
            f"got r = {spec.r}")
    l, k, n, m, r, nu = spec.l, spec.k, spec.n, spec.m, spec.r, spec.nu
    starts = [(l + j, k - j) for j in range(1, r + 1)]
    ends = [(n + i, m - i) for i in range(1, r + 1)]
    lhs = _path_det(starts, ends, params, ctx)

    one = ipow(params.q, 0)
    total, comp = 0.0 * one, 0.0 * one
    if spec.variant == "a":
        for combo in combinations(range(k - r, m), r):
            t = tuple(reversed(combo))
            first = _path_det(starts, [(nu - 1, ti) for ti in t],
                              params, ctx)
            crossing = one
            for ts in t:
                crossing = crossing * weight(nu, ts, params, ctx)
            second = _path_det([(nu, tj) for tj in t], ends, params, ctx)
            total, comp = _accumulate(total, comp,
                                      first * crossing * second)
    elif spec.variant == "b":
        for t in combinations(range(l + 1, n + r + 1), r):
            first = _path_det(starts, [(ti, nu - 1) for ti in t],
                              params, ctx)
            second = _path_det([(tj, nu) for tj in t], ends, params, ctx)
            total, comp = _accumulate(total, comp, first * second)
    else:
        for t in combinations(range(l + 1, n + r + 1), r):
            first = _path_det(starts, [(ti, nu - ti) for ti in t],
                              params, ctx)
            second = _path_det([(tj, nu - tj) for tj in t], ends,
                               params, ctx)
            total, comp = _accumulate(total, comp, first * second)
    return lhs, total + comp


@dataclass(frozen=True)
class MultiSumSpec:
    """Parameters of the r-fold summation (and transformation).

    a, b, c, d are the free parameters of the summation; e and f are
    required only by the transformation. The special fifth/seventh
    parameters and the partner parameter lam = a^2 q^{2-r} / bcd are
    always derived internally, never supplied.
    """

    a: complex
    b: complex
    c: complex
    d: complex
    m: int
    r: int
    q: complex
    p: Nome
    e: complex | None = None
    f: complex | None = None

    def __post_init__(self):
        if not isinstance(self.p, Nome):
            raise DomainError("p must be a Nome")
        if self.q == 0:
            raise DomainError("series base q must be nonzero")
        if any(x == 0 for x in (self.a, self.b, self.c, self.d)):
            raise DomainError("parameters a, b, c, d must be nonzero")
        if (self.e is None) != (self.f is None):
            raise DomainError("e and f must be supplied together")
        if self.e is not None and (self.e == 0 or self.f == 0):
            raise DomainError("parameters e, f must be nonzero")
        if self.r < 1:
            raise DomainError("r must be a positive integer")
        if self.m < 0:
            raise DomainError("m must be nonnegative")
        if self.m < self.r - 1:
            raise DomainError(
                f"need m >= r - 1 for a nonvacuous tuple range, got "
                f"m = {self.m}, r = {self.r}")


def _ordered_tuple_sum(special, uppers, lowers, m, r, q, ctx):
    """Sum over 0 <= k_1 < ... < k_r <= m of the r-fold summand.

    The summand is q^{sum (2i-1) k_i} times the squared pair product
    prod_{i<j} [theta(q^{k_i-k_j}) theta(special q^{k_i+k_j})]^2 times
    the product over i of the normalized theta ratio and the factorial
    quotient at k_i.
    """
    base = theta(special, ctx)
    if abs(base) <= ctx.guard_eps:
        raise PoleError("theta of the special parameter vanishes",
                        factor=f"theta({special!r})")
    one = ipow(q, 0)
    total, comp = 0.0 * one, 0.0 * one
    for combo in combinations(range(m + 1), r):
        exponent = sum((2 * i - 1) * ki
                       for i, ki in enumerate(combo, start=1))
        term = ipow(q, exponent)
        for i, j in combinations(range(r), 2):
            pair = (theta(ipow(q, combo[i] - combo[j]), ctx)
                    * theta(special * ipow(q, combo[i] + combo[j]), ctx))
            term = term * pair * pair
        for ki in combo:
            term = term * theta(special * ipow(q, 2 * ki), ctx) / base
            term = (term * _numerator_factorials(uppers, ki, q, ctx)
                    / _denominator_factorials(lowers, ki, q, ctx))
        total, comp = _accumulate(total, comp, term)
    return total + comp


def multivariate_ft_sum(spec: MultiSumSpec, ctx: ThetaContext):
    """Both sides of the r-fold very-well-poised summation.

    Returns (lhs, rhs): lhs the sum over strictly ordered r-tuples,
    rhs the fully factored product side. r = 1 coincides with
    frenkel_turaev_sum.
    """
    _check_nome(spec.p, ctx)
    a, b, c, d = spec.a, spec.b, spec.c, spec.d
    m, r, q = spec.m, spec.r, spec.q
    fifth = a * a * ipow(q, 3 - 2 * r + m) / (b * c * d)
    uppers = (a, b, c, d, fifth, ipow(q, -m))
    lowers = (q, a * q / b, a * q / c, a * q / d,
              b * c * d * ipow(q, 2 * r - 2 - m) / a,
              a * ipow(q, 1 + m))
    with _tag_pole("series"):
        lhs = _ordered_tuple_sum(a, uppers, lowers, m, r, q, ctx)
    with _tag_pole("product"):
        rhs = (ipow(q, -4 * comb(r, 3))
               * ipow(a / (b * c * d * q), comb(r, 2)))
        for i in range(1, r + 1):
            rhs = rhs * _numerator_factorials((q, b, c, d, fifth),
                                              i - 1, q, ctx)
        for i in range(1, r + 1):
            num = (_numerator_factorials((q, a * q), m, q, ctx)
                   * _numerator_factorials(
                       (a * ipow(q, 2 - i) / (b * c),
                        a * ipow(q, 2 - i) / (b * d),
                        a * ipow(q, 2 - i) / (c * d)),
                       m + 1 - r, q, ctx))
            den = _denominator_factorials(
                (q, a * q / b, a * q / c, a * q / d,
                 a * ipow(q, 2 - 2 * r + i) / (b * c * d)),
                m + 1 - i, q, ctx)
            rhs = rhs * num / den
    return lhs, rhs


def multivariate_ft_transform(spec: MultiSumSpec, ctx: ThetaContext):
    """Both sides of the r-fold very-well-poised transformation.

    Requires spec.e and spec.f. Returns (lhs, rhs): lhs the r-fold sum
    with special parameter a, rhs the factored prefactor times the
    partner r-fold sum with special parameter lam = a^2 q^{2-r} / bcd.
    r = 1 coincides with frenkel_turaev_transform.
    """
    _check_nome(spec.p, ctx)
    if spec.e is None:
        raise DomainError("the transformation needs parameters e and f")
    a, b, c, d, e, f = spec.a, spec.b, spec.c, spec.d, spec.e, spec.f
    m, r, q = spec.m, spec.r, spec.q
    lam = a * a * ipow(q, 2 - r) / (b * c * d)
    seventh = lam * a * ipow(q, 2 - r + m) / (e * f)
    terminator = ipow(q, -m)
    a_uppers = (a, b, c, d, e, f, seventh, terminator)
    a_lowers = (q, a * q / b, a * q / c, a * q / d, a * q / e, a * q / f,
                e * f * ipow(q, r - 1 - m) / lam, a * ipow(q, 1 + m))
    with _tag_pole("series"):
        lhs = _ordered_tuple_sum(a, a_uppers, a_lowers, m, r, q, ctx)
    lam_uppers = (lam, lam * b / a, lam * c / a, lam * d / a, e, f,
                  seventh, terminator)
    # Seventh denominator parameter: ef q^{r-1-m} / a, the pairing
    # partner lam q / seventh (see the module docstring).
    lam_lowers = (q, a * q / b, a * q / c, a * q / d, lam * q / e,
                  lam * q / f, e * f * ipow(q, r - 1 - m) / a,
                  lam * ipow(q, 1 + m))
    with _tag_pole("product"):
        prefactor = ipow(q, 0)
        for i in range(1, r + 1):
            num = _numerator_factorials((b, c, d, e * f / a), i - 1, q,
                                        ctx)
            den = _denominator_factorials(
                (lam * b / a, lam * c / a, lam * d / a, e * f / lam),
                i - 1, q, ctx)
            prefactor = prefactor * num / den
        for i in range(1, r + 1):
            num = (_numerator_factorials((a * q,), m, q, ctx)
                   * _numerator_factorials((a * q / (e * f),),
                                           m + 1 - r, q, ctx)
                   * _numerator_factorials((lam * q / e, lam * q / f),
                                           m + 1 - i, q, ctx))
            den = (_denominator_factorials((lam * q,), m, q, ctx)
                   * _denominator_factorials((lam * q / (e * f),),
                                             m + 1 - r, q, ctx)
                   * _denominator_factorials((a * q / e, a * q / f),
                                             m + 1 - i, q, ctx))
            prefactor = prefactor * num / den
        partner = _ordered_tuple_sum(lam, lam_uppers, lam_lowers, m, r,
                                     q, ctx)
    return lhs, prefactor * partner
