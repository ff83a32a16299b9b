"""Closed-form products for path generating functions.

The point-to-point generating function of elliptically weighted paths
factors completely into quotients of theta shifted factorials times an
integer power of q. This module evaluates that product (the elliptic
binomial coefficient), its classical q-binomial degeneration, a theta
determinant evaluation used to factor families, and the six factored
determinant formulas for nonintersecting families whose starting or
end points line up on an antidiagonal, a horizontal, or a vertical.

Every formula is assembled from integer exponents computed exactly and
a single list of (coeff, shift, order) factorial factors standing for
(coeff * q^shift; q, p)_order. Factors of negative order are first
normalized across the fraction bar via

    (x; q, p)_{-N} = 1 / (x q^{-N}; q, p)_N,

so that structural zeros (impossible path configurations) surface as
exact zeros of numerator theta factors rather than divisions by zero,
while genuine parameter collisions in the denominator raise PoleError.
A factor whose base is the stored degenerate zero of a parameter set
contributes 1, matching the p = 0 limit of the weight it came from.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .errors import DomainError, PoleError
from .paths import LatticePoint, PointTuple
from .theta import Nome, ThetaContext, ipow, theta
from .weights import EllipticParams, check_context

_Q_BINOMIAL_GUARD = 1e-12


def _pochhammer_q(q, n: int):
    """(q; q)_n for n >= 0."""
    acc = ipow(q, 0)
    for j in range(1, n + 1):
        acc = acc * (1 - ipow(q, j))
    return acc


def q_binomial(n: int, k: int, q):
    """The q-binomial coefficient (q;q)_n / ((q;q)_k (q;q)_{n-k}).

    Defined for 0 <= k <= n. Near a root of unity the factorial
    quotient degenerates to 0/0; in that regime the Pascal recursion,
    which is polynomial in q, is used instead.
    """
    if k < 0 or n < 0 or k > n:
        raise DomainError(f"q_binomial needs 0 <= k <= n, got n={n}, k={k}")
    if k == 0 or k == n:
        return ipow(q, 0)
    den_k = _pochhammer_q(q, k)
    den_nk = _pochhammer_q(q, n - k)
    if min(abs(den_k), abs(den_nk)) > _Q_BINOMIAL_GUARD:
        return _pochhammer_q(q, n) / (den_k * den_nk)
    row = [ipow(q, 0)]
    for i in range(1, n + 1):
        nxt = [row[0]]
        for j in range(1, i):
            nxt.append(row[j] + row[j - 1] * ipow(q, i - j))
        nxt.append(row[-1] if i > 1 else row[0])
        row = nxt
    return row[k]


def _product_ratio(num, den, q, ctx: ThetaContext):
    """Evaluate prod (c q^s; q, p)_order over num divided by the same over den.

    num and den are sequences of (coeff, shift, order) triples standing
    for the factorial (coeff * q^shift; q, p)_order, with integer shift
    and integer order of either sign. Negative orders are normalized to
    positive orders on the opposite side of the fraction bar first.
    Zero coefficients (stored degenerate parameters, only legal at
    p = 0) contribute 1. The shift is kept in integer arithmetic so a
    factor landing exactly on theta(q^0) = theta(1) = 0 is recognized
    structurally: in the numerator it gives an exact zero, in the
    denominator it raises PoleError, as does any denominator theta
    whose magnitude falls below ctx.guard_eps.
    """
    top, bottom = [], []
    for side_in, same, other in ((num, top, bottom), (den, bottom, top)):
        for coeff, shift, order in side_in:
            if order >= 0:
                same.append((coeff, shift, order))
            else:
                other.append((coeff, shift + order, -order))
    denominator = ipow(q, 0)
    for coeff, shift, order in bottom:
        if coeff == 0:
            continue
        for j in range(order):
            if coeff == 1 and shift + j == 0:
                raise PoleError(
                    "theta(1) factor in a closed-form denominator",
                    factor=f"theta(q^0) from (q^{shift}; q, p)_{order}")
            t = theta(coeff * ipow(q, shift + j), ctx)
            if abs(t) <= ctx.guard_eps:
                raise PoleError(
                    "theta factor vanished in a closed-form denominator",
                    factor=f"theta({coeff!r} * q^{shift + j})")
            denominator = denominator * t
    for coeff, shift, order in top:
        if coeff == 1 and 0 <= -shift < order:
            return 0.0 * ipow(q, 0)
    numerator = ipow(q, 0)
    for coeff, shift, order in top:
        if coeff == 0:
            continue
        for j in range(order):
            numerator = numerator * theta(coeff * ipow(q, shift + j), ctx)
    return numerator / denominator


@dataclass(frozen=True)
class EllipticBinomialArgs:
    """Corners (l, k) -> (n, m) of a path rectangle plus edge parameters."""

    l: int
    k: int
    n: int
    m: int
    params: EllipticParams

    def __post_init__(self):
        if self.n - self.l + self.m - self.k < 0:
            raise DomainError(
                f"need n - l + m - k >= 0, got "
                f"({self.l}, {self.k}) -> ({self.n}, {self.m})")


def elliptic_binomial(args: EllipticBinomialArgs, ctx: ThetaContext):
    """Fully factored generating function of paths (l, k) -> (n, m).

    Agrees with the brute-force and recursive path sums; vanishes
    exactly when no path exists (k > m, or l > n with m >= k).
    """
    check_context(args.params, ctx)
    l, k, n, m = args.l, args.k, args.n, args.m
    a, b, q = args.params.a, args.params.b, args.params.q
    if args.params.is_q_weight:
        if n < l or m < k:
            return ipow(q, 0) * 0
        return q_binomial(n - l + m - k, n - l, q) * ipow(q, (n - l) * k)
    ab = a / b
    num = [
        (1, 1 + n - l, m - k),
        (a, 1 + n + 2 * k, m - k),
        (b, 1 + n + k + l, m - k),
        (ab, 1 + k - n, m - k),
        (a, 1 + l + 2 * k, n - l),
        (ab, 1 - n, n - l),
        (ab, -n, n - l),
        (b, 1 + 2 * l, 2 * (n - l)),
    ]
    den = [
        (1, 1, m - k),
        (a, 1 + l + 2 * k, m - k),
        (b, 1 + 2 * n + k, m - k),
        (ab, 1 + k - l, m - k),
        (a, 1 + l, n - l),
        (ab, 1 + k - n, n - l),
        (ab, k - n, n - l),
        (b, 1 + k + 2 * l, 2 * (n - l)),
    ]
    return ipow(q, (n - l) * k) * _product_ratio(num, den, q, ctx)


@dataclass(frozen=True)
class WarnaarDetArgs:
    """Data of the theta determinant evaluation.

    The matrix whose determinant is evaluated has entries

        (A X_i, A C / X_i; q, p)_{r-j} / (B X_i, B C / X_i; q, p)_{r-j}

    for 1 <= i, j <= r. An explicit q is part of the data; the nome
    defaults to the evaluation context's.
    """

    A: complex
    B: complex
    C: complex
    X: tuple
    q: complex
    p: Nome | None = None

    def __post_init__(self):
        object.__setattr__(self, "X", tuple(self.X))
        if len(self.X) < 1:
            raise DomainError("need at least one X value")
        if any(x == 0 for x in (self.A, self.B, self.C, self.q, *self.X)):
            raise DomainError("A, B, C, q, and all X entries must be nonzero")


def warnaar_det_rhs(args: WarnaarDetArgs, ctx: ThetaContext):
    """Closed form of the theta determinant described by args."""
    if args.p is not None and args.p.p != ctx.p:
        raise DomainError(
            f"context nome {ctx.p!r} differs from argument nome {args.p.p!r}")
    A, B, C, X, q = args.A, args.B, args.C, args.X, args.q
    r = len(X)
    value = ipow(A, comb(r, 2)) * ipow(q, comb(r, 3))
    for i in range(r):
        for j in range(i + 1, r):
            value = value * X[j] * theta(X[i] / X[j], ctx) \
                * theta(C / (X[i] * X[j]), ctx)
    num, den = [], []
    for i in range(1, r + 1):
        num.append((B / A, 0, i - 1))
        num.append((A * B * C, 2 * r - 2 * i, i - 1))
        den.append((B * X[i - 1], 0, r - 1))
        den.append((B * C / X[i - 1], 0, r - 1))
    return value * _product_ratio(num, den, q, ctx)


_VARIANT_BASES = {
    "a": ("l", "k", "n"),
    "b": ("l", "k", "m"),
    "c": ("l", "k", "m"),
    "d": ("l", "n", "m"),
    "e": ("k", "n", "m"),
    "f": ("k", "n", "m"),
}

_VARIANT_ASCENDING = {"a": False, "b": True, "c": True,
                      "d": False, "e": True, "f": True}


@dataclass(frozen=True)
class DetFormulaVariant:
    """One of the six factored family determinants.

    indices holds the per-path integers: end ordinates m_i for tag a,
    end abscissas n_i for tags b and c, start ordinates k_i for tag d,
    start abscissas l_i for tags e and f. The base fields not used by a
    tag stay None.
    """

    tag: str
    indices: tuple
    l: int | None = None
    k: int | None = None
    n: int | None = None
    m: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(self.indices))
        if self.tag not in _VARIANT_BASES:
            raise DomainError(f"unknown variant tag {self.tag!r}")
        if not self.indices:
            raise DomainError("need at least one index")
        for name in _VARIANT_BASES[self.tag]:
            if getattr(self, name) is None:
                raise DomainError(f"variant {self.tag!r} needs field {name}")
        seq = self.indices
        if _VARIANT_ASCENDING[self.tag]:
            ok = all(x <= y for x, y in zip(seq, seq[1:]))
        else:
            ok = all(x >= y for x, y in zip(seq, seq[1:]))
        if not ok:
            raise DomainError(
                f"indices for variant {self.tag!r} must be "
                f"{'nondecreasing' if _VARIANT_ASCENDING[self.tag] else 'nonincreasing'}")
        l, k, n, m = self.l, self.k, self.n, self.m
        if self.tag == "a":
            feasible = all(n - l + mi - k >= 0 for mi in seq)
        elif self.tag == "b":
            feasible = all(ni - l + m - k >= 0 for ni in seq)
        elif self.tag == "c":
            feasible = m - l - k >= 0
        elif self.tag == "d":
            feasible = all(n - l + m - ki >= 0 for ki in seq)
        elif self.tag == "e":
            feasible = all(n - li + m - k >= 0 for li in seq)
        else:
            feasible = n + m - k >= 0
        if not feasible:
            raise DomainError(
                f"variant {self.tag!r} feasibility hypothesis violated")

    @property
    def r(self) -> int:
        return len(self.indices)


def det_formula_points(variant: DetFormulaVariant):
    """Start and end tuples of the path family the variant describes.

    Entry pairing is positional: path i runs from the i-th start to the
    i-th end. The tuples are returned in the general configuration
    since the per-path indices need not be consecutive.
    """
    r = variant.r
    l, k, n, m = variant.l, variant.k, variant.n, variant.m
    seq = variant.indices
    if variant.tag in ("a", "b", "c"):
        starts = tuple(LatticePoint(l + i, k - i) for i in range(1, r + 1))
    elif variant.tag == "d":
        starts = tuple(LatticePoint(l, ki) for ki in seq)
    elif variant.tag == "e":
        starts = tuple(LatticePoint(li, k) for li in seq)
    else:
        starts = tuple(LatticePoint(li, k - li) for li in seq)
    if variant.tag == "a":
        ends = tuple(LatticePoint(n, mi) for mi in seq)
    elif variant.tag == "b":
        ends = tuple(LatticePoint(ni, m) for ni in seq)
    elif variant.tag == "c":
        ends = tuple(LatticePoint(ni, m - ni) for ni in seq)
    else:
        ends = tuple(LatticePoint(n + i, m - i) for i in range(1, r + 1))
    return PointTuple(starts), PointTuple(ends)


def _det_parts(variant: DetFormulaVariant, a, b, q, ab):
    """Integer prefactor exponent, pairwise theta arguments, and the
    (base, order) factor lists of the variant's right-hand product."""
    r = variant.r
    l, k, n, m = variant.l, variant.k, variant.n, variant.m
    seq = variant.indices
    pairwise, num, den = [], [], []
    if variant.tag == "a":
        exponent = (3 * comb(r + 1, 3) + comb(r + 2, 3) + r * (n - l) * k
                    - (n - l) * comb(r + 1, 2) - r * r * k
                    + sum((i - 1) * seq[i - 1] for i in range(1, r + 1)))
        for i in range(1, r + 1):
            for j in range(i + 1, r + 1):
                mi, mj = seq[i - 1], seq[j - 1]
                pairwise.append(ipow(q, mi - mj))
                pairwise.append(a * ipow(q, 1 + n + mi + mj))
        for i in range(1, r + 1):
            mi = seq[i - 1]
            o = mi - k + i
            num += [(1, 1 + n - l - i, o),
                    (a, 1 + n + 2 * k - r - i, o),
                    (a, 1 + l + 2 * k - i, n - l - r),
                    (b, 2 + n + k + l - i, o),
                    (b, 1 + 2 * l + 2 * i, 2 * (n - l) - 2 * i),
                    (ab, 1 + k - n - i, o),
                    (ab, 1 - n, n - l - i),
                    (ab, -n, n - l - i)]
            den += [(1, 1, mi - k + r),
                    (a, 1 + l + 2 * k - i, o),
                    (a, 1 + l + i, n - l - i),
                    (b, 1 + 2 * n + k - i, o),
                    (b, 1 + 2 * l + k + i, 2 * (n - l) - 2 * i),
                    (ab, k - l - i, o),
                    (ab, 1 + k - n - i, n - l - i),
                    (ab, k - n - i, n - l - i)]
    elif variant.tag == "b":
        exponent = (2 * comb(r + 1, 3) + (l - k + 1) * comb(r + 1, 2)
                    - r * l * k
                    + sum((k - i) * seq[i - 1] for i in range(1, r + 1)))
        for i in range(1, r + 1):
            for j in range(i + 1, r + 1):
                ni, nj = seq[i - 1], seq[j - 1]
                pairwise.append(ipow(q, nj - ni))
                pairwise.append(b * ipow(q, 1 + m + ni + nj))
        for i in range(1, r + 1):
            ni = seq[i - 1]
            num += [(1, ni - l, m - k + 1),
                    (a, ni + 2 * k - i, m - k + 1 - r + i),
                    (a, l + 2 * k, ni - l - i),
                    (b, 1 + ni + k + l, m - k + 1),
                    (b, 1 + 2 * l + 2 * i, 2 * ni - 2 * l - 2 * i),
                    (ab, k - ni, m - k + 1),
                    (ab, 1 - ni, ni - l - i),
                    (ab, -ni, ni - l - i)]
            den += [(1, 1, m - k + i),
                    (a, l + 2 * k, m - k + 1 - r + i),
                    (a, 1 + l + i, ni - l - i),
                    (b, 1 + 2 * ni + k - i, m - k + i),
                    (b, 1 + 2 * l + k + i, 2 * ni - 2 * l - 2 * i),
                    (ab, k - l - i, m - k + 1),
                    (ab, k - ni, ni - l + 1 - 2 * i),
                    (ab, k - r - ni, ni - l + r - 2 * i)]
    elif variant.tag == "c":
        exponent = (2 * comb(r + 1, 3) + (l - k + 1) * comb(r + 1, 2)
                    - r * l * k
                    + sum((k - i) * seq[i - 1] for i in range(1, r + 1)))
        for i in range(1, r + 1):
            for j in range(i + 1, r + 1):
                ni, nj = seq[i - 1], seq[j - 1]
                pairwise.append(ipow(q, nj - ni))
                pairwise.append(ab * ipow(q, m - ni - nj))
        for i in range(1, r + 1):
            ni = seq[i - 1]
            o = m - ni - k + i
            num += [(1, ni - l, o),
                    (a, ni + 2 * k - i, m - ni - k + 1),
                    (a, l + 2 * k, ni - l - i),
                    (b, 1 + ni + k + l, o),
                    (b, 1 + 2 * l + 2 * i, 2 * ni - 2 * l - 2 * i),
                    (ab, 1 + k - ni - i, o),
                    (ab, 1 - ni, ni - l - i),
                    (ab, -ni, ni - l - i)]
            den += [(1, 1, m - ni - k + r),
                    (a, l + 2 * k, m - ni - k + 1),
                    (a, 1 + l + i, ni - l - i),
                    (b, 1 + 2 * ni + k - i, o),
                    (b, 1 + 2 * l + k + i, 2 * ni - 2 * l - 2 * i),
                    (ab, k - l - i, o),
                    (ab, 1 + k - ni - i, ni - l - i),
                    (ab, k - r - ni, ni - l + r - 2 * i)]
    elif variant.tag == "d":
        exponent = sum((n - l + i) * seq[i - 1] for i in range(1, r + 1))
        for i in range(1, r + 1):
            for j in range(i + 1, r + 1):
                ki, kj = seq[i - 1], seq[j - 1]
                pairwise.append(ipow(q, ki - kj))
                pairwise.append(a * ipow(q, l + ki + kj))
        for i in range(1, r + 1):
            ki = seq[i - 1]
            num += [(1, 1 + n + i - l, m - ki - i),
                    (a, 1 + n + 2 * ki, m - ki),
                    (a, 1 + l + 2 * ki, n - l),
                    (b, 1 + n + ki + l + r, m - ki - r - 1 + i),
                    (b, 1 + 2 * l, 2 * (n - l) + 2 * i),
                    (ab, 1 + ki - n, m - ki - i - 1),
                    (ab, 1 - n - i, n - l + i),
                    (ab, -n - i, n - l + i)]
            den += [(1, 1, m - ki - 1),
                    (a, 1 + l + 2 * ki, m - ki - 1),
                    (a, 1 + l, n - l + i),
                    (b, 1 + 2 * n + ki, m - ki + i),
                    (b, 1 + 2 * l + ki, 2 * (n - l)),
                    (ab, 1 + ki - l, m - ki - i),
                    (ab, 1 + ki - n, n - l),
                    (ab, ki - r - n, n - l + r)]
    elif variant.tag == "e":
        # The comb(r, 3) term is a correction established by exact
        # rational evaluation of both sides; see TRANSCRIPTION.md.
        exponent = ((n + r + k) * comb(r, 2) + (n + 1) * r * k - comb(r, 3)
                    - sum((k + i - 1) * seq[i - 1] for i in range(1, r + 1)))
        for i in range(1, r + 1):
            for j in range(i + 1, r + 1):
                li, lj = seq[i - 1], seq[j - 1]
                pairwise.append(ipow(q, lj - li))
                pairwise.append(b * ipow(q, k + li + lj))
        for i in range(1, r + 1):
            li = seq[i - 1]
            num += [(1, 1 + n + r - li, m - k - r),
                    (a, 1 + n + 2 * k + i, m - k - 1),
                    (a, 1 + li + 2 * k, n + i - li),
                    (b, 1 + n + k + r + li, m - k - r),
                    (b, 1 + 2 * li, 2 * n + 2 * i - 2 * li),
                    (ab, 1 + k - n - i, m - k - 1),
                    (ab, 1 - n - i, n + i - li),
                    (ab, -n - i, n + i - li)]
            den += [(1, 1, m - k - i),
                    (a, 1 + li + 2 * k, m - k - 1),
                    (a, 1 + li, n + i - li),
                    (b, 1 + 2 * n + k + 2 * i, m - k - i),
                    (b, 1 + k + 2 * li, 2 * n + 2 * i - 2 * li),
                    (ab, 1 + k - li, m - k - 1),
                    (ab, 1 + k - n - i, n + i - li),
                    (ab, k - n - i, n + i - li)]
    else:
        exponent = (k * comb(r + 1, 2) + r * n * k
                    - sum((n + k + i - seq[i - 1]) * seq[i - 1]
                          for i in range(1, r + 1)))
        for i in range(1, r + 1):
            for j in range(i + 1, r + 1):
                li, lj = seq[i - 1], seq[j - 1]
                pairwise.append(ipow(q, lj - li))
                pairwise.append(ab * ipow(q, k - li - lj))
        for i in range(1, r + 1):
            li = seq[i - 1]
            num += [(1, 1 + n + r - li, m - k - r + li + i - 1),
                    (a, 1 + n + 2 * k - 2 * li, m - k + li),
                    (a, 1 + 2 * k - li, n - li),
                    (b, 1 + n + k + i, m - k + li - i),
                    (b, 1 + 2 * li, 2 * n + 2 * i - 2 * li),
                    (ab, 1 + k - n - li, m - k + li - i - 1),
                    (ab, 1 - n - i, n + i - li),
                    (ab, -n - i, n + i - li)]
            den += [(1, 1, m - k + li - 1),
                    (a, 1 + 2 * k - li, m - k + li - i),
                    (a, 1 + li, n + i - li),
                    (b, 1 + 2 * n + k - li, m - k + li + i),
                    (b, 1 + k + li, 2 * (n - li)),
                    (ab, 1 + k - 2 * li, m - k + li - 1),
                    (ab, 1 + k - n - li, n - li),
                    (ab, k - n - r - li, n + r - li)]
    return exponent, pairwise, num, den


def det_formula(variant: DetFormulaVariant, params: EllipticParams,
                ctx: ThetaContext):
    """Factored generating function of the variant's path family.

    Equals the determinant of closed-form point-to-point entries over
    the start/end tuples from ``det_formula_points``, and hence the
    brute-force nonintersecting sum.
    """
    check_context(params, ctx)
    if params.b == 0:
        raise DomainError("the factored determinants need b != 0")
    a, b, q = params.a, params.b, params.q
    exponent, pairwise, num, den = _det_parts(variant, a, b, q, a / b)
    value = ipow(q, exponent)
    for x in pairwise:
        if x == 0:
            continue
        value = value * theta(x, ctx)
    return value * _product_ratio(num, den, q, ctx)
