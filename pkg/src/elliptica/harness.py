"""Randomized verification engine for the identity suites.

Every identity implemented by the library is wrapped in a named suite
that draws random complex parameters from a sampling domain, evaluates
both sides, and classifies the outcome.  The engine is deterministic:
each trial's random stream is derived by hashing (seed, suite_id,
trial_index, attempt), so suites are independent of each other and of
execution order, and a fixed seed reproduces every outcome bit for bit.

Classification rules:

* a trial whose relative error is within the suite tolerance is a
  ``pass``; otherwise it is a ``fail``;
* a trial that hits a pole (a vanishing theta factor in a denominator)
  is recorded as ``resampled_pole`` and retried with a fresh derived
  stream, up to the domain's resample limit; poles never count as
  failures;
* a trial that exceeds a brute-force scale cap is recorded as
  ``skipped_scale`` and not retried;
* if every attempt for one trial hits a pole, the domain is considered
  degenerate and the suite aborts with an error.

Each suite also has a mutation mode that perturbs one parameter off
the identity's variety by one part in a thousand.  A healthy suite
must fail under mutation; this guards against vacuous comparisons.

Relative error uses the floor max(|lhs|, |rhs|, 1e-300) so that
identically-zero sides compare as exactly equal rather than 0/0.
The condition flag marks trials whose largest scanned summand or
matrix entry exceeds 1e12 times the result magnitude; such trials
keep their pass/fail status but are candidates for an
extended-precision rerun (the escalation path threads context options
such as a tighter theta truncation through ``ctx_opts``).
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass

from ._linalg import det
from .closed_forms import (
    DetFormulaVariant,
    EllipticBinomialArgs,
    WarnaarDetArgs,
    det_formula,
    det_formula_points,
    elliptic_binomial,
    warnaar_det_rhs,
)
from .errors import DomainError, PoleError, ScaleError
from .multivariate import (
    ConvolutionSpec,
    MultiSumSpec,
    multivariate_ft_sum,
    multivariate_ft_transform,
    verify_convolution,
)
from .paths import (
    LatticePoint,
    PointTuple,
    enumerate_nonintersecting,
    gf_bruteforce,
    lgv_determinant,
)
from .report import format_complex
from .series import (
    VSeriesSpec,
    basic_degenerations,
    eval_V,
    frenkel_turaev_sum,
    frenkel_turaev_transform,
    indefinite_vwp_sum,
)
from .theta import (
    Nome,
    ThetaContext,
    ipow,
    qp_shifted,
    theta,
    theta_multi,
)
from .weights import (
    EllipticParams,
    ShiftOffset,
    shifted_weight,
    weight,
)

DEFAULT_SEED = 28
REL_FLOOR = 1e-300
CONDITION_RATIO_LIMIT = 1e12
MUTATION_SCALE = 1.0 + 1e-3

STATUS_PASS = "pass"
STATUS_FAIL = "fail"
STATUS_RESAMPLED = "resampled_pole"
STATUS_SKIPPED = "skipped_scale"


@dataclass(frozen=True)
class SamplingDomain:
    """Annulus ranges and nome cap for random parameter draws.

    Moduli are drawn uniformly from the closed intervals and phases
    uniformly from the circle.  p_modulus_max = 0 pins the nome to
    exactly zero (the basic q-series regime); otherwise the nome
    modulus is uniform on [0, p_modulus_max].  ``pinned`` holds
    (name, value) pairs that freeze individual draws to fixed complex
    values, which is how adversarial domains (say q at a root of
    unity) are built.
    """

    a_range: tuple = (0.5, 2.0)
    b_range: tuple = (0.5, 2.0)
    q_range: tuple = (0.5, 2.0)
    p_modulus_max: float = 0.5
    resample_limit: int = 50
    pinned: tuple = ()

    def __post_init__(self):
        for label, rng_pair in (("a", self.a_range), ("b", self.b_range),
                                ("q", self.q_range)):
            lo, hi = rng_pair
            if not 0 < lo <= hi:
                raise DomainError(
                    f"{label}_range must satisfy 0 < lo <= hi, got {rng_pair}")
        if not 0 <= self.p_modulus_max < 1:
            raise DomainError(
                f"p_modulus_max must lie in [0, 1), got {self.p_modulus_max}")
        if self.resample_limit < 1:
            raise DomainError("resample_limit must be positive")
        object.__setattr__(
            self, "pinned",
            tuple((str(name), complex(value)) for name, value in self.pinned))

    def _pinned_value(self, name: str):
        for pin_name, value in self.pinned:
            if pin_name == name:
                return value
        return None

    def draw(self, name: str, rng: random.Random) -> complex:
        """One annulus draw; a, b, q use their own ranges, others a's."""
        pin = self._pinned_value(name)
        if pin is not None:
            return pin
        lo, hi = {"a": self.a_range, "b": self.b_range,
                  "q": self.q_range}.get(name, self.a_range)
        modulus = rng.uniform(lo, hi)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        return complex(modulus * math.cos(phase), modulus * math.sin(phase))

    def draw_nome_value(self, rng: random.Random) -> complex:
        pin = self._pinned_value("p")
        if pin is not None:
            return pin
        if self.p_modulus_max == 0:
            return 0j
        modulus = rng.uniform(0.0, self.p_modulus_max)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        return complex(modulus * math.cos(phase), modulus * math.sin(phase))

    def nome_cap(self) -> float:
        """Cap passed to Nome; leaves headroom above p_modulus_max."""
        return max(0.9, (self.p_modulus_max + 1.0) / 2.0)


@dataclass(frozen=True)
class TrialOutcome:
    """One classified trial: identity, derived seed, both sides, status."""

    identity_id: str
    seed: int
    trial_index: int
    params: str
    lhs: complex
    rhs: complex
    rel_error: float
    status: str
    condition_flag: bool


@dataclass(frozen=True)
class SuiteConfig:
    """Suite selection plus optional overrides of registry defaults.

    Fields left at None fall back to the registered suite's defaults.
    """

    suite_id: str
    trials: int | None = None
    tolerance: float | None = None
    m_max: int | None = None
    r_max: int | None = None
    grid_max: int | None = None
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.trials is not None and self.trials < 0:
            raise DomainError("trials must be nonnegative")
        if self.tolerance is not None and not 0 < self.tolerance < 1:
            raise DomainError(
                f"tolerance must lie in (0, 1), got {self.tolerance}")
        if self.m_max is not None and not 0 <= self.m_max <= 16:
            raise DomainError("m_max must lie in [0, 16]")
        if self.r_max is not None and not 1 <= self.r_max <= 4:
            raise DomainError("r_max must lie in [1, 4]")
        if self.grid_max is not None and not 1 <= self.grid_max <= 8:
            raise DomainError("grid_max must lie in [1, 8]")


@dataclass(frozen=True)
class _Settings:
    """Resolved per-run size caps handed to the trial runners."""

    m_max: int
    r_max: int
    grid_max: int


def _derive_seed(seed: int, suite_id: str, trial_index: int,
                 attempt: int) -> int:
    text = f"{seed}|{suite_id}|{trial_index}|{attempt}"
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _rel_error(lhs, rhs) -> float:
    denom = max(abs(lhs), abs(rhs), REL_FLOOR)
    return abs(lhs - rhs) / denom


def _worst(checks):
    """The (lhs, rhs) pair with the largest relative error."""
    top = None
    top_err = -1.0
    for lhs, rhs in checks:
        err = _rel_error(lhs, rhs)
        if err > top_err:
            top_err = err
            top = (lhs, rhs)
    return top


def _fmt(**items) -> str:
    parts = []
    for name, value in items.items():
        if isinstance(value, (bool, int, str)):
            parts.append(f"{name}={value}")
        else:
            parts.append(f"{name}={format_complex(complex(value))}")
    return "; ".join(parts)


def _make_context(nome: Nome, ctx_opts) -> ThetaContext:
    return ThetaContext(nome, **dict(ctx_opts or {}))


class _LiftedDomain:
    """Domain proxy whose annulus draws are lifted to another backend.

    The wrapped domain draws the same binary64 values from the same
    stream; the lift (an exact conversion such as mpmath.mpc) only
    changes the arithmetic used downstream.  The nome stays a plain
    complex, which every evaluation mixes in exactly.
    """

    def __init__(self, inner: SamplingDomain, lift):
        self._inner = inner
        self._lift = lift

    @property
    def resample_limit(self):
        return self._inner.resample_limit

    def draw(self, name, rng):
        return self._lift(self._inner.draw(name, rng))

    def draw_nome_value(self, rng):
        return self._inner.draw_nome_value(rng)

    def nome_cap(self):
        return self._inner.nome_cap()


def _draw_nome_ctx(rng, dom: SamplingDomain, ctx_opts):
    value = dom.draw_nome_value(rng)
    nome = Nome(value, dom.nome_cap())
    return value, nome, _make_context(nome, ctx_opts)


def _draw_params(rng, dom: SamplingDomain, ctx_opts):
    a = dom.draw("a", rng)
    b = dom.draw("b", rng)
    q = dom.draw("q", rng)
    _, nome, ctx = _draw_nome_ctx(rng, dom, ctx_opts)
    return EllipticParams(a, b, q, nome), ctx


def _scaled_a(params: EllipticParams, factor) -> EllipticParams:
    return EllipticParams(params.a * factor, params.b, params.q, params.p)


def _term_scale(special, uppers, lowers, terms, q, ctx):
    """Largest summand magnitude of a theta-factorial single sum.

    Mirrors the term shape ratio(k) * prod(uppers)_k / prod(lowers)_k
    * q^k, where ratio is the very-well-poised theta quotient when
    ``special`` is given.  Returns None when the scan itself hits a
    zero (the main evaluation has already succeeded at that point, so
    a scan failure only means the flag is unavailable).
    """
    try:
        base = abs(theta(special, ctx)) if special is not None else 1.0
        if base == 0:
            return None
        num = 1.0
        den = 1.0
        top = 0.0
        qk = 1.0
        for k in range(terms + 1):
            ratio = 1.0
            if special is not None:
                ratio = abs(theta(special * ipow(q, 2 * k), ctx)) / base
            top = max(top, ratio * num / den * qk)
            qk *= abs(q)
            for x in uppers:
                num *= abs(theta(x * ipow(q, k), ctx))
            for x in lowers:
                scale = abs(theta(x * ipow(q, k), ctx))
                if scale == 0:
                    return None
                den *= scale
        return top
    except (DomainError, PoleError, ZeroDivisionError, OverflowError):
        return None


# --- Suite runners -------------------------------------------------
#
# Each runner draws its parameters from the domain in a fixed order,
# evaluates one random instance of its identity, and returns
# (lhs, rhs, params_string, scale).  ``scale`` is the largest scanned
# summand or matrix entry when one is available, else None.  With
# mutate=True the runner perturbs one parameter by MUTATION_SCALE on
# one side only, which must push the comparison off the identity.


def _run_theta_laws(rng, dom, st, ctx_opts, mutate):
    x = dom.draw("x", rng)
    y = dom.draw("y", rng)
    u = dom.draw("u", rng)
    v = dom.draw("v", rng)
    p, _, ctx = _draw_nome_ctx(rng, dom, ctx_opts)
    checks = [(theta(x, ctx), -x * theta(1 / x, ctx))]
    if p != 0:
        checks.append((theta(p * x, ctx), -(1 / x) * theta(x, ctx)))
    um = u * MUTATION_SCALE if mutate else u
    # The addition formula is recorded in three-term form, comparing
    # the lone product against the sum of the other two; the two-sided
    # difference form hides an O(1) term scale behind cancellation and
    # spoils the relative-error denominator.
    first = theta_multi((x * y, x / y, u * v, u / v), ctx)
    second = theta_multi((x * v, x / v, u * y, u / y), ctx)
    third = (um / y) * theta_multi((y * v, y / v, x * um, x / um), ctx)
    checks.append((first, second + third))
    lhs, rhs = _worst(checks)
    return lhs, rhs, _fmt(x=x, y=y, u=u, v=v, p=p), None


def _run_factorial_laws(rng, dom, st, ctx_opts, mutate):
    a = dom.draw("a", rng)
    q = dom.draw("q", rng)
    p, _, ctx = _draw_nome_ctx(rng, dom, ctx_opts)
    span = max(1, st.m_max)
    n = rng.randint(-span, span)
    k = rng.randint(-span, span)
    if mutate and k == 0:
        k = 1
    factor = MUTATION_SCALE if mutate else 1.0
    lhs = qp_shifted(a, n + k, q, ctx)
    rhs = (qp_shifted(a, n, q, ctx)
           * qp_shifted(a * ipow(q, n) * factor, k, q, ctx))
    return lhs, rhs, _fmt(a=a, q=q, p=p, n=n, k=k), None


def _run_weight_laws(rng, dom, st, ctx_opts, mutate):
    params, ctx = _draw_params(rng, dom, ctx_opts)
    n = rng.randint(-3, 3)
    m = rng.randint(1, 3) if mutate else rng.randint(-3, 3)
    factor = MUTATION_SCALE if mutate else 1.0
    p = params.p.p
    checks = []
    base = weight(n, m, params, ctx)
    if p != 0:
        shifted_a = EllipticParams(p * params.a * factor, params.b,
                                   params.q, params.p)
        shifted_b = EllipticParams(params.a, p * params.b * factor,
                                   params.q, params.p)
        checks.append((base, weight(n, m, shifted_a, ctx)))
        checks.append((base, weight(n, m, shifted_b, ctx)))
    east_args = EllipticBinomialArgs(n - 1, m, n, m,
                                     _scaled_a(params, factor))
    checks.append((base, elliptic_binomial(east_args, ctx)))
    nome0 = Nome(0j)
    ctx0 = _make_context(nome0, ctx_opts)
    q_only = EllipticParams(0j, 0j, params.q * factor, nome0)
    checks.append((weight(n, m, q_only, ctx0), ipow(params.q, m)))
    lhs, rhs = _worst(checks)
    return lhs, rhs, _fmt(a=params.a, b=params.b, q=params.q, p=p,
                          n=n, m=m), None


def _run_theorem2_oracle(rng, dom, st, ctx_opts, mutate):
    params, ctx = _draw_params(rng, dom, ctx_opts)
    cap = min(st.grid_max, 6)
    l = rng.randint(-2, 2)
    k = rng.randint(1, 2) if mutate else rng.randint(-2, 2)
    dx = rng.randint(1 if mutate else 0, cap)
    dy = rng.randint(0, cap)
    if dx + dy == 0:
        dy = 1
    n, m = l + dx, k + dy
    brute_params = _scaled_a(params, MUTATION_SCALE) if mutate else params
    lhs = elliptic_binomial(EllipticBinomialArgs(l, k, n, m, params), ctx)
    rhs = gf_bruteforce(LatticePoint(l, k), LatticePoint(n, m),
                        brute_params, ctx)
    return lhs, rhs, _fmt(a=params.a, b=params.b, q=params.q, p=params.p.p,
                          l=l, k=k, n=n, m=m), None


def _run_recursions(rng, dom, st, ctx_opts, mutate):
    params, ctx = _draw_params(rng, dom, ctx_opts)
    factor = MUTATION_SCALE if mutate else 1.0
    mparams = _scaled_a(params, factor)
    l = rng.randint(-2, 2)
    k = rng.randint(1, 2) if mutate else rng.randint(-2, 2)
    dx = rng.randint(1 if mutate else 0, 3)
    dy = rng.randint(1 if mutate else 0, 3)
    if dx + dy == 0:
        dx = 1
    n, m = l + dx, k + dy
    checks = []
    whole = elliptic_binomial(EllipticBinomialArgs(l, k, n, m, params), ctx)
    north = elliptic_binomial(EllipticBinomialArgs(l, k, n, m - 1, params),
                              ctx)
    east = elliptic_binomial(EllipticBinomialArgs(l, k, n - 1, m, params),
                             ctx)
    checks.append((whole, north + east * weight(n, m, mparams, ctx)))
    first_east = elliptic_binomial(
        EllipticBinomialArgs(l + 1, k, n, m, params), ctx)
    first_north = elliptic_binomial(
        EllipticBinomialArgs(l, k + 1, n, m, params), ctx)
    checks.append((whole,
                   first_east * weight(l + 1, k, mparams, ctx) + first_north))
    s = rng.randint(-2, 2)
    t = rng.randint(-2, 2)
    nn = rng.randint(-2, 3)
    mm = rng.randint(1, 3) if mutate else rng.randint(-2, 3)
    checks.append((
        weight(nn + s, mm + t, params, ctx),
        shifted_weight(nn, t, ShiftOffset(s, 0), params, ctx)
        * shifted_weight(nn, mm, ShiftOffset(s, t), mparams, ctx)))
    wref = weight(nn, mm, params, ctx)
    checks.append((wref, weight(-nn, -mm, mparams.reflected(), ctx)))
    checks.append((wref, weight(
        nn, mm,
        EllipticParams(1 / mparams.a, 1 / params.b, 1 / params.q, params.p),
        ctx)))
    lhs, rhs = _worst(checks)
    return lhs, rhs, _fmt(a=params.a, b=params.b, q=params.q, p=params.p.p,
                          l=l, k=k, n=n, m=m, s=s, t=t), None


def _antidiag(x0, y0, r):
    return PointTuple(
        tuple(LatticePoint(x0 + i, y0 - i) for i in range(1, r + 1)),
        "antidiagonal")


def _run_lgv_oracle(rng, dom, st, ctx_opts, mutate):
    params, ctx = _draw_params(rng, dom, ctx_opts)
    r = rng.randint(2, min(3, st.r_max))
    x0 = rng.randint(-1, 1)
    y0 = rng.randint(r + 1, r + 2) if mutate else rng.randint(-1, 1)
    dx = rng.randint(1, 3)
    dy = rng.randint(1, 3)
    starts = _antidiag(x0, y0, r)
    ends = _antidiag(x0 + dx, y0 + dy, r)
    det_params = _scaled_a(params, MUTATION_SCALE) if mutate else params
    lhs = lgv_determinant(starts, ends, det_params, ctx)
    rhs = enumerate_nonintersecting(starts, ends, params, ctx)
    return lhs, rhs, _fmt(a=params.a, b=params.b, q=params.q, p=params.p.p,
                          r=r, x0=x0, y0=y0, dx=dx, dy=dy), None


def _run_warnaar_det(rng, dom, st, ctx_opts, mutate):
    big_a = dom.draw("a", rng)
    big_b = dom.draw("b", rng)
    big_c = dom.draw("a", rng)
    q = dom.draw("q", rng)
    p, nome, ctx = _draw_nome_ctx(rng, dom, ctx_opts)
    r = rng.randint(2 if mutate else 1, min(4, st.r_max))
    xs = tuple(dom.draw("b", rng) for _ in range(r))
    rhs = warnaar_det_rhs(WarnaarDetArgs(big_a, big_b, big_c, xs, q, nome),
                          ctx)
    entry_b = big_b * MUTATION_SCALE if mutate else big_b
    scale = 0.0
    rows = []
    for x in xs:
        row = []
        for j in range(1, r + 1):
            num = (qp_shifted(big_a * x, r - j, q, ctx)
                   * qp_shifted(big_a * big_c / x, r - j, q, ctx))
            den = (qp_shifted(entry_b * x, r - j, q, ctx)
                   * qp_shifted(entry_b * big_c / x, r - j, q, ctx))
            if den == 0:
                raise PoleError("matrix entry denominator vanishes",
                                factor=f"({entry_b * x!r}; q, p)_{r - j}")
            entry = num / den
            scale = max(scale, abs(entry))
            row.append(entry)
        rows.append(row)
    lhs = det(rows)
    return lhs, rhs, _fmt(A=big_a, B=big_b, C=big_c, q=q, p=p, r=r), scale


_DET_CASES = {
    ("a", 1): dict(l=0, k=1, n=4, m=(5,)),
    ("a", 2): dict(l=-1, k=2, n=3, m=(6, 4)),
    ("a", 3): dict(l=0, k=0, n=4, m=(7, 5, 3)),
    ("b", 1): dict(l=0, k=1, n=(4,), m=5),
    ("b", 2): dict(l=-1, k=2, n=(3, 5), m=6),
    ("b", 3): dict(l=0, k=0, n=(3, 4, 6), m=7),
    ("c", 1): dict(l=0, k=1, n=(4,), m=7),
    ("c", 2): dict(l=-1, k=0, n=(2, 4), m=6),
    ("c", 3): dict(l=0, k=-1, n=(2, 3, 5), m=7),
    ("d", 1): dict(l=0, k=(1,), n=4, m=6),
    ("d", 2): dict(l=-1, k=(2, 0), n=3, m=6),
    ("d", 3): dict(l=0, k=(2, 0, -1), n=4, m=7),
    ("e", 1): dict(l=(0,), k=1, n=4, m=6),
    ("e", 2): dict(l=(0, 2), k=1, n=4, m=8),
    ("e", 3): dict(l=(0, 1, 3), k=0, n=5, m=9),
    ("f", 1): dict(l=(0,), k=1, n=4, m=6),
    ("f", 2): dict(l=(0, 2), k=3, n=4, m=9),
    ("f", 3): dict(l=(0, 1, 3), k=4, n=5, m=11),
}


def _build_variant(tag: str, r: int) -> DetFormulaVariant:
    case = _DET_CASES[tag, r]
    indices = next(v for v in case.values() if isinstance(v, tuple))
    fields = {key: (None if isinstance(val, tuple) else val)
              for key, val in case.items()}
    return DetFormulaVariant(tag=tag, indices=indices, **fields)


_VARIANTS = {key: _build_variant(*key) for key in _DET_CASES}


def _det_runner(tag: str):
    def run(rng, dom, st, ctx_opts, mutate):
        params, ctx = _draw_params(rng, dom, ctx_opts)
        r = rng.randint(1, min(3, st.r_max))
        variant = _VARIANTS[tag, r]
        starts, ends = det_formula_points(variant)
        closed_params = _scaled_a(params, MUTATION_SCALE) if mutate \
            else params
        scale = 0.0
        rows = []
        for v in ends.points:
            row = []
            for u in starts.points:
                entry = elliptic_binomial(
                    EllipticBinomialArgs(u.x, u.y, v.x, v.y, params), ctx)
                scale = max(scale, abs(entry))
                row.append(entry)
            rows.append(row)
        lhs = det(rows)
        rhs = det_formula(variant, closed_params, ctx)
        return lhs, rhs, _fmt(variant=tag, r=r, a=params.a, b=params.b,
                              q=params.q, p=params.p.p), scale
    return run


def _conv_runner(variant: str, order: int):
    def run(rng, dom, st, ctx_opts, mutate):
        params, ctx = _draw_params(rng, dom, ctx_opts)
        r = order
        l = rng.randint(-2, 2)
        k = rng.randint(r + 1, r + 2) if mutate else rng.randint(-2, 2)
        dx = rng.randint(r, r + 1)
        dy = rng.randint(r, r + 1)
        n, m = l + dx, k + dy
        if variant == "a":
            nu = rng.randint(l + r + 1, n + 1)
        elif variant == "b":
            nu = rng.randint(k, m - r)
        else:
            nu = rng.randint(l + k, n + m)
        spec = ConvolutionSpec(variant, l, k, n, m, r, nu)
        if mutate:
            lhs = verify_convolution(spec, params, ctx)[0]
            rhs = verify_convolution(
                spec, _scaled_a(params, MUTATION_SCALE), ctx)[1]
        else:
            lhs, rhs = verify_convolution(spec, params, ctx)
        return lhs, rhs, _fmt(variant=variant, r=r, l=l, k=k, n=n, m=m,
                              nu=nu, a=params.a, b=params.b, q=params.q,
                              p=params.p.p), None
    return run


def _run_windefsum(rng, dom, st, ctx_opts, mutate):
    a = dom.draw("a", rng)
    b = dom.draw("b", rng)
    c = dom.draw("b", rng)
    q = dom.draw("q", rng)
    p, _, ctx = _draw_nome_ctx(rng, dom, ctx_opts)
    m = rng.randint(1 if mutate else 0, min(10, st.m_max))
    lhs, rhs = indefinite_vwp_sum(a, b, c, m, q, None, ctx)
    if mutate:
        rhs = indefinite_vwp_sum(a, b * MUTATION_SCALE, c, m, q, None,
                                 ctx)[1]
    scale = _term_scale(a, (a, b, c, a / (b * c)),
                        (q, a * q / b, a * q / c, b * c * q), m, q, ctx)
    return lhs, rhs, _fmt(a=a, b=b, c=c, q=q, p=p, m=m), scale


def _run_ft_10v9(rng, dom, st, ctx_opts, mutate):
    a = dom.draw("a", rng)
    b = dom.draw("b", rng)
    c = dom.draw("b", rng)
    d = dom.draw("b", rng)
    q = dom.draw("q", rng)
    p, nome, ctx = _draw_nome_ctx(rng, dom, ctx_opts)
    m = rng.randint(1 if mutate else 0, min(8, st.m_max))
    e = a * a * ipow(q, 1 + m) / (b * c * d)
    lhs, rhs = frenkel_turaev_sum(a, b, c, d, m, q, None, ctx)
    if mutate:
        e = e * MUTATION_SCALE
        spec = VSeriesSpec(a1=a, rest=(b, c, d, e, ipow(q, -m)), q=q,
                           p=nome, terms=m, validate_balance=False)
        lhs = eval_V(spec, ctx)
    rest = (b, c, d, e, ipow(q, -m))
    scale = _term_scale(a, (a,) + rest,
                        (q,) + tuple(a * q / x for x in rest), m, q, ctx)
    return lhs, rhs, _fmt(a=a, b=b, c=c, d=d, q=q, p=p, m=m), scale


def _run_ft_12v11(rng, dom, st, ctx_opts, mutate):
    a = dom.draw("a", rng)
    b = dom.draw("b", rng)
    c = dom.draw("b", rng)
    d = dom.draw("b", rng)
    e = dom.draw("b", rng)
    f = dom.draw("b", rng)
    q = dom.draw("q", rng)
    p, nome, ctx = _draw_nome_ctx(rng, dom, ctx_opts)
    n = rng.randint(1 if mutate else 0, min(6, st.m_max))
    lam = a * a * q / (b * c * d)
    tail = lam * a * ipow(q, n + 1) / (e * f)
    lhs, rhs = frenkel_turaev_transform(a, b, c, d, e, f, n, q, None, ctx)
    if mutate:
        tail = tail * MUTATION_SCALE
        spec = VSeriesSpec(a1=a, rest=(b, c, d, e, f, tail, ipow(q, -n)),
                           q=q, p=nome, terms=n, validate_balance=False)
        lhs = eval_V(spec, ctx)
    rest = (b, c, d, e, f, tail, ipow(q, -n))
    scale = _term_scale(a, (a,) + rest,
                        (q,) + tuple(a * q / x for x in rest), n, q, ctx)
    return lhs, rhs, _fmt(a=a, b=b, c=c, d=d, e=e, f=f, q=q, p=p, n=n), scale


def _run_degenerations(rng, dom, st, ctx_opts, mutate):
    q = dom.draw("q", rng)
    p, _, ctx = _draw_nome_ctx(rng, dom, ctx_opts)
    kind = ("jackson_8phi7", "q_pfaff_saalschutz",
            "q_chu_vandermonde")[rng.randrange(3)]
    m = rng.randint(1 if mutate else 0, min(8, st.m_max))
    rhs_q = q
    if kind == "jackson_8phi7":
        pars = (dom.draw("a", rng), dom.draw("b", rng),
                dom.draw("b", rng), dom.draw("b", rng))
        mut_pars = (pars[0] * MUTATION_SCALE,) + pars[1:]
        detail = _fmt(kind=kind, a=pars[0], b=pars[1], c=pars[2], d=pars[3],
                      q=q, m=m)
    elif kind == "q_pfaff_saalschutz":
        b = dom.draw("b", rng)
        cut = rng.randint(1, 5)
        upper = rng.randint(cut, 5)
        pars = (b, cut, upper)
        mut_pars = (b * MUTATION_SCALE, cut, upper)
        detail = _fmt(kind=kind, b=b, l=cut, n=upper, q=q, m=m)
    else:
        cut = rng.randint(1, 6)
        upper = rng.randint(cut, 6)
        pars = (cut, upper)
        mut_pars = pars
        if mutate:
            rhs_q = q * MUTATION_SCALE
        detail = _fmt(kind=kind, l=cut, n=upper, q=q, m=m)
    lhs = basic_degenerations(kind, pars, m, q, ctx)[0]
    if mutate:
        rhs = basic_degenerations(kind, mut_pars, m, rhs_q, ctx)[1]
    else:
        rhs = basic_degenerations(kind, pars, m, q, ctx)[1]
    return lhs, rhs, detail, None


def _run_multivariate_sum(rng, dom, st, ctx_opts, mutate):
    a = dom.draw("a", rng)
    b = dom.draw("b", rng)
    c = dom.draw("b", rng)
    d = dom.draw("b", rng)
    q = dom.draw("q", rng)
    p, nome, ctx = _draw_nome_ctx(rng, dom, ctx_opts)
    r = rng.randint(1, min(3, st.r_max))
    low = max(1 if mutate else 0, r - 1)
    m = rng.randint(low, max(low, min(6, st.m_max)))
    spec = MultiSumSpec(a, b, c, d, m, r, q, nome)
    lhs, rhs = multivariate_ft_sum(spec, ctx)
    if mutate:
        mut = MultiSumSpec(a, b, c, d * MUTATION_SCALE, m, r, q, nome)
        rhs = multivariate_ft_sum(mut, ctx)[1]
    return lhs, rhs, _fmt(a=a, b=b, c=c, d=d, q=q, p=p, r=r, m=m), None


def _run_multivariate_transform(rng, dom, st, ctx_opts, mutate):
    a = dom.draw("a", rng)
    b = dom.draw("b", rng)
    c = dom.draw("b", rng)
    d = dom.draw("b", rng)
    e = dom.draw("b", rng)
    f = dom.draw("b", rng)
    q = dom.draw("q", rng)
    p, nome, ctx = _draw_nome_ctx(rng, dom, ctx_opts)
    r = rng.randint(1, min(3, st.r_max))
    low = max(1 if mutate else 0, r - 1)
    m = rng.randint(low, max(low, min(5, st.m_max)))
    spec = MultiSumSpec(a, b, c, d, m, r, q, nome, e, f)
    lhs, rhs = multivariate_ft_transform(spec, ctx)
    if mutate:
        mut = MultiSumSpec(a, b, c, d * MUTATION_SCALE, m, r, q, nome, e, f)
        rhs = multivariate_ft_transform(mut, ctx)[1]
    return lhs, rhs, _fmt(a=a, b=b, c=c, d=d, e=e, f=f, q=q, p=p,
                          r=r, m=m), None


# --- Registry ------------------------------------------------------

DEFAULT_DOMAIN = SamplingDomain()
ORACLE_DOMAIN = SamplingDomain((0.8, 1.25), (0.8, 1.25), (0.8, 1.25), 0.3)
SERIES_DOMAIN = SamplingDomain((0.85, 1.2), (0.85, 1.2), (0.75, 0.9), 0.2)
CONV_DOMAIN = SamplingDomain((0.85, 1.15), (0.85, 1.15), (0.78, 0.9), 0.2)
DEGEN_DOMAIN = SamplingDomain((0.6, 1.7), (0.6, 1.7), (0.5, 0.85), 0.0)


@dataclass(frozen=True)
class _SuiteEntry:
    runner: object
    domain: SamplingDomain
    trials: int
    tolerance: float
    m_max: int
    r_max: int
    grid_max: int


_REGISTRY: dict = {}


def _register(suite_id, runner, domain, trials, tolerance,
              m_max=8, r_max=3, grid_max=5):
    _REGISTRY[suite_id] = _SuiteEntry(runner, domain, trials, tolerance,
                                      m_max, r_max, grid_max)


_register("theta_laws", _run_theta_laws, DEFAULT_DOMAIN, 200, 1e-10)
_register("factorial_laws", _run_factorial_laws, DEFAULT_DOMAIN, 100,
          1e-10, m_max=4)
_register("weight_laws", _run_weight_laws, DEFAULT_DOMAIN, 100, 1e-10)
_register("theorem2_oracle", _run_theorem2_oracle, ORACLE_DOMAIN, 50,
          1e-10, grid_max=5)
_register("recursions", _run_recursions, ORACLE_DOMAIN, 100, 1e-10)
_register("lgv_oracle", _run_lgv_oracle, ORACLE_DOMAIN, 30, 1e-9)
_register("warnaar_det", _run_warnaar_det, ORACLE_DOMAIN, 100, 1e-9,
          r_max=3)
for _tag in "abcdef":
    _register(f"prop4_{_tag}", _det_runner(_tag), ORACLE_DOMAIN, 50, 1e-8)
for _idx, _variant in enumerate("abc", start=1):
    _register(f"convolutions_ft{_idx}", _conv_runner(_variant, 1),
              CONV_DOMAIN, 50, 1e-9)
_register("windefsum", _run_windefsum, SERIES_DOMAIN, 100, 1e-9, m_max=10)
_register("ft_10V9", _run_ft_10v9, SERIES_DOMAIN, 100, 1e-9, m_max=4)
_register("ft_12V11", _run_ft_12v11, SERIES_DOMAIN, 50, 1e-9, m_max=4)
_register("degenerations_p0", _run_degenerations, DEGEN_DOMAIN, 100,
          1e-11, m_max=5)
for _variant in "abc":
    _register(f"prop5_{_variant}", _conv_runner(_variant, 2),
              CONV_DOMAIN, 30, 1e-9)
_register("multivariate_sum", _run_multivariate_sum, SERIES_DOMAIN, 30,
          1e-8, m_max=4, r_max=3)
_register("multivariate_transform", _run_multivariate_transform,
          SERIES_DOMAIN, 30, 1e-8, m_max=4, r_max=3)


def suite_ids() -> tuple:
    """All registered suite names, in registration order."""
    return tuple(_REGISTRY)


def suite_defaults(suite_id: str) -> dict:
    """The registered default settings of one suite."""
    entry = _lookup(suite_id)
    return dict(trials=entry.trials, tolerance=entry.tolerance,
                m_max=entry.m_max, r_max=entry.r_max,
                grid_max=entry.grid_max)


def _lookup(suite_id: str) -> _SuiteEntry:
    entry = _REGISTRY.get(suite_id)
    if entry is None:
        known = ", ".join(_REGISTRY)
        raise DomainError(f"unknown suite {suite_id!r}; registered: {known}")
    return entry


def _escalated_attempt(entry, trial_seed, dom, settings, ctx_opts, mutate,
                       dps):
    """Re-run one attempt's draws under mpmath at dps digits."""
    try:
        import mpmath
    except ImportError as exc:
        raise DomainError(
            "extended-precision rerun requires mpmath") from exc
    opts = dict(ctx_opts or {})
    opts["truncation_eps"] = min(opts.get("truncation_eps", 1e-18),
                                 10.0 ** (5 - dps))
    lifted = _LiftedDomain(dom, mpmath.mpc)
    rng = random.Random(trial_seed)
    with mpmath.mp.workdps(dps):
        lhs, rhs, detail, scale = entry.runner(rng, lifted, settings, opts,
                                               mutate)
        rel = float(_rel_error(lhs, rhs))
        record = (complex(lhs), complex(rhs), detail,
                  None if scale is None else float(scale))
    return record, rel


def run_suite(config: SuiteConfig, domain: SamplingDomain | None = None,
              mutate: bool = False, ctx_opts=None,
              escalate_dps: int | None = None) -> list:
    """Run one registered suite and return its TrialOutcome list.

    The outcome list contains one pass/fail record per trial plus one
    resampled_pole record per pole hit along the way (or a single
    skipped_scale record for a trial abandoned at a scale cap).  A
    trial whose every attempt hits a pole raises a degenerate-domain
    error.  ``mutate`` switches every trial to the suite's negative
    control.  ``ctx_opts`` is an optional mapping of ThetaContext
    keyword overrides (truncation_eps, guard_eps).

    ``escalate_dps`` enables the extended-precision rerun: a trial
    that fails in double precision is re-evaluated from the same draw
    stream under mpmath with that many digits, and the rerun's verdict
    replaces the double-precision one.  This separates roundoff
    (which vanishes at higher precision) from genuine identity
    violations (which persist); it is off by default to keep standard
    runs fast.
    """
    entry = _lookup(config.suite_id)
    dom = domain if domain is not None else entry.domain
    trials = config.trials if config.trials is not None else entry.trials
    tolerance = (config.tolerance if config.tolerance is not None
                 else entry.tolerance)
    settings = _Settings(
        m_max=config.m_max if config.m_max is not None else entry.m_max,
        r_max=config.r_max if config.r_max is not None else entry.r_max,
        grid_max=(config.grid_max if config.grid_max is not None
                  else entry.grid_max))
    outcomes = []
    for trial in range(trials):
        for attempt in range(dom.resample_limit + 1):
            trial_seed = _derive_seed(config.seed, config.suite_id, trial,
                                      attempt)
            rng = random.Random(trial_seed)
            try:
                lhs, rhs, detail, scale = entry.runner(
                    rng, dom, settings, ctx_opts, mutate)
            except PoleError as exc:
                outcomes.append(TrialOutcome(
                    config.suite_id, trial_seed, trial, f"pole: {exc}",
                    0j, 0j, 0.0, STATUS_RESAMPLED, False))
                continue
            except ScaleError as exc:
                outcomes.append(TrialOutcome(
                    config.suite_id, trial_seed, trial, f"scale: {exc}",
                    0j, 0j, 0.0, STATUS_SKIPPED, False))
                break
            rel = _rel_error(lhs, rhs)
            lhs, rhs = complex(lhs), complex(rhs)
            if scale is not None:
                scale = float(scale)
            if escalate_dps is not None and rel > tolerance:
                try:
                    record, rel = _escalated_attempt(
                        entry, trial_seed, dom, settings, ctx_opts,
                        mutate, escalate_dps)
                    lhs, rhs, detail, scale = record
                except (PoleError, ScaleError):
                    pass
            status = STATUS_PASS if rel <= tolerance else STATUS_FAIL
            magnitude = max(abs(lhs), abs(rhs), REL_FLOOR)
            flagged = (scale is not None
                       and scale > CONDITION_RATIO_LIMIT * magnitude)
            outcomes.append(TrialOutcome(
                config.suite_id, trial_seed, trial, detail,
                lhs, rhs, rel, status, flagged))
            break
        else:
            raise DomainError(
                f"degenerate domain: suite {config.suite_id!r} trial "
                f"{trial} hit poles on all {dom.resample_limit + 1} "
                f"attempts")
    return outcomes


def aggregate_pass(outcomes) -> bool:
    """True when no outcome failed (resamples and skips do not count)."""
    return all(outcome.status != STATUS_FAIL for outcome in outcomes)
