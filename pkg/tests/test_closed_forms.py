"""Tests for the closed-form products: binomials and family determinants."""

from __future__ import annotations

import cmath
import random

import pytest

from conftest import make_ctx, sample_annulus, sample_nome
from elliptica._linalg import det
from elliptica.closed_forms import (
    DetFormulaVariant,
    EllipticBinomialArgs,
    WarnaarDetArgs,
    det_formula,
    det_formula_points,
    elliptic_binomial,
    q_binomial,
    warnaar_det_rhs,
)
from elliptica.errors import DomainError, PoleError
from elliptica.paths import (
    LatticePoint,
    enumerate_nonintersecting,
    gf_bruteforce,
    gf_recursive,
)
from elliptica.theta import Nome, ThetaContext, ipow, qp_shifted_multi
from elliptica.weights import EllipticParams, weight

# [4 choose 2]_q at q = 0.5: the area generating polynomial of the six
# paths across a 2 x 2 box, 1 + q + 2q^2 + q^3 + q^4 (oracle in
# test_paths.py::TestBruteForce), evaluated by hand.
Q_BINOMIAL_4_2_AT_HALF = 2.1875

# Coefficients of the degree-9 area polynomial counting partitions in a
# 3 x 3 box, for the root-of-unity fallback check.
GAUSS_6_3_COEFFS = (1, 1, 2, 3, 3, 3, 3, 2, 1, 1)


def tame_params(rng: random.Random, p=None) -> EllipticParams:
    """Parameter draw narrow enough to keep determinants well conditioned."""
    if p is None:
        p = sample_nome(rng, max_mod=0.3)
    return EllipticParams(sample_annulus(rng, 0.8, 1.25),
                          sample_annulus(rng, 0.8, 1.25),
                          sample_annulus(rng, 0.8, 1.25), Nome(p))


def rel_err(x, y) -> float:
    scale = max(abs(x), abs(y))
    return abs(x - y) / scale if scale else 0.0


class TestQBinomial:
    def test_edges(self):
        for n in range(6):
            assert q_binomial(n, 0, 0.37 + 0.2j) == 1
            assert q_binomial(n, n, 0.37 + 0.2j) == 1

    def test_four_choose_two(self):
        assert abs(q_binomial(4, 2, 0.5 + 0j) - Q_BINOMIAL_4_2_AT_HALF) < 1e-15
        rng = random.Random(11)
        for _ in range(10):
            q = sample_annulus(rng)
            poly = 1 + q + 2 * q ** 2 + q ** 3 + q ** 4
            assert rel_err(q_binomial(4, 2, q), poly) < 1e-14

    def test_pascal_pair(self):
        rng = random.Random(12)
        for _ in range(20):
            q = sample_annulus(rng)
            n = rng.randrange(1, 9)
            k = rng.randrange(0, n + 1)
            lo = q_binomial(n - 1, k - 1, q) if k >= 1 else 0
            hi = q_binomial(n - 1, k, q) if k <= n - 1 else 0
            assert rel_err(q_binomial(n, k, q),
                           lo + ipow(q, k) * hi) < 1e-12
            assert rel_err(q_binomial(n, k, q),
                           ipow(q, n - k) * lo + hi) < 1e-12

    def test_out_of_range(self):
        for n, k in ((4, 5), (4, -1), (-1, 0)):
            with pytest.raises(DomainError):
                q_binomial(n, k, 0.5 + 0j)

    def test_root_of_unity_fallback(self):
        w = cmath.exp(2j * cmath.pi / 3)
        poly = sum(c * ipow(w, d) for d, c in enumerate(GAUSS_6_3_COEFFS))
        value = q_binomial(6, 3, w)
        assert rel_err(value, poly) < 1e-12
        assert abs(value - 2) < 1e-12


class TestEllipticBinomial:
    def test_matches_path_sums(self):
        rng = random.Random(2026)
        for trial in range(12):
            params = tame_params(rng, p=0j if trial % 3 == 0 else None)
            ctx = make_ctx(params.p.p)
            l = rng.randrange(-2, 3)
            k = rng.randrange(-3, 4)
            n = l + rng.randrange(0, 5)
            m = k + rng.randrange(0, 5)
            closed = elliptic_binomial(
                EllipticBinomialArgs(l, k, n, m, params), ctx)
            assert rel_err(closed, gf_recursive(l, k, n, m, params, ctx)) < 1e-10
            brute = gf_bruteforce(LatticePoint(l, k), LatticePoint(n, m),
                                  params, ctx)
            assert rel_err(closed, brute) < 1e-10

    def test_structural_zeros(self):
        rng = random.Random(21)
        params = tame_params(rng)
        ctx = make_ctx(params.p.p)
        down = elliptic_binomial(
            EllipticBinomialArgs(0, 3, 4, 1, params), ctx)
        assert down == 0
        back = elliptic_binomial(
            EllipticBinomialArgs(3, 0, 1, 5, params), ctx)
        assert back == 0

    def test_last_step_recursion(self):
        rng = random.Random(22)
        for _ in range(8):
            params = tame_params(rng)
            ctx = make_ctx(params.p.p)
            l, k, n, m = -1, 1, 3, 4
            whole = elliptic_binomial(
                EllipticBinomialArgs(l, k, n, m, params), ctx)
            north = elliptic_binomial(
                EllipticBinomialArgs(l, k, n, m - 1, params), ctx)
            east = elliptic_binomial(
                EllipticBinomialArgs(l, k, n - 1, m, params), ctx)
            assert rel_err(whole, north + east * weight(n, m, params, ctx)) < 1e-10

    def test_first_step_recursion(self):
        rng = random.Random(23)
        for _ in range(8):
            params = tame_params(rng)
            ctx = make_ctx(params.p.p)
            l, k, n, m = 0, -1, 4, 2
            whole = elliptic_binomial(
                EllipticBinomialArgs(l, k, n, m, params), ctx)
            east = elliptic_binomial(
                EllipticBinomialArgs(l + 1, k, n, m, params), ctx)
            north = elliptic_binomial(
                EllipticBinomialArgs(l, k + 1, n, m, params), ctx)
            assert rel_err(whole,
                           east * weight(l + 1, k, params, ctx) + north) < 1e-10

    def test_total_ellipticity(self):
        rng = random.Random(24)
        for _ in range(12):
            params = tame_params(rng)
            p = params.p.p
            ctx = make_ctx(p)
            args = EllipticBinomialArgs(0, 1, 3, 4, params)
            base = elliptic_binomial(args, ctx)
            shift_a = elliptic_binomial(EllipticBinomialArgs(
                0, 1, 3, 4, EllipticParams(p * params.a, params.b,
                                           params.q, params.p)), ctx)
            shift_b = elliptic_binomial(EllipticBinomialArgs(
                0, 1, 3, 4, EllipticParams(params.a, p * params.b,
                                           params.q, params.p)), ctx)
            assert rel_err(base, shift_a) < 1e-9
            assert rel_err(base, shift_b) < 1e-9

    def test_p0_q_binomial_degeneration(self):
        rng = random.Random(25)
        for _ in range(6):
            q = sample_annulus(rng)
            params = EllipticParams(0j, 0j, q, Nome(0j))
            ctx = make_ctx(0.0)
            l, k, n, m = -1, rng.randrange(-2, 3), 2, None
            m = k + rng.randrange(0, 5)
            target = q_binomial(n - l + m - k, n - l, q) * ipow(q, (n - l) * k)
            closed = elliptic_binomial(
                EllipticBinomialArgs(l, k, n, m, params), ctx)
            brute = gf_bruteforce(LatticePoint(l, k), LatticePoint(n, m),
                                  params, ctx)
            assert rel_err(closed, target) < 1e-12
            assert rel_err(brute, target) < 1e-12

    def test_hypothesis_and_context_checks(self):
        rng = random.Random(26)
        params = tame_params(rng)
        with pytest.raises(DomainError):
            EllipticBinomialArgs(0, 0, -3, 2, params)
        other_ctx = make_ctx(params.p.p * 0.5 + 0.01)
        with pytest.raises(DomainError):
            elliptic_binomial(
                EllipticBinomialArgs(0, 0, 2, 2, params), other_ctx)

    def test_pole_error(self):
        q = 0.7 + 0.1j
        a = 1 / ipow(q, 2)
        params = EllipticParams(a, 0.9 + 0.2j, q, Nome(0.2 + 0j))
        ctx = make_ctx(0.2)
        with pytest.raises(PoleError) as info:
            elliptic_binomial(EllipticBinomialArgs(0, 0, 2, 3, params), ctx)
        assert info.value.factor


class TestWarnaarDet:
    @staticmethod
    def lhs_matrix(args: WarnaarDetArgs, ctx: ThetaContext):
        r = len(args.X)
        rows = []
        for i in range(r):
            xi = args.X[i]
            row = []
            for j in range(1, r + 1):
                top = qp_shifted_multi(
                    (args.A * xi, args.A * args.C / xi), r - j, args.q, ctx)
                bottom = qp_shifted_multi(
                    (args.B * xi, args.B * args.C / xi), r - j, args.q, ctx)
                row.append(top / bottom)
            rows.append(row)
        return rows

    def test_r1_is_one(self):
        ctx = make_ctx(0.3)
        args = WarnaarDetArgs(A=1.2 + 0.1j, B=0.8 - 0.2j, C=1.1 + 0j,
                              X=(0.9 + 0.4j,), q=0.6 + 0.1j)
        assert warnaar_det_rhs(args, ctx) == 1
        assert self.lhs_matrix(args, ctx) == [[1.0]]

    @pytest.mark.parametrize("r", [2, 3, 4])
    def test_matches_matrix_det(self, r):
        rng = random.Random(300 + r)
        for _ in range(6):
            ctx = make_ctx(sample_nome(rng, max_mod=0.4))
            args = WarnaarDetArgs(
                A=sample_annulus(rng), B=sample_annulus(rng),
                C=sample_annulus(rng),
                X=tuple(sample_annulus(rng) for _ in range(r)),
                q=sample_annulus(rng, 0.6, 1.4))
            lhs = det(self.lhs_matrix(args, ctx))
            rhs = warnaar_det_rhs(args, ctx)
            assert rel_err(lhs, rhs) < 1e-9

    def test_validation_and_nome_pin(self):
        with pytest.raises(DomainError):
            WarnaarDetArgs(A=1.0, B=1.0, C=1.0, X=(), q=0.5)
        with pytest.raises(DomainError):
            WarnaarDetArgs(A=1.0, B=1.0, C=1.0, X=(0.0,), q=0.5)
        pinned = WarnaarDetArgs(A=1.2, B=0.8, C=1.1, X=(0.9,), q=0.6,
                                p=Nome(0.3 + 0j))
        with pytest.raises(DomainError):
            warnaar_det_rhs(pinned, make_ctx(0.2))


# One small instance per (tag, r): the per-path index tuples obey each
# variant's required ordering (nonincreasing for a and d, nondecreasing
# for b, c, e, f).
VARIANT_CASES = {
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


def build_variant(tag: str, case: dict) -> DetFormulaVariant:
    seq = next(v for v in case.values() if isinstance(v, tuple))
    fields = {key: (None if isinstance(val, tuple) else val)
              for key, val in case.items()}
    return DetFormulaVariant(tag=tag, indices=seq, **fields)


class TestDetFormula:
    def test_validation(self):
        with pytest.raises(DomainError):
            DetFormulaVariant(tag="z", indices=(1,), l=0, k=0, n=2)
        with pytest.raises(DomainError):
            DetFormulaVariant(tag="a", indices=(), l=0, k=0, n=2)
        with pytest.raises(DomainError):
            DetFormulaVariant(tag="e", indices=(0, 1), k=0, n=4)
        with pytest.raises(DomainError):
            DetFormulaVariant(tag="a", indices=(2, 4), l=0, k=0, n=3)
        with pytest.raises(DomainError):
            DetFormulaVariant(tag="e", indices=(2, 0), k=0, n=4, m=6)
        with pytest.raises(DomainError):
            DetFormulaVariant(tag="a", indices=(-9,), l=0, k=0, n=3)

    def test_points_layouts(self):
        starts, ends = det_formula_points(
            build_variant("a", VARIANT_CASES["a", 2]))
        assert starts.points == (LatticePoint(0, 1), LatticePoint(1, 0))
        assert ends.points == (LatticePoint(3, 6), LatticePoint(3, 4))
        starts, ends = det_formula_points(
            build_variant("d", VARIANT_CASES["d", 2]))
        assert starts.points == (LatticePoint(-1, 2), LatticePoint(-1, 0))
        assert ends.points == (LatticePoint(4, 5), LatticePoint(5, 4))
        starts, ends = det_formula_points(
            build_variant("f", VARIANT_CASES["f", 2]))
        assert starts.points == (LatticePoint(0, 3), LatticePoint(2, 1))
        assert ends.points == (LatticePoint(5, 8), LatticePoint(6, 7))

    @pytest.mark.parametrize("tag", ["a", "b", "c", "d", "e", "f"])
    def test_r1_reduces_to_single_path(self, tag):
        rng = random.Random(40 + ord(tag))
        variant = build_variant(tag, VARIANT_CASES[tag, 1])
        starts, ends = det_formula_points(variant)
        for trial in range(3):
            params = tame_params(rng, p=0j if trial == 0 else None)
            ctx = make_ctx(params.p.p)
            single = elliptic_binomial(EllipticBinomialArgs(
                starts.points[0].x, starts.points[0].y,
                ends.points[0].x, ends.points[0].y, params), ctx)
            assert rel_err(det_formula(variant, params, ctx), single) < 1e-12

    @pytest.mark.parametrize("tag", ["a", "b", "c", "d", "e", "f"])
    @pytest.mark.parametrize("r", [2, 3])
    def test_matches_entry_determinant(self, tag, r):
        rng = random.Random(1000 + 10 * ord(tag) + r)
        variant = build_variant(tag, VARIANT_CASES[tag, r])
        starts, ends = det_formula_points(variant)
        for trial in range(3):
            params = tame_params(rng, p=0j if trial == 0 else None)
            ctx = make_ctx(params.p.p)
            rows = [[elliptic_binomial(
                EllipticBinomialArgs(u.x, u.y, v.x, v.y, params), ctx)
                for u in starts.points] for v in ends.points]
            assert rel_err(det(rows), det_formula(variant, params, ctx)) < 1e-8

    @pytest.mark.parametrize("tag", ["a", "b", "c", "d", "e", "f"])
    @pytest.mark.parametrize("r", [1, 2])
    def test_matches_nonintersecting_bruteforce(self, tag, r):
        rng = random.Random(2000 + 10 * ord(tag) + r)
        variant = build_variant(tag, VARIANT_CASES[tag, r])
        starts, ends = det_formula_points(variant)
        for trial in range(3):
            params = tame_params(rng, p=0j if trial == 0 else None)
            ctx = make_ctx(params.p.p)
            oracle = enumerate_nonintersecting(starts, ends, params, ctx)
            closed = det_formula(variant, params, ctx)
            scale = max(abs(oracle), 1.0)
            assert abs(closed - oracle) <= 1e-8 * scale

    def test_rejects_degenerate_b(self):
        params = EllipticParams(0j, 0j, 0.5 + 0j, Nome(0j))
        ctx = make_ctx(0.0)
        variant = build_variant("a", VARIANT_CASES["a", 2])
        with pytest.raises(DomainError):
            det_formula(variant, params, ctx)
