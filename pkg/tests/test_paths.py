"""Tests for path enumeration, generating functions, and determinants."""

from __future__ import annotations

import random

import pytest

from conftest import make_ctx, sample_annulus, sample_nome
from elliptica.errors import DomainError, ScaleError
from elliptica.paths import (
    LatticePath,
    LatticePoint,
    PathFamily,
    PointTuple,
    enumerate_nonintersecting,
    enumerate_paths,
    gf_bruteforce,
    gf_recursive,
    lgv_determinant,
    path_weight,
    reduce_horizontal_starts,
)
from elliptica.theta import Nome
from elliptica.weights import EllipticParams, weight


def make_params(rng: random.Random, p=None) -> EllipticParams:
    if p is None:
        p = sample_nome(rng)
    return EllipticParams(sample_annulus(rng), sample_annulus(rng),
                          sample_annulus(rng), Nome(p))


def q_params(q) -> EllipticParams:
    return EllipticParams(0j, 0j, q, Nome(0j))


class TestTypes:
    def test_point_bounds(self):
        with pytest.raises(ScaleError):
            LatticePoint(10_001, 0)

    def test_path_end_and_points(self):
        path = LatticePath(LatticePoint(1, 2), ("E", "N", "E"))
        assert path.end == LatticePoint(3, 3)
        assert path.points() == (LatticePoint(1, 2), LatticePoint(2, 2),
                                 LatticePoint(2, 3), LatticePoint(3, 3))
        assert str(path) == "(1,2):ENE"

    def test_path_rejects_bad_step(self):
        with pytest.raises(DomainError):
            LatticePath(LatticePoint(0, 0), ("E", "X"))

    def test_family_nonintersecting_claim(self):
        p1 = LatticePath(LatticePoint(0, 0), ("E",))
        p2 = LatticePath(LatticePoint(0, 1), ("E",))
        PathFamily((p1, p2), nonintersecting=True)
        crossing = LatticePath(LatticePoint(0, 0), ("N", "E"))
        with pytest.raises(DomainError):
            PathFamily((p1, crossing), nonintersecting=True)

    def test_point_tuple_validation(self):
        PointTuple((LatticePoint(1, 3), LatticePoint(2, 2)), "antidiagonal")
        PointTuple((LatticePoint(1, 3), LatticePoint(2, 3)), "horizontal")
        PointTuple((LatticePoint(1, 3), LatticePoint(1, 2)), "vertical")
        with pytest.raises(DomainError):
            PointTuple((LatticePoint(1, 3), LatticePoint(3, 2)), "antidiagonal")
        with pytest.raises(DomainError):
            PointTuple((LatticePoint(0, 0),), "diagonal")


class TestEnumeration:
    def test_single_empty_path(self):
        paths = enumerate_paths(LatticePoint(2, 5), LatticePoint(2, 5))
        assert len(paths) == 1
        assert paths[0].steps == ()

    def test_counts(self):
        assert len(enumerate_paths(LatticePoint(0, 0), LatticePoint(2, 2))) == 6
        assert len(enumerate_paths(LatticePoint(0, 0), LatticePoint(3, 2))) == 10

    def test_unreachable_is_empty(self):
        assert enumerate_paths(LatticePoint(0, 0), LatticePoint(-1, 4)) == ()
        assert enumerate_paths(LatticePoint(0, 3), LatticePoint(2, 1)) == ()

    def test_lexicographic_order(self):
        paths = enumerate_paths(LatticePoint(0, 0), LatticePoint(2, 1))
        strings = ["".join(p.steps) for p in paths]
        assert strings == ["EEN", "ENE", "NEE"]
        assert strings == sorted(strings)

    def test_scale_cap(self):
        with pytest.raises(ScaleError):
            enumerate_paths(LatticePoint(0, 0), LatticePoint(13, 12))


class TestPathWeight:
    def test_all_vertical_is_one(self):
        rng = random.Random(10)
        params = make_params(rng)
        ctx = make_ctx(params.p.p)
        path = LatticePath(LatticePoint(3, -1), ("N", "N", "N"))
        assert path_weight(path, params, ctx) == pytest.approx(1.0)

    def test_single_east_step(self):
        rng = random.Random(11)
        params = make_params(rng)
        ctx = make_ctx(params.p.p)
        path = LatticePath(LatticePoint(1, 2), ("E",))
        assert path_weight(path, params, ctx) == \
            pytest.approx(weight(2, 2, params, ctx), rel=1e-14)

    def test_staircase(self):
        rng = random.Random(12)
        params = make_params(rng)
        ctx = make_ctx(params.p.p)
        path = LatticePath(LatticePoint(0, 0), ("N", "E", "N", "E"))
        expected = weight(1, 1, params, ctx) * weight(2, 2, params, ctx)
        assert path_weight(path, params, ctx) == pytest.approx(expected, rel=1e-13)


class TestBruteForce:
    def test_point(self):
        rng = random.Random(13)
        params = make_params(rng)
        ctx = make_ctx(params.p.p)
        assert gf_bruteforce(LatticePoint(1, 1), LatticePoint(1, 1),
                             params, ctx) == pytest.approx(1.0)

    def test_empty_set(self):
        rng = random.Random(14)
        params = make_params(rng)
        ctx = make_ctx(params.p.p)
        assert gf_bruteforce(LatticePoint(0, 2), LatticePoint(3, 1),
                             params, ctx) == 0

    def test_q_area_polynomial(self):
        # For the pure q-weight, paths to (2, 2) collect q^{area above path}:
        # the six paths give 1 + q + 2q^2 + q^3 + q^4.
        q = 0.3 + 0.4j
        ctx = make_ctx(0.0)
        value = gf_bruteforce(LatticePoint(0, 0), LatticePoint(2, 2),
                              q_params(q), ctx)
        expected = 1 + q + 2 * q ** 2 + q ** 3 + q ** 4
        assert value == pytest.approx(expected, rel=1e-13)

    def test_matches_generic_loop(self):
        # The vectorised batch path and the duck-typed scalar loop must
        # produce the same sum; exercise the scalar loop via mpmath.
        mp = pytest.importorskip("mpmath")
        mp.mp.dps = 30
        ctx = make_ctx(0.1)
        fast = gf_bruteforce(LatticePoint(0, 0), LatticePoint(3, 2),
                             EllipticParams(1.3 + 0j, 0.6 + 0j, 0.8 + 0j,
                                            Nome(0.1 + 0j)), ctx)
        slow = gf_bruteforce(LatticePoint(0, 0), LatticePoint(3, 2),
                             EllipticParams(mp.mpc("1.3"), mp.mpc("0.6"),
                                            mp.mpc("0.8"), Nome(0.1 + 0j)),
                             make_ctx(0.1, truncation_eps=1e-25))
        assert abs(complex(slow) - fast) < 1e-12 * abs(fast)

    def test_scale_cap(self):
        rng = random.Random(15)
        params = make_params(rng)
        ctx = make_ctx(params.p.p)
        with pytest.raises(ScaleError):
            gf_bruteforce(LatticePoint(0, 0), LatticePoint(13, 12), params, ctx)


class TestRecursive:
    def test_vertical_base(self):
        rng = random.Random(16)
        params = make_params(rng)
        ctx = make_ctx(params.p.p)
        assert gf_recursive(2, -1, 2, 4, params, ctx) == pytest.approx(1.0)

    def test_horizontal_base(self):
        rng = random.Random(17)
        params = make_params(rng)
        ctx = make_ctx(params.p.p)
        expected = 1 + 0j
        for i in range(1, 4):
            expected *= weight(i, 2, params, ctx)
        assert gf_recursive(0, 2, 3, 2, params, ctx) == \
            pytest.approx(expected, rel=1e-12)

    def test_empty(self):
        rng = random.Random(18)
        params = make_params(rng)
        ctx = make_ctx(params.p.p)
        assert gf_recursive(0, 3, 4, 1, params, ctx) == 0
        assert gf_recursive(5, 0, 1, 4, params, ctx) == 0

    def test_agrees_with_bruteforce(self):
        rng = random.Random(19)
        for _ in range(25):
            params = make_params(rng)
            ctx = make_ctx(params.p.p)
            l, k = rng.randint(-3, 3), rng.randint(-3, 3)
            n = l + rng.randint(0, 4)
            m = k + rng.randint(0, 4)
            brute = gf_bruteforce(LatticePoint(l, k), LatticePoint(n, m),
                                  params, ctx)
            assert gf_recursive(l, k, n, m, params, ctx) == \
                pytest.approx(brute, rel=1e-10)

    def test_first_step_recursion(self):
        rng = random.Random(20)
        for _ in range(20):
            params = make_params(rng)
            ctx = make_ctx(params.p.p)
            l, k = rng.randint(-2, 2), rng.randint(-2, 2)
            n = l + rng.randint(1, 4)
            m = k + rng.randint(1, 4)
            whole = gf_recursive(l, k, n, m, params, ctx)
            split = (gf_recursive(l, k + 1, n, m, params, ctx)
                     + weight(l + 1, k, params, ctx)
                     * gf_recursive(l + 1, k, n, m, params, ctx))
            assert whole == pytest.approx(split, rel=1e-11)

    def test_last_step_convolution(self):
        rng = random.Random(21)
        for _ in range(15):
            params = make_params(rng)
            ctx = make_ctx(params.p.p)
            n = rng.randint(1, 4)
            m = rng.randint(0, 4)
            whole = gf_recursive(0, 0, n, m, params, ctx)
            total = 0j
            for k in range(m + 1):
                total += (gf_recursive(0, 0, n - 1, k, params, ctx)
                          * weight(n, k, params, ctx))
            assert whole == pytest.approx(total, rel=1e-11)

    def test_shift_identity(self):
        rng = random.Random(22)
        for _ in range(20):
            params = make_params(rng)
            ctx = make_ctx(params.p.p)
            l, k = rng.randint(-2, 2), rng.randint(-2, 2)
            n = l + rng.randint(0, 3)
            m = k + rng.randint(0, 3)
            s, t = rng.randint(-2, 2), rng.randint(-2, 2)
            lhs = gf_recursive(l + s, k + t, n + s, m + t, params, ctx)
            rhs = (gf_recursive(l, t, n, t, params.shifted(s, 0), ctx)
                   * gf_recursive(l, k, n, m, params.shifted(s, t), ctx))
            assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_reflection_identity(self):
        rng = random.Random(23)
        for _ in range(20):
            params = make_params(rng)
            ctx = make_ctx(params.p.p)
            l, k = rng.randint(-2, 2), rng.randint(-2, 2)
            n = l + rng.randint(0, 3)
            m = k + rng.randint(0, 3)
            lhs = gf_recursive(l, k, n, m, params, ctx)
            mirrored = EllipticParams(1 / params.a, params.q / params.b,
                                      params.q, params.p)
            rhs = gf_recursive(-1 - n, -m, -1 - l, -k, mirrored, ctx)
            assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_table_cap(self):
        rng = random.Random(24)
        params = make_params(rng)
        ctx = make_ctx(params.p.p)
        with pytest.raises(ScaleError):
            gf_recursive(0, 0, 1200, 1200, params, ctx)


def antidiag(x0, y0, r):
    return PointTuple(tuple(LatticePoint(x0 + i, y0 - i) for i in range(1, r + 1)),
                      "antidiagonal")


class TestFamilies:
    def test_r1_reduces_to_single_path(self):
        rng = random.Random(25)
        params = make_params(rng)
        ctx = make_ctx(params.p.p)
        starts = PointTuple((LatticePoint(0, 0),))
        ends = PointTuple((LatticePoint(3, 2),))
        both = enumerate_nonintersecting(starts, ends, params, ctx)
        single = gf_bruteforce(LatticePoint(0, 0), LatticePoint(3, 2),
                               params, ctx)
        assert both == pytest.approx(single, rel=1e-12)
        assert lgv_determinant(starts, ends, params, ctx) == \
            pytest.approx(single, rel=1e-12)

    def test_crossing_forced_is_zero(self):
        rng = random.Random(26)
        params = make_params(rng)
        ctx = make_ctx(params.p.p)
        starts = PointTuple((LatticePoint(1, 1), LatticePoint(2, 0)))
        reversed_ends = PointTuple((LatticePoint(4, 2), LatticePoint(4, 3)))
        assert enumerate_nonintersecting(starts, reversed_ends,
                                         params, ctx) == 0

    def test_determinant_matches_enumeration_r2(self):
        rng = random.Random(27)
        for _ in range(12):
            params = make_params(rng)
            ctx = make_ctx(params.p.p)
            starts = PointTuple((LatticePoint(1, 1), LatticePoint(2, 0)))
            ends = PointTuple((LatticePoint(4, 3), LatticePoint(4, 2)))
            brute = enumerate_nonintersecting(starts, ends, params, ctx)
            determinant = lgv_determinant(starts, ends, params, ctx)
            assert determinant == pytest.approx(brute, rel=1e-10)

    def test_determinant_matches_enumeration_r3(self):
        rng = random.Random(28)
        for _ in range(6):
            params = make_params(rng)
            ctx = make_ctx(params.p.p)
            starts = antidiag(0, 2, 3)
            ends = antidiag(3, 6, 3)
            brute = enumerate_nonintersecting(starts, ends, params, ctx)
            determinant = lgv_determinant(starts, ends, params, ctx)
            assert determinant == pytest.approx(brute, rel=1e-9)

    def test_reversed_ends_flip_determinant_sign(self):
        rng = random.Random(29)
        params = make_params(rng)
        ctx = make_ctx(params.p.p)
        starts = PointTuple((LatticePoint(1, 1), LatticePoint(2, 0)))
        ends = PointTuple((LatticePoint(4, 3), LatticePoint(4, 2)))
        swapped = PointTuple((LatticePoint(4, 2), LatticePoint(4, 3)))
        d1 = lgv_determinant(starts, ends, params, ctx)
        d2 = lgv_determinant(starts, swapped, params, ctx)
        assert d2 == pytest.approx(-d1, rel=1e-12)

    def test_r_cap(self):
        rng = random.Random(30)
        params = make_params(rng)
        ctx = make_ctx(params.p.p)
        with pytest.raises(ScaleError):
            enumerate_nonintersecting(antidiag(0, 4, 4), antidiag(2, 8, 4),
                                      params, ctx)


def tame_params(rng: random.Random) -> EllipticParams:
    """Moduli near 1 keep determinant cancellation mild in these tests."""
    def draw():
        return sample_annulus(rng, 0.8, 1.25)
    return EllipticParams(draw(), draw(), draw(), Nome(sample_nome(rng, 0.3)))


def det2_scale(starts, ends, params, ctx):
    """Permanent-style magnitude of a 2x2 path matrix.

    The determinant identities hold exactly, but the computed
    determinants carry an absolute rounding error proportional to this
    scale, so discrepancy bounds are stated against it rather than
    against the (possibly heavily cancelled) determinant value.
    """
    entries = [[abs(gf_recursive(u.x, u.y, v.x, v.y, params, ctx))
                for u in starts.points] for v in ends.points]
    return (entries[0][0] * entries[1][1] + entries[0][1] * entries[1][0])


class TestStartReductions:
    def test_r1_identity(self):
        starts = PointTuple((LatticePoint(3, 2),), "horizontal")
        reduced, prefactor = reduce_horizontal_starts(starts)
        assert reduced.points == (LatticePoint(3, 2),)
        assert prefactor == 1

    def test_horizontal_r2_q_weight(self):
        ctx = make_ctx(0.0)
        params = q_params(0.41 + 0.13j)
        starts = PointTuple((LatticePoint(1, 0), LatticePoint(2, 0)),
                            "horizontal")
        ends = antidiag(3, 5, 2)
        reduced, prefactor = reduce_horizontal_starts(starts)
        original = lgv_determinant(starts, ends, params, ctx)
        equivalent = prefactor * lgv_determinant(reduced, ends, params, ctx)
        assert original == pytest.approx(equivalent, rel=1e-12)

    def test_horizontal_r2(self):
        rng = random.Random(31)
        for _ in range(8):
            params = tame_params(rng)
            ctx = make_ctx(params.p.p)
            starts = PointTuple((LatticePoint(1, 0), LatticePoint(2, 0)),
                                "horizontal")
            ends = antidiag(3, 5, 2)
            reduced, prefactor = reduce_horizontal_starts(starts)
            assert reduced.points == (LatticePoint(1, 1), LatticePoint(2, 0))
            original = lgv_determinant(starts, ends, params, ctx)
            equivalent = prefactor * lgv_determinant(reduced, ends, params, ctx)
            scale = det2_scale(starts, ends, params, ctx)
            assert abs(original - equivalent) <= 1e-11 * scale

    def test_vertical_r2(self):
        rng = random.Random(32)
        for _ in range(8):
            params = tame_params(rng)
            ctx = make_ctx(params.p.p)
            starts = PointTuple((LatticePoint(0, 2), LatticePoint(0, 1)),
                                "vertical")
            ends = antidiag(3, 6, 2)
            reduced, prefactor = reduce_horizontal_starts(starts, params, ctx)
            assert reduced.points == (LatticePoint(0, 2), LatticePoint(1, 1))
            expected_pref = weight(1, 1, params, ctx)
            assert prefactor == pytest.approx(expected_pref, rel=1e-12)
            original = lgv_determinant(starts, ends, params, ctx)
            equivalent = prefactor * lgv_determinant(reduced, ends, params, ctx)
            scale = abs(prefactor) * det2_scale(reduced, ends, params, ctx)
            assert abs(original - equivalent) <= 1e-11 * scale

    def test_vertical_needs_params(self):
        starts = PointTuple((LatticePoint(0, 2), LatticePoint(0, 1)), "vertical")
        with pytest.raises(DomainError):
            reduce_horizontal_starts(starts)

    def test_general_rejected(self):
        starts = PointTuple((LatticePoint(0, 2), LatticePoint(5, 1)))
        with pytest.raises(DomainError):
            reduce_horizontal_starts(starts)
