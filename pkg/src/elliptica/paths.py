"""Lattice paths with elliptic step weights.

Paths move through the planar integer lattice by unit East and North
steps. Every horizontal step onto (n, m) carries the elliptic weight
w(n, m) from :mod:`elliptica.weights`; vertical steps are free. The
weight of a path is the product over its East steps, and the
generating function of a set of paths is the sum of path weights.

Three evaluators are provided. ``gf_bruteforce`` sums over an explicit
enumeration and serves as the independent oracle for everything else.
``gf_recursive`` evaluates the same quantity with a last-step dynamic
program,

    gf(-> (n, m)) = gf(-> (n, m-1)) + gf(-> (n-1, m)) * w(n, m),

and ``lgv_determinant`` evaluates generating functions of families of
pairwise vertex-disjoint paths as the determinant of the matrix of
point-to-point generating functions, with ``enumerate_nonintersecting``
as its brute-force counterpart.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ._linalg import det
from .errors import DomainError, ScaleError
from .theta import ThetaContext, ipow
from .weights import COORD_MAX, EllipticParams, weight

EAST = "E"
NORTH = "N"

BRUTE_MAX_STEPS = 24
RECURSIVE_MAX_CELLS = 1_000_000
NONINTERSECTING_MAX_PATHS = 3

CONFIGURATIONS = ("antidiagonal", "horizontal", "vertical", "general")

_BATCH = 1 << 16


@dataclass(frozen=True)
class LatticePoint:
    """A point of the planar integer lattice."""

    x: int
    y: int

    def __post_init__(self):
        if abs(self.x) > COORD_MAX or abs(self.y) > COORD_MAX:
            raise ScaleError(
                f"lattice coordinates must stay within +-{COORD_MAX}, "
                f"got ({self.x}, {self.y})")

    def __str__(self) -> str:
        return f"({self.x},{self.y})"


@dataclass(frozen=True)
class LatticePath:
    """An immutable monotone path given by its start and step letters."""

    start: LatticePoint
    steps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        for s in self.steps:
            if s not in (EAST, NORTH):
                raise DomainError(f"path steps must be '{EAST}' or '{NORTH}', got {s!r}")

    @property
    def end(self) -> LatticePoint:
        east = sum(1 for s in self.steps if s == EAST)
        return LatticePoint(self.start.x + east,
                            self.start.y + len(self.steps) - east)

    def points(self) -> tuple:
        """All lattice points visited, endpoints included."""
        x, y = self.start.x, self.start.y
        visited = [LatticePoint(x, y)]
        for s in self.steps:
            if s == EAST:
                x += 1
            else:
                y += 1
            visited.append(LatticePoint(x, y))
        return tuple(visited)

    def __str__(self) -> str:
        return f"{self.start}:" + "".join(self.steps)


@dataclass(frozen=True)
class PathFamily:
    """An r-tuple of paths, optionally claimed to be nonintersecting."""

    paths: tuple
    nonintersecting: bool = False

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(self.paths))
        if self.nonintersecting and not self.is_nonintersecting():
            raise DomainError("family claimed nonintersecting but paths share a point")

    def is_nonintersecting(self) -> bool:
        """True when no two member paths share any lattice point."""
        seen = set()
        for path in self.paths:
            pts = set(path.points())
            if seen & pts:
                return False
            seen |= pts
        return True


@dataclass(frozen=True)
class PointTuple:
    """An r-tuple of lattice points with a named geometric configuration.

    The antidiagonal configuration means consecutive points (x0+i, y0-i);
    horizontal means (x0+i, y0); vertical means (x0, y0-i). These are the
    shapes for which start/end compatibility is structurally guaranteed.
    """

    points: tuple
    configuration: str = "general"

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if self.configuration not in CONFIGURATIONS:
            raise DomainError(f"unknown configuration {self.configuration!r}")
        if self.configuration == "general" or len(self.points) <= 1:
            return
        dx, dy = {"antidiagonal": (1, -1),
                  "horizontal": (1, 0),
                  "vertical": (0, -1)}[self.configuration]
        for prev, cur in zip(self.points, self.points[1:]):
            if cur.x - prev.x != dx or cur.y - prev.y != dy:
                raise DomainError(
                    f"points {prev} -> {cur} do not form a "
                    f"{self.configuration} configuration")

    def __len__(self) -> int:
        return len(self.points)


def enumerate_paths(u: LatticePoint, v: LatticePoint) -> tuple:
    """All monotone paths from u to v, in lexicographic step order (E < N)."""
    dx, dy = v.x - u.x, v.y - u.y
    if dx < 0 or dy < 0:
        return ()
    if dx + dy > BRUTE_MAX_STEPS:
        raise ScaleError(
            f"path enumeration capped at {BRUTE_MAX_STEPS} steps, "
            f"got {dx + dy}")
    total = dx + dy
    paths = []
    for east_slots in itertools.combinations(range(total), dx):
        steps = [NORTH] * total
        for c in east_slots:
            steps[c] = EAST
        paths.append(LatticePath(u, tuple(steps)))
    return tuple(paths)


def path_weight(path: LatticePath, params: EllipticParams, ctx: ThetaContext):
    """Product of the elliptic weights of the path's horizontal steps."""
    acc = ipow(params.q, 0)
    x, y = path.start.x, path.start.y
    for s in path.steps:
        if s == EAST:
            x += 1
            acc = acc * weight(x, y, params, ctx)
        else:
            y += 1
    return acc


def _plain_numeric(params: EllipticParams) -> bool:
    values = (params.a, params.b, params.q, params.p.p)
    return all(isinstance(v, (int, float, complex)) for v in values)


def gf_bruteforce(u: LatticePoint, v: LatticePoint,
                  params: EllipticParams, ctx: ThetaContext):
    """Generating function of all paths u -> v by explicit enumeration.

    This is the oracle implementation: a literal sum of products of edge
    weights, organised so the edge weights on the spanned rectangle are
    evaluated once each. For built-in complex scalars the combination
    sweep runs vectorised in batches; other scalar types (for instance
    mpmath) take a plain Python loop over the same data.
    """
    dx, dy = v.x - u.x, v.y - u.y
    if dx < 0 or dy < 0:
        return ipow(params.q, 0) * 0
    if dx + dy > BRUTE_MAX_STEPS:
        raise ScaleError(
            f"brute-force generating function capped at {BRUTE_MAX_STEPS} "
            f"steps, got {dx + dy}")
    one = ipow(params.q, 0)
    if dx == 0:
        return one
    grid = [[weight(u.x + 1 + i, u.y + j, params, ctx) for j in range(dy + 1)]
            for i in range(dx)]
    combos = itertools.combinations(range(dx + dy), dx)
    if _plain_numeric(params):
        wgrid = np.asarray(grid, dtype=complex)
        jidx = np.arange(dx)
        total = 0j
        while True:
            batch = list(itertools.islice(combos, _BATCH))
            if not batch:
                break
            pos = np.asarray(batch, dtype=np.int64)
            vals = wgrid[jidx[None, :], pos - jidx[None, :]]
            total += complex(vals.prod(axis=1).sum())
        return total
    total = one * 0
    for combo in combos:
        acc = one
        for j, c in enumerate(combo):
            acc = acc * grid[j][c - j]
        total = total + acc
    return total


def gf_recursive(l: int, k: int, n: int, m: int,
                 params: EllipticParams, ctx: ThetaContext):
    """Generating function of paths (l, k) -> (n, m) by dynamic programming.

    Tabulates the last-step recursion over the spanned rectangle. The
    table holds one entry per lattice point and is confined to this
    call, so concurrent invocations never share state.
    """
    if n < l or m < k:
        return ipow(params.q, 0) * 0
    cols, rows = n - l + 1, m - k + 1
    if cols * rows > RECURSIVE_MAX_CELLS:
        raise ScaleError(
            f"recursive evaluation table would need {cols * rows} cells, "
            f"cap is {RECURSIVE_MAX_CELLS}")
    one = ipow(params.q, 0)
    column = [one] * rows
    for x in range(l + 1, n + 1):
        prev = column
        column = [prev[0] * weight(x, k, params, ctx)]
        for j in range(1, rows):
            column.append(column[j - 1] + prev[j] * weight(x, k + j, params, ctx))
    return column[rows - 1]


def enumerate_nonintersecting(starts: PointTuple, ends: PointTuple,
                              params: EllipticParams, ctx: ThetaContext):
    """Generating function of vertex-disjoint path families, brute force.

    Path i runs from starts.points[i] to ends.points[i]; a family counts
    only if no two of its paths share a lattice point. Serves as the
    oracle for ``lgv_determinant``.
    """
    r = len(starts)
    if len(ends) != r:
        raise DomainError("start and end tuples must have equal length")
    if r > NONINTERSECTING_MAX_PATHS:
        raise ScaleError(
            f"brute-force family enumeration capped at "
            f"{NONINTERSECTING_MAX_PATHS} paths, got {r}")
    candidates = []
    for u, v in zip(starts.points, ends.points):
        entries = []
        for path in enumerate_paths(u, v):
            entries.append((frozenset(path.points()),
                            path_weight(path, params, ctx)))
        candidates.append(entries)
    one = ipow(params.q, 0)
    total = one * 0

    def extend(i, used, acc):
        nonlocal total
        if i == r:
            total = total + acc
            return
        for vertices, wt in candidates[i]:
            if used & vertices:
                continue
            extend(i + 1, used | vertices, acc * wt)

    extend(0, frozenset(), one)
    return total


def lgv_determinant(starts: PointTuple, ends: PointTuple,
                    params: EllipticParams, ctx: ThetaContext):
    """Family generating function as det of point-to-point evaluations.

    Entry (i, j) of the matrix is the generating function of paths from
    starts.points[j] to ends.points[i]. For the named configurations
    the start tuple is compatible to the end tuple by construction; for
    general tuples the caller asserts compatibility.
    """
    r = len(starts)
    if len(ends) != r:
        raise DomainError("start and end tuples must have equal length")
    matrix = [[gf_recursive(u.x, u.y, v.x, v.y, params, ctx)
               for u in starts.points]
              for v in ends.points]
    return det(matrix)


def reduce_horizontal_starts(starts: PointTuple,
                             params: EllipticParams | None = None,
                             ctx: ThetaContext | None = None):
    """Trade aligned starting points for antidiagonal ones.

    Starting points on a horizontal line (x0+j, y0), j = 1..r, span the
    same family determinant as the antidiagonal points (x0+j, y0+r-j):
    the j-th rightmost path is forced to open with j-1 vertical steps.
    Starting points on a vertical line (x0, y0-j) similarly reduce to
    the antidiagonal (x0+j-1, y0-j) after peeling forced horizontal
    steps, whose weights contribute the returned prefactor

        prod_{1 <= i < j <= r} w(x0 + i, y0 - j).

    Returns the antidiagonal tuple and the prefactor by which the
    reduced determinant must be multiplied (1 for horizontal starts).
    """
    pts = starts.points
    r = len(pts)
    if r == 0:
        raise DomainError("empty point tuple")
    if starts.configuration == "horizontal":
        l, k = pts[0].x - 1, pts[0].y
        new = tuple(LatticePoint(l + j, k + r - j) for j in range(1, r + 1))
        return PointTuple(new, "antidiagonal"), 1.0 + 0j
    if starts.configuration == "vertical":
        if params is None or ctx is None:
            raise DomainError("vertical reduction needs weight parameters")
        l, k = pts[0].x, pts[0].y + 1
        new = tuple(LatticePoint(l + j - 1, k - j) for j in range(1, r + 1))
        prefactor = ipow(params.q, 0)
        for j in range(1, r + 1):
            for i in range(1, j):
                prefactor = prefactor * weight(l + i, k - j, params, ctx)
        return PointTuple(new, "antidiagonal"), prefactor
    raise DomainError(
        "starts must be a horizontal or vertical configuration, "
        f"got {starts.configuration!r}")
