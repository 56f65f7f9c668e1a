"""Unit trapezoid geometry, the four point-pair arrangements and uniform sampling.

The canonical trapezoid has its long base on the x-axis from (0, 0) to (2, 0)
and lies in the upper half-plane.  Neighbor trapezoids are mirror images of it
across the shared side: the long base (AB -> CD, a regular hexagon), the right
leg (EF) or the short base (GH, a concave hexagon).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

SQRT3 = math.sqrt(3.0)
GEOM_TOL = 1e-12


class Case(str, enum.Enum):
    AB = "AB"
    CD = "CD"
    EF = "EF"
    GH = "GH"

    @classmethod
    def parse(cls, value: "Case | str") -> "Case":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValueError(
                f"unknown case {value!r}; expected one of {[c.value for c in cls]}"
            ) from None


D_MAX = {
    Case.AB: 2.0,
    Case.CD: 2.0,
    Case.EF: 2.0 * SQRT3,
    Case.GH: math.sqrt(7.0),
}


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def distance(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


def _reflect(p: Point2, a: Point2, b: Point2) -> Point2:
    ux, uy = b.x - a.x, b.y - a.y
    norm = math.hypot(ux, uy)
    ux, uy = ux / norm, uy / norm
    wx, wy = p.x - a.x, p.y - a.y
    dot = wx * ux + wy * uy
    return Point2(a.x + 2.0 * dot * ux - wx, a.y + 2.0 * dot * uy - wy)


@dataclass(frozen=True)
class Trapezoid:
    """A unit trapezoid given by its vertices in counterclockwise order.

    The first edge (``vertices[0] -> vertices[1]``) is the long base, followed
    by a leg, the short base and the other leg.
    """

    vertices: tuple[Point2, Point2, Point2, Point2]

    def __post_init__(self):
        if len(self.vertices) != 4:
            raise ValueError("a trapezoid needs exactly 4 vertices")
        if self.signed_area() <= 0:
            raise ValueError("vertices must be in counterclockwise order")
        lengths = self.side_lengths()
        for got, want in zip(lengths, (2.0, 1.0, 1.0, 1.0)):
            if abs(got - want) > GEOM_TOL:
                raise ValueError(f"side lengths {lengths} are not (2, 1, 1, 1)")
        for angle in self.base_angles():
            if abs(angle - math.pi / 3) > GEOM_TOL:
                raise ValueError(f"base angle {angle} is not pi/3")

    def as_array(self) -> np.ndarray:
        return np.array([[p.x, p.y] for p in self.vertices])

    def signed_area(self) -> float:
        v = self.as_array()
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    @property
    def area(self) -> float:
        return abs(self.signed_area())

    def side_lengths(self) -> tuple[float, ...]:
        vs = self.vertices
        return tuple(vs[i].distance(vs[(i + 1) % 4]) for i in range(4))

    def base_angles(self) -> tuple[float, float]:
        """Interior angles at the two long-base vertices."""
        v = self.as_array()

        def angle(at, p, q):
            a, b = v[p] - v[at], v[q] - v[at]
            return math.acos(np.dot(a, b) / (np.linalg.norm(a) * np.linalg.norm(b)))

        return angle(0, 1, 3), angle(1, 2, 0)

    def triangles(self) -> np.ndarray:
        """The three unit equilateral triangles, shape (3, 3, 2)."""
        v = self.as_array()
        mid = 0.5 * (v[0] + v[1])
        return np.array([[v[0], mid, v[3]], [mid, v[2], v[3]], [mid, v[1], v[2]]])

    def reflect(self, a: Point2, b: Point2) -> "Trapezoid":
        """Mirror image across the line through ``a`` and ``b``."""
        r = [_reflect(p, a, b) for p in self.vertices]
        # reflection flips orientation; keep the long base as the first edge
        return Trapezoid((r[1], r[0], r[3], r[2]))

    def contains(self, points, tol: float = 1e-12) -> np.ndarray:
        """Boolean mask of points inside or on the boundary (convex test)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        v = self.as_array()
        inside = np.ones(len(pts), dtype=bool)
        for i in range(4):
            a, b = v[i], v[(i + 1) % 4]
            edge = b - a
            cross = edge[0] * (pts[:, 1] - a[1]) - edge[1] * (pts[:, 0] - a[0])
            inside &= cross >= -tol
        return inside


def canonical_trapezoid() -> Trapezoid:
    h = SQRT3 / 2
    return Trapezoid((Point2(0.0, 0.0), Point2(2.0, 0.0), Point2(1.5, h), Point2(0.5, h)))


@dataclass(frozen=True)
class Arrangement:
    case_id: Case
    source: Trapezoid
    target: Trapezoid
    d_max: float

    def cross_diameter(self) -> float:
        """Largest distance between a point of ``source`` and one of ``target``."""
        s, t = self.source.as_array(), self.target.as_array()
        return float(np.max(np.linalg.norm(s[:, None, :] - t[None, :, :], axis=-1)))

    def union_vertices(self) -> list[Point2]:
        seen: list[Point2] = []
        for p in self.source.vertices + self.target.vertices:
            if all(p.distance(q) > 1e-9 for q in seen):
                seen.append(p)
        return seen


def make_arrangement(case_id: Case | str) -> Arrangement:
    case = Case.parse(case_id)
    src = canonical_trapezoid()
    v0, v1, v2, v3 = src.vertices
    if case is Case.AB:
        tgt = src
    elif case is Case.CD:
        tgt = src.reflect(v0, v1)
    elif case is Case.EF:
        tgt = src.reflect(v1, v2)
    else:
        tgt = src.reflect(v2, v3)
    return Arrangement(case, src, tgt, D_MAX[case])


def make_rng(seed: int | None = None) -> np.random.Generator:
    """Seeded PCG64 stream; every sampler in the package draws from one of these."""
    return np.random.Generator(np.random.PCG64(seed))


def sample_points(t: Trapezoid, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw ``n`` points uniformly from ``t`` as an (n, 2) array.

    Picks one of the three equal-area triangles, then folds a uniform point of
    the unit square into it.
    """
    tri = t.triangles()
    k = rng.integers(0, 3, size=n)
    u = rng.random(n)
    v = rng.random(n)
    fold = u + v > 1.0
    u[fold] = 1.0 - u[fold]
    v[fold] = 1.0 - v[fold]
    a = tri[k, 0]
    return a + u[:, None] * (tri[k, 1] - a) + v[:, None] * (tri[k, 2] - a)


def sample_point(t: Trapezoid, rng: np.random.Generator) -> Point2:
    x, y = sample_points(t, rng, 1)[0]
    return Point2(float(x), float(y))


def sample_pairs(
    a: Arrangement, rng: np.random.Generator, n: int
) -> tuple[np.ndarray, np.ndarray]:
    return sample_points(a.source, rng, n), sample_points(a.target, rng, n)


def sample_pair(a: Arrangement, rng: np.random.Generator) -> tuple[Point2, Point2]:
    p, q = sample_pairs(a, rng, 1)
    return Point2(*map(float, p[0])), Point2(*map(float, q[0]))


def sample_distances(a: Arrangement, rng: np.random.Generator, n: int) -> np.ndarray:
    p, q = sample_pairs(a, rng, n)
    return np.hypot(p[:, 0] - q[:, 0], p[:, 1] - q[:, 1])


def all_cases(selector: str | Iterable[str] = "all") -> list[Case]:
    if isinstance(selector, str):
        if selector.lower() == "all":
            return list(Case)
        return [Case.parse(selector)]
    return [Case.parse(s) for s in selector]
