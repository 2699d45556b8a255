"""Independent ground truth for domain tests.

Domains are described by the primitives they are built from (disks, a cell,
points, a segment).  Membership is evaluated directly on the primitives, and
the distance from an outside point is the minimum over a finite candidate
set: every pairwise intersection of primitive curves plus the critical points
of the distance along each curve.  The nearest point of the domain is always
one of these, so the result is exact up to rounding.  No code from the
package's geometry stack is used.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

EPS_MEMBER = 1e-12


@dataclass
class Shape:
    kind: str  # points | segment | lens | union | disk
    cell: tuple[float, float, float, float] | None = None  # x0, y0, x1, y1
    centers: list[tuple[float, float]] = field(default_factory=list)
    radius: float = 1.0
    points: list[tuple[float, float]] = field(default_factory=list)

    # membership -------------------------------------------------------
    def _in_cell(self, x, y, tol=EPS_MEMBER):
        if self.cell is None:
            return True
        x0, y0, x1, y1 = self.cell
        return x0 - tol <= x <= x1 + tol and y0 - tol <= y <= y1 + tol

    def member(self, x: float, y: float, tol: float = EPS_MEMBER) -> bool:
        if self.kind == "points":
            return any(math.hypot(x - a, y - b) <= tol for a, b in self.points)
        if self.kind == "segment":
            return _seg_dist((x, y), *self.points) <= tol
        if not self._in_cell(x, y, tol):
            return False
        ds = [math.hypot(x - a, y - b) for a, b in self.centers]
        if self.kind in ("lens",):
            return max(ds) <= self.radius + tol
        return min(ds) <= self.radius + tol

    # distance -----------------------------------------------------------
    def candidates(self, p) -> list[tuple[float, float]]:
        out: list[tuple[float, float]] = []
        r = self.radius
        circles = [(c, r) for c in self.centers]
        lines = []
        if self.cell is not None:
            x0, y0, x1, y1 = self.cell
            corners = [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]
            out += corners
            lines = [(corners[i], corners[(i + 1) % 4]) for i in range(4)]
        for c, rad in circles:
            dx, dy = p[0] - c[0], p[1] - c[1]
            n = math.hypot(dx, dy)
            if n > 0:
                out.append((c[0] + rad * dx / n, c[1] + rad * dy / n))
                out.append((c[0] - rad * dx / n, c[1] - rad * dy / n))
        for a, b in lines:
            out.append(_seg_project(p, a, b))
        for i in range(len(circles)):
            for j in range(i + 1, len(circles)):
                out += _circle_circle(*circles[i], *circles[j])
        for c, rad in circles:
            for a, b in lines:
                out += _circle_segment(c, rad, a, b)
        return out

    def dist(self, x: float, y: float) -> float:
        if self.kind == "points":
            return min(math.hypot(x - a, y - b) for a, b in self.points)
        if self.kind == "segment":
            return _seg_dist((x, y), *self.points)
        if self.member(x, y, 0.0):
            return 0.0
        best = math.inf
        for q in self.candidates((x, y)):
            if self.member(q[0], q[1], 1e-10):
                best = min(best, math.hypot(x - q[0], y - q[1]))
        return best


def _seg_project(p, a, b):
    ax, ay = a
    vx, vy = b[0] - ax, b[1] - ay
    L2 = vx * vx + vy * vy
    t = 0.0 if L2 == 0 else max(0.0, min(1.0, ((p[0] - ax) * vx + (p[1] - ay) * vy) / L2))
    return (ax + t * vx, ay + t * vy)


def _seg_dist(p, a, b) -> float:
    q = _seg_project(p, a, b)
    return math.hypot(p[0] - q[0], p[1] - q[1])


def _circle_circle(c1, r1, c2, r2):
    dx, dy = c2[0] - c1[0], c2[1] - c1[1]
    d = math.hypot(dx, dy)
    if d == 0 or d > r1 + r2 or d < abs(r1 - r2):
        return []
    a = (r1 * r1 - r2 * r2 + d * d) / (2 * d)
    h = math.sqrt(max(r1 * r1 - a * a, 0.0))
    mx, my = c1[0] + a * dx / d, c1[1] + a * dy / d
    return [(mx + h * dy / d, my - h * dx / d), (mx - h * dy / d, my + h * dx / d)]


def _circle_segment(c, r, a, b):
    vx, vy = b[0] - a[0], b[1] - a[1]
    fx, fy = a[0] - c[0], a[1] - c[1]
    A = vx * vx + vy * vy
    B = 2 * (fx * vx + fy * vy)
    C = fx * fx + fy * fy - r * r
    disc = B * B - 4 * A * C
    if A == 0 or disc < 0:
        return []
    s = math.sqrt(disc)
    out = []
    for t in ((-B - s) / (2 * A), (-B + s) / (2 * A)):
        if -1e-12 <= t <= 1 + 1e-12:
            out.append((a[0] + t * vx, a[1] + t * vy))
    return out


def random_shape(rng: np.random.Generator, ix: int, iy: int, eps: float, kind: str) -> Shape:
    """Primitives for a small domain inside cell (ix, iy) of side eps."""
    x0, y0 = ix * eps, iy * eps
    cell = (x0, y0, x0 + eps, y0 + eps)
    cx, cy = x0 + eps / 2, y0 + eps / 2

    def inner():
        return (cx + rng.uniform(-0.45, 0.45) * eps, cy + rng.uniform(-0.45, 0.45) * eps)

    def ring(lo, hi):
        th = rng.uniform(0, 2 * math.pi)
        r = rng.uniform(lo, hi)
        return (cx + r * math.cos(th), cy + r * math.sin(th))

    if kind == "points":
        return Shape("points", points=[inner() for _ in range(int(rng.integers(1, 6)))])
    if kind == "segment":
        return Shape("segment", points=[inner(), inner()])
    if kind == "lens":
        a = ring(0.5, 1.0)
        b = (2 * cx - a[0] + rng.uniform(-0.05, 0.05), 2 * cy - a[1] + rng.uniform(-0.05, 0.05))
        return Shape("lens", cell=cell, centers=[a, b])
    return Shape("union", cell=cell, centers=[ring(0.97, 1.05) for _ in range(int(rng.integers(1, 6)))])


def build(shape: Shape, cell_obj):
    """The package's domain for ``shape`` (constructed through its public API)."""
    from ebst.domain import CircularDomain, clip_to_cell, disk, disk_union, intersect_domains, segment_domain

    if shape.kind == "points":
        return CircularDomain.from_points(shape.points)
    if shape.kind == "segment":
        return segment_domain(*shape.points)
    if shape.kind == "lens":
        return clip_to_cell(intersect_domains([disk(c) for c in shape.centers]), cell_obj)
    return clip_to_cell(disk_union(shape.centers), cell_obj)
