"""Planar primitives: points, directions, circular arcs and their intersections.

Arcs are carried around internally as flat float rows so the compiled kernels
can consume them without conversion.  Row layout (see ``ROW_*`` constants)::

    kind, sx, sy, ex, ey, cx, cy, r, lo, sweep, dir

``kind`` is 0 for a segment and 1 for a circle arc.  For circle arcs the
angular range is ``[lo, lo + sweep]`` measured counter-clockwise with
``lo`` in ``[0, 2pi)``; ``dir`` is +1 when the arc is traversed
counter-clockwise (start at ``lo``) and -1 when traversed clockwise (start at
``lo + sweep``).  Start and end points are stored explicitly so that adjacent
arcs of a loop share bit-identical vertices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from . import kernels

TWO_PI = 2.0 * math.pi

ROW_KIND, ROW_SX, ROW_SY, ROW_EX, ROW_EY, ROW_CX, ROW_CY, ROW_R, ROW_LO, ROW_SWEEP, ROW_DIR = range(11)
ROW_WIDTH = 11
SEGMENT, CIRCLE = 0.0, 1.0


class GeometryError(ValueError):
    """Raised when an input violates a geometric precondition."""


@dataclass(frozen=True)
class Tolerance:
    length: float = 1e-9
    angle: float = 1e-9
    norm: float = 1e-9

    def __post_init__(self):
        if min(self.length, self.angle, self.norm) <= 0:
            raise ValueError("tolerances must be strictly positive")


TOL = Tolerance()


class Point(NamedTuple):
    x: float
    y: float


class UnitVector(NamedTuple):
    dx: float
    dy: float

    @classmethod
    def of(cls, dx: float, dy: float) -> "UnitVector":
        n = math.hypot(dx, dy)
        if n == 0.0:
            raise GeometryError("cannot normalize the zero vector")
        return cls(dx / n, dy / n)

    @classmethod
    def at_angle(cls, theta: float) -> "UnitVector":
        return cls(math.cos(theta), math.sin(theta))


def make_point(x: float, y: float) -> Point:
    if not (math.isfinite(x) and math.isfinite(y)):
        raise GeometryError(f"non-finite coordinate ({x}, {y})")
    return Point(float(x), float(y))


def norm_angle(theta: float) -> float:
    t = math.fmod(theta, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    if t >= TWO_PI:
        t -= TWO_PI
    return t


def _check_unit(v, tol: Tolerance) -> None:
    if abs(v[0] * v[0] + v[1] * v[1] - 1.0) > tol.norm:
        raise GeometryError(f"vector {tuple(v)} is not normalized")


def clockwise_angle(u, v, tol: Tolerance = TOL) -> float:
    """Angle swept when rotating ``u`` clockwise until it reaches ``v``, in [0, 2pi)."""
    _check_unit(u, tol)
    _check_unit(v, tol)
    cross = u[0] * v[1] - u[1] * v[0]
    dot = u[0] * v[0] + u[1] * v[1]
    ccw = math.atan2(cross, dot)
    a = norm_angle(-ccw)
    if a > TWO_PI - tol.angle or a < tol.angle:
        return 0.0
    return a


@dataclass(frozen=True)
class CircularArc:
    """A connected piece of a circle or a line segment.

    Circle arcs run from ``start_angle`` to ``end_angle`` in the given
    orientation; equal angles denote the full circle.
    """

    kind: str
    center: Point | None = None
    radius: float = 0.0
    start_angle: float = 0.0
    end_angle: float = 0.0
    orientation: str = "ccw"
    a: Point | None = None
    b: Point | None = None

    def __post_init__(self):
        if self.kind == "segment":
            if self.a is None or self.b is None:
                raise GeometryError("segment needs both endpoints")
        elif self.kind == "circle-arc":
            if self.center is None or not self.radius > TOL.length:
                raise GeometryError("circle arc needs a center and positive radius")
            if self.orientation not in ("ccw", "cw"):
                raise GeometryError(f"bad orientation {self.orientation!r}")
        else:
            raise GeometryError(f"unknown arc kind {self.kind!r}")

    @classmethod
    def segment(cls, a, b) -> "CircularArc":
        return cls("segment", a=make_point(*a), b=make_point(*b))

    @classmethod
    def circle(cls, center, radius, start_angle=0.0, end_angle=0.0, orientation="ccw") -> "CircularArc":
        return cls(
            "circle-arc",
            center=make_point(*center),
            radius=float(radius),
            start_angle=norm_angle(start_angle),
            end_angle=norm_angle(end_angle),
            orientation=orientation,
        )

    def to_row(self) -> tuple:
        if self.kind == "segment":
            return segment_row(self.a, self.b)
        return circle_row(self.center, self.radius, self.start_angle, self.end_angle, self.orientation)

    @classmethod
    def from_row(cls, row) -> "CircularArc":
        if row[ROW_KIND] == SEGMENT:
            return cls.segment((row[ROW_SX], row[ROW_SY]), (row[ROW_EX], row[ROW_EY]))
        lo, sweep = row[ROW_LO], row[ROW_SWEEP]
        if row[ROW_DIR] > 0:
            s, e, o = lo, lo + sweep, "ccw"
        else:
            s, e, o = lo + sweep, lo, "cw"
        return cls.circle((row[ROW_CX], row[ROW_CY]), row[ROW_R], s, e, o)


def segment_row(a, b) -> tuple:
    return (SEGMENT, float(a[0]), float(a[1]), float(b[0]), float(b[1]), 0.0, 0.0, 0.0, 0.0, 0.0, 1.0)


def circle_row(center, radius, start_angle, end_angle, orientation="ccw", full=None) -> tuple:
    """Row for a circle arc; ``full`` forces (or forbids) the full-circle reading."""
    cx, cy = float(center[0]), float(center[1])
    r = float(radius)
    s = norm_angle(start_angle)
    e = norm_angle(end_angle)
    if orientation == "ccw":
        sweep = norm_angle(e - s)
        lo, d = s, 1.0
    else:
        sweep = norm_angle(s - e)
        lo, d = e, -1.0
    if full or (full is None and sweep == 0.0):
        sweep = TWO_PI
    sx, sy = cx + r * math.cos(s), cy + r * math.sin(s)
    if sweep == TWO_PI:
        ex, ey = sx, sy
    else:
        ex, ey = cx + r * math.cos(e), cy + r * math.sin(e)
    return (CIRCLE, sx, sy, ex, ey, cx, cy, r, lo, sweep, d)


def arc_row_between(center, radius, p, q, direction: float, sweep: float | None = None) -> tuple:
    """Circle arc from point ``p`` to point ``q`` (both on the circle) in the given direction.

    The endpoint coordinates are copied verbatim, which keeps loops exactly closed.
    """
    cx, cy = center
    ts = math.atan2(p[1] - cy, p[0] - cx)
    te = math.atan2(q[1] - cy, q[0] - cx)
    if direction > 0:
        lo = norm_angle(ts)
        sw = norm_angle(te - ts) if sweep is None else sweep
    else:
        lo = norm_angle(te)
        sw = norm_angle(ts - te) if sweep is None else sweep
    if sw == 0.0:
        sw = TWO_PI
    return (CIRCLE, float(p[0]), float(p[1]), float(q[0]), float(q[1]), float(cx), float(cy), float(radius), lo, sw, float(direction))


def full_circle_row(center, radius, direction: float = 1.0) -> tuple:
    cx, cy = float(center[0]), float(center[1])
    p = (cx + radius, cy)
    return (CIRCLE, p[0], p[1], p[0], p[1], cx, cy, float(radius), 0.0, TWO_PI, float(direction))


def row_start(row) -> Point:
    return Point(row[ROW_SX], row[ROW_SY])


def row_end(row) -> Point:
    return Point(row[ROW_EX], row[ROW_EY])


def row_length(row) -> float:
    if row[ROW_KIND] == SEGMENT:
        return math.hypot(row[ROW_EX] - row[ROW_SX], row[ROW_EY] - row[ROW_SY])
    return row[ROW_R] * row[ROW_SWEEP]


def row_point_at(row, s: float) -> Point:
    """Point at arc-length ``s`` from the start."""
    if row[ROW_KIND] == SEGMENT:
        L = row_length(row)
        t = s / L if L > 0 else 0.0
        return Point(row[ROW_SX] + t * (row[ROW_EX] - row[ROW_SX]), row[ROW_SY] + t * (row[ROW_EY] - row[ROW_SY]))
    r = row[ROW_R]
    if row[ROW_DIR] > 0:
        th = row[ROW_LO] + s / r
    else:
        th = row[ROW_LO] + row[ROW_SWEEP] - s / r
    return Point(row[ROW_CX] + r * math.cos(th), row[ROW_CY] + r * math.sin(th))


def row_tangent_at(row, x: float, y: float) -> tuple[float, float]:
    """Unit direction of travel at (x, y), assumed on the arc."""
    if row[ROW_KIND] == SEGMENT:
        dx, dy = row[ROW_EX] - row[ROW_SX], row[ROW_EY] - row[ROW_SY]
        n = math.hypot(dx, dy)
        return (dx / n, dy / n) if n > 0 else (1.0, 0.0)
    rx, ry = x - row[ROW_CX], y - row[ROW_CY]
    n = math.hypot(rx, ry)
    if n == 0.0:
        return (1.0, 0.0)
    d = row[ROW_DIR]
    return (-d * ry / n, d * rx / n)


def row_start_tangent(row) -> tuple[float, float]:
    if row[ROW_KIND] == SEGMENT:
        return row_tangent_at(row, 0.0, 0.0)
    th = row[ROW_LO] if row[ROW_DIR] > 0 else row[ROW_LO] + row[ROW_SWEEP]
    d = row[ROW_DIR]
    return (-d * math.sin(th), d * math.cos(th))


def row_end_tangent(row) -> tuple[float, float]:
    if row[ROW_KIND] == SEGMENT:
        return row_tangent_at(row, 0.0, 0.0)
    th = row[ROW_LO] + row[ROW_SWEEP] if row[ROW_DIR] > 0 else row[ROW_LO]
    d = row[ROW_DIR]
    return (-d * math.sin(th), d * math.cos(th))


def row_param(row, x: float, y: float) -> float:
    """Arc-length parameter of the projection of (x, y) onto the arc's support."""
    if row[ROW_KIND] == SEGMENT:
        dx, dy = row[ROW_EX] - row[ROW_SX], row[ROW_EY] - row[ROW_SY]
        L = math.hypot(dx, dy)
        if L == 0.0:
            return 0.0
        return ((x - row[ROW_SX]) * dx + (y - row[ROW_SY]) * dy) / L
    th = math.atan2(y - row[ROW_CY], x - row[ROW_CX])
    if row[ROW_DIR] > 0:
        off = norm_angle(th - row[ROW_LO])
    else:
        off = norm_angle(row[ROW_LO] + row[ROW_SWEEP] - th)
    # points just before the start wrap around to ~2pi
    if off > row[ROW_SWEEP] and off > math.pi + row[ROW_SWEEP] / 2:
        off -= TWO_PI
    return off * row[ROW_R]


def sub_row(row, s0: float, s1: float, p0, q0) -> tuple:
    """Piece of ``row`` between arc-length parameters s0 < s1, with explicit endpoints."""
    if row[ROW_KIND] == SEGMENT:
        return segment_row(p0, q0)
    r = row[ROW_R]
    sw = (s1 - s0) / r
    if row[ROW_DIR] > 0:
        lo = norm_angle(row[ROW_LO] + s0 / r)
    else:
        lo = norm_angle(row[ROW_LO] + row[ROW_SWEEP] - s1 / r)
    return (CIRCLE, float(p0[0]), float(p0[1]), float(q0[0]), float(q0[1]), row[ROW_CX], row[ROW_CY], r, lo, sw, row[ROW_DIR])


def reverse_row(row) -> tuple:
    out = list(row)
    out[ROW_SX], out[ROW_SY], out[ROW_EX], out[ROW_EY] = row[ROW_EX], row[ROW_EY], row[ROW_SX], row[ROW_SY]
    out[ROW_DIR] = -row[ROW_DIR] if row[ROW_KIND] == CIRCLE else 1.0
    return tuple(out)


def same_support(a, b, tol: float) -> bool:
    """True when both rows lie on the same circle (same direction) or same directed line."""
    if a[ROW_KIND] != b[ROW_KIND]:
        return False
    if a[ROW_KIND] == CIRCLE:
        return (
            abs(a[ROW_CX] - b[ROW_CX]) <= tol
            and abs(a[ROW_CY] - b[ROW_CY]) <= tol
            and abs(a[ROW_R] - b[ROW_R]) <= tol
            and a[ROW_DIR] == b[ROW_DIR]
        )
    ta = row_tangent_at(a, 0, 0)
    tb = row_tangent_at(b, 0, 0)
    if ta[0] * tb[0] + ta[1] * tb[1] < 1.0 - 1e-12:
        return False
    # distance of b's endpoints from a's line
    nx, ny = -ta[1], ta[0]
    d1 = (b[ROW_SX] - a[ROW_SX]) * nx + (b[ROW_SY] - a[ROW_SY]) * ny
    d2 = (b[ROW_EX] - a[ROW_SX]) * nx + (b[ROW_EY] - a[ROW_SY]) * ny
    return abs(d1) <= tol and abs(d2) <= tol


def merge_rows(a, b) -> tuple:
    """Concatenate two consecutive rows on the same support."""
    if a[ROW_KIND] == SEGMENT:
        return segment_row(row_start(a), row_end(b))
    sw = a[ROW_SWEEP] + b[ROW_SWEEP]
    full = sw >= TWO_PI - 1e-12
    if full:
        sw = TWO_PI
    lo = a[ROW_LO] if a[ROW_DIR] > 0 else b[ROW_LO]
    return (CIRCLE, a[ROW_SX], a[ROW_SY], b[ROW_EX], b[ROW_EY], a[ROW_CX], a[ROW_CY], a[ROW_R], lo, sw, a[ROW_DIR])


def arc_arc_intersections(a: CircularArc, b: CircularArc, tol: Tolerance = TOL) -> tuple[list[Point], bool]:
    """Proper intersection points of two arcs, plus a flag for positive-length overlap."""
    pts = kernels.arc_pair_points(a.to_row(), b.to_row(), tol.length)
    proper = [Point(x, y) for x, y, flag in pts if flag == 0]
    overlap = any(flag == 1 for _, _, flag in pts) or kernels.arcs_overlap(a.to_row(), b.to_row(), tol.length)
    return _dedupe_points(proper, tol.length), overlap


def _dedupe_points(pts: Sequence[Point], tol: float) -> list[Point]:
    out: list[Point] = []
    for p in pts:
        if all(math.hypot(p.x - q.x, p.y - q.y) > tol for q in out):
            out.append(p)
    return out


def point_on_arc(p, a: CircularArc, tol: Tolerance = TOL) -> bool:
    d, _, _, _ = kernels.nearest(kernels.prepare([a.to_row()]), float(p[0]), float(p[1]))
    return d <= tol.length


def dist(p, q) -> float:
    return math.hypot(p[0] - q[0], p[1] - q[1])
