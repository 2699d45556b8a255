"""Circular domains: closed planar regions bounded by circular arcs and segments.

A region is a set of boundary loops, each an ordered cycle of arc rows with
the interior on the left (outer loops counter-clockwise, holes clockwise).
Finite point sets are admitted as a second kind of domain.  The empty domain
is a region with no loops.

Boolean operations split every boundary arc at its intersections with the
other inputs, classify each fragment by its midpoint, and chain the kept
fragments back into loops.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .geom import (
    CIRCLE,
    ROW_CX,
    ROW_CY,
    ROW_DIR,
    ROW_EX,
    ROW_EY,
    ROW_KIND,
    ROW_LO,
    ROW_R,
    ROW_SWEEP,
    ROW_SX,
    ROW_SY,
    SEGMENT,
    TOL,
    TWO_PI,
    CircularArc,
    GeometryError,
    Point,
    Tolerance,
    full_circle_row,
    merge_rows,
    norm_angle,
    row_end_tangent,
    row_length,
    row_param,
    row_point_at,
    row_start_tangent,
    row_tangent_at,
    same_support,
    segment_row,
    sub_row,
)

# distance at which a fragment midpoint counts as lying on another boundary
ON_TOL = 1e-8
# endpoint clustering radius when chaining fragments into loops
SNAP = 1e-8


class CircularDomain:
    """Immutable boundary representation of a circular domain."""

    __slots__ = ("kind", "loops", "points", "_prep", "_rows", "_bbox")

    def __init__(self, kind: str, loops=(), points=()):
        if kind not in ("region", "points"):
            raise GeometryError(f"unknown domain kind {kind!r}")
        self.kind = kind
        self.loops: tuple[tuple[tuple, ...], ...] = tuple(tuple(tuple(r) for r in lp) for lp in loops)
        self.points: tuple[Point, ...] = tuple(Point(float(p[0]), float(p[1])) for p in points)
        self._prep = None
        self._rows = None
        self._bbox = None

    @classmethod
    def region(cls, loops) -> "CircularDomain":
        return cls("region", loops=loops)

    @classmethod
    def from_points(cls, pts) -> "CircularDomain":
        return cls("points", points=pts)

    @classmethod
    def empty(cls) -> "CircularDomain":
        return cls("region")

    @property
    def is_region(self) -> bool:
        return self.kind == "region"

    @property
    def is_empty(self) -> bool:
        return not self.loops if self.kind == "region" else not self.points

    @property
    def rows(self) -> list[tuple]:
        if self._rows is None:
            self._rows = [r for lp in self.loops for r in lp]
        return self._rows

    def prepared(self):
        if self._prep is None or self._prep[0] != kernels.BACKEND:
            self._prep = (kernels.BACKEND, kernels.prepare(self.rows if self.rows else np.zeros((0, 11))))
        return self._prep[1]

    def arcs(self) -> list[list[CircularArc]]:
        return [[CircularArc.from_row(r) for r in lp] for lp in self.loops]

    def vertices(self) -> list[Point]:
        if self.kind == "points":
            return list(self.points)
        return [Point(r[ROW_SX], r[ROW_SY]) for r in self.rows]

    def bbox(self) -> tuple[float, float, float, float]:
        if self._bbox is None:
            if self.kind == "points":
                xs = [p.x for p in self.points] or [0.0]
                ys = [p.y for p in self.points] or [0.0]
                self._bbox = (min(xs), min(ys), max(xs), max(ys))
            elif not self.loops:
                self._bbox = (math.inf, math.inf, -math.inf, -math.inf)
            else:
                bs = [_row_bbox(r) for r in self.rows]
                self._bbox = (
                    min(b[0] for b in bs),
                    min(b[1] for b in bs),
                    max(b[2] for b in bs),
                    max(b[3] for b in bs),
                )
        return self._bbox

    def __repr__(self):
        if self.kind == "points":
            return f"CircularDomain(points={len(self.points)})"
        return f"CircularDomain(loops={[len(lp) for lp in self.loops]})"

    # -- serialization -------------------------------------------------
    def to_dict(self) -> dict:
        if self.kind == "points":
            return {"kind": "points", "points": [list(p) for p in self.points]}
        return {"kind": "region", "loops": [[_row_to_dict(r) for r in lp] for lp in self.loops]}

    @classmethod
    def from_dict(cls, data: dict) -> "CircularDomain":
        if data["kind"] == "points":
            return cls.from_points(data["points"])
        return cls.region([[_row_from_dict(a) for a in lp] for lp in data["loops"]])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "CircularDomain":
        return cls.from_dict(json.loads(text))


def _row_to_dict(r) -> dict:
    d = {"kind": "segment" if r[ROW_KIND] == SEGMENT else "circle-arc", "start": [r[ROW_SX], r[ROW_SY]], "end": [r[ROW_EX], r[ROW_EY]]}
    if r[ROW_KIND] == CIRCLE:
        d.update(center=[r[ROW_CX], r[ROW_CY]], radius=r[ROW_R], lo=r[ROW_LO], sweep=r[ROW_SWEEP], orientation="ccw" if r[ROW_DIR] > 0 else "cw")
    return d


def _row_from_dict(d) -> tuple:
    if d["kind"] == "segment":
        return segment_row(d["start"], d["end"])
    return (
        CIRCLE, float(d["start"][0]), float(d["start"][1]), float(d["end"][0]), float(d["end"][1]),
        float(d["center"][0]), float(d["center"][1]), float(d["radius"]), float(d["lo"]), float(d["sweep"]),
        1.0 if d["orientation"] == "ccw" else -1.0,
    )


def _row_bbox(r):
    if r[ROW_KIND] == SEGMENT:
        return (min(r[1], r[3]), min(r[2], r[4]), max(r[1], r[3]), max(r[2], r[4]))
    cx, cy, rad, lo, sw = r[5], r[6], r[7], r[8], r[9]
    if sw >= TWO_PI:
        return (cx - rad, cy - rad, cx + rad, cy + rad)
    x0, x1 = min(r[1], r[3]), max(r[1], r[3])
    y0, y1 = min(r[2], r[4]), max(r[2], r[4])
    for ang, side in ((0.0, 2), (0.5 * math.pi, 3), (math.pi, 0), (1.5 * math.pi, 1)):
        if norm_angle(ang - lo) <= sw:
            if side == 0:
                x0 = cx - rad
            elif side == 1:
                y0 = cy - rad
            elif side == 2:
                x1 = cx + rad
            else:
                y1 = cy + rad
    return (x0, y0, x1, y1)


@dataclass(frozen=True)
class GridCell:
    """Closed square [ox + ix*eps, ox + (ix+1)*eps] x [oy + iy*eps, oy + (iy+1)*eps]."""

    ix: int
    iy: int
    eps: float
    ox: float = 0.0
    oy: float = 0.0

    @property
    def x0(self) -> float:
        return self.ox + self.ix * self.eps

    @property
    def y0(self) -> float:
        return self.oy + self.iy * self.eps

    @property
    def x1(self) -> float:
        return self.ox + (self.ix + 1) * self.eps

    @property
    def y1(self) -> float:
        return self.oy + (self.iy + 1) * self.eps

    @property
    def center(self) -> Point:
        return Point(self.ox + (self.ix + 0.5) * self.eps, self.oy + (self.iy + 0.5) * self.eps)

    def corners(self) -> list[Point]:
        return [Point(self.x0, self.y0), Point(self.x1, self.y0), Point(self.x1, self.y1), Point(self.x0, self.y1)]

    def contains(self, p, tol: float = 0.0) -> bool:
        return self.x0 - tol <= p[0] <= self.x1 + tol and self.y0 - tol <= p[1] <= self.y1 + tol

    def distance_to(self, p) -> float:
        dx = max(self.x0 - p[0], 0.0, p[0] - self.x1)
        dy = max(self.y0 - p[1], 0.0, p[1] - self.y1)
        return math.hypot(dx, dy)

    def max_distance_to(self, p) -> float:
        dx = max(abs(p[0] - self.x0), abs(p[0] - self.x1))
        dy = max(abs(p[1] - self.y0), abs(p[1] - self.y1))
        return math.hypot(dx, dy)

    def to_domain(self) -> CircularDomain:
        return polygon(self.corners())


# -- constructors ------------------------------------------------------

def disk(center, radius: float = 1.0) -> CircularDomain:
    return CircularDomain.region([[full_circle_row(center, radius)]])


def polygon(pts: Sequence) -> CircularDomain:
    """Polygon region; vertices must be listed counter-clockwise."""
    n = len(pts)
    return CircularDomain.region([[segment_row(pts[i], pts[(i + 1) % n]) for i in range(n)]])


def segment_domain(a, b) -> CircularDomain:
    """Degenerate zero-area region traced a -> b -> a."""
    return CircularDomain.region([[segment_row(a, b), segment_row(b, a)]])


def lens(c1, c2, radius: float = 1.0) -> CircularDomain:
    return intersect_domains([disk(c1, radius), disk(c2, radius)])


# -- basic queries -----------------------------------------------------

def complexity(d: CircularDomain) -> int:
    """Number of boundary arcs plus vertices (point count for point sets)."""
    if d.kind == "points":
        return len(d.points)
    return sum(2 * len(lp) for lp in d.loops)


def contains(d: CircularDomain, p, tol: Tolerance = TOL) -> bool:
    """Closed membership test; boundary points count as inside."""
    x, y = float(p[0]), float(p[1])
    if d.kind == "points":
        return any(math.hypot(x - q.x, y - q.y) <= tol.length for q in d.points)
    if not d.loops:
        return False
    bx0, by0, bx1, by1 = d.bbox()
    if x < bx0 - tol.length or x > bx1 + tol.length or y < by0 - tol.length or y > by1 + tol.length:
        return False
    A = d.prepared()
    dist, _, _, _ = kernels.nearest(A, x, y)
    if dist <= tol.length:
        return True
    return kernels.winding(A, x, y) != 0


def contains_many(d: CircularDomain, pts, tol: Tolerance = TOL) -> np.ndarray:
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    if d.kind == "points":
        if not d.points:
            return np.zeros(len(pts), dtype=bool)
        q = np.asarray(d.points)
        dd = np.hypot(pts[:, None, 0] - q[None, :, 0], pts[:, None, 1] - q[None, :, 1])
        return (dd <= tol.length).any(axis=1)
    if not d.loops:
        return np.zeros(len(pts), dtype=bool)
    A = d.prepared()
    w = np.asarray(kernels.winding_many(A, pts)) != 0
    near = np.array([n[0] <= tol.length for n in kernels.nearest_many(A, pts)], dtype=bool)
    return w | near


def boundary_distance(d: CircularDomain, p) -> float:
    if d.kind == "points":
        return min((math.hypot(p[0] - q.x, p[1] - q.y) for q in d.points), default=math.inf)
    if not d.loops:
        return math.inf
    return kernels.nearest(d.prepared(), float(p[0]), float(p[1]))[0]


def nearest_point(d: CircularDomain, p) -> tuple[Point, float]:
    """Closest point of the (closed) domain to ``p`` and its distance."""
    if d.kind == "points":
        q = min(d.points, key=lambda q: math.hypot(p[0] - q.x, p[1] - q.y))
        return q, math.hypot(p[0] - q.x, p[1] - q.y)
    if not d.loops:
        raise GeometryError("empty domain has no nearest point")
    if contains(d, p):
        return Point(float(p[0]), float(p[1])), 0.0
    dist, _, qx, qy = kernels.nearest(d.prepared(), float(p[0]), float(p[1]))
    return Point(qx, qy), dist


def turn_angle(t_in, t_out) -> float:
    """Signed turn from direction t_in to t_out in (-pi, pi]."""
    cross = t_in[0] * t_out[1] - t_in[1] * t_out[0]
    dot = t_in[0] * t_out[0] + t_in[1] * t_out[1]
    th = math.atan2(cross, dot)
    if th <= -math.pi + 1e-12:
        th = math.pi
    return th


def loop_area(loop) -> float:
    """Signed area enclosed by a loop (positive for counter-clockwise)."""
    a = 0.0
    for r in loop:
        if r[ROW_KIND] == SEGMENT:
            a += 0.5 * (r[ROW_SX] * r[ROW_EY] - r[ROW_EX] * r[ROW_SY])
        else:
            cx, cy, rad, lo, sw, d = r[5], r[6], r[7], r[8], r[9], r[10]
            if d > 0:
                t0, t1 = lo, lo + sw
            else:
                t0, t1 = lo + sw, lo
            a += 0.5 * (rad * rad * (t1 - t0) + rad * (cx * (math.sin(t1) - math.sin(t0)) - cy * (math.cos(t1) - math.cos(t0))))
    return a


def area(d: CircularDomain) -> float:
    if d.kind == "points":
        return 0.0
    return sum(loop_area(lp) for lp in d.loops)


def is_pseudo_convex(d: CircularDomain) -> bool:
    """Every circle arc bulges outward: the interior lies on its disk's side."""
    if d.kind == "points":
        return True
    return all(r[ROW_DIR] > 0 for r in d.rows if r[ROW_KIND] == CIRCLE)


def is_convex(d: CircularDomain, tol: Tolerance = TOL) -> bool:
    """Single loop, outward-bulging arcs, and no right turn at any vertex."""
    if d.kind == "points":
        return len(d.points) <= 1
    if len(d.loops) != 1 or not is_pseudo_convex(d):
        return False
    lp = d.loops[0]
    total = 0.0
    for i, r in enumerate(lp):
        th = turn_angle(row_end_tangent(lp[i - 1]), row_start_tangent(r))
        if th < -1e-7:
            return False
        total += th
        if r[ROW_KIND] == CIRCLE:
            total += r[ROW_SWEEP]
    return abs(total - TWO_PI) < 1e-6


# -- fragment machinery ------------------------------------------------

def _split_row(row, pts, tol: float) -> list[tuple]:
    """Split a row at the given on-arc points (x, y)."""
    L = row_length(row)
    cuts = []
    for x, y in pts:
        s = row_param(row, x, y)
        if tol < s < L - tol:
            cuts.append((s, x, y))
    if not cuts:
        return [row]
    cuts.sort()
    merged = [cuts[0]]
    for c in cuts[1:]:
        if c[0] - merged[-1][0] > tol:
            merged.append(c)
    out = []
    s_prev, p_prev = 0.0, (row[ROW_SX], row[ROW_SY])
    for s, x, y in merged:
        out.append(sub_row(row, s_prev, s, p_prev, (x, y)))
        s_prev, p_prev = s, (x, y)
    out.append(sub_row(row, s_prev, L, p_prev, (row[ROW_EX], row[ROW_EY])))
    return out


def _midpoint(row) -> tuple[Point, tuple[float, float]]:
    m = row_point_at(row, 0.5 * row_length(row))
    return m, row_tangent_at(row, m.x, m.y)


def _curvature(row) -> float:
    if row[ROW_KIND] == SEGMENT:
        return 0.0
    return row[ROW_DIR] / row[ROW_R]


def _cluster(points: list[tuple[float, float]], snap: float) -> list[int]:
    """Union points closer than ``snap``; returns a cluster id per point."""
    n = len(points)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    order = sorted(range(n), key=lambda i: points[i][0])
    for a in range(n):
        i = order[a]
        xi, yi = points[i]
        for b in range(a + 1, n):
            j = order[b]
            xj, yj = points[j]
            if xj - xi > snap:
                break
            if abs(yj - yi) <= snap and math.hypot(xj - xi, yj - yi) <= snap:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri
    return [find(i) for i in range(n)]


def _cw_from(ref, t) -> float:
    """Clockwise angle from direction ``ref`` to ``t`` in (0, 2pi]."""
    a = math.atan2(ref[1], ref[0]) - math.atan2(t[1], t[0])
    a = math.fmod(a, TWO_PI)
    if a <= 1e-12:
        a += TWO_PI
    return a


def trace_loops(frags: list[tuple], strict: bool = True) -> list[list[tuple]]:
    """Chain directed fragments into closed loops.

    At a vertex with several unused outgoing fragments the walk takes the first
    one clockwise from the reversed incoming direction, which keeps the face on
    the left as tight as possible.
    """
    if not frags:
        return []
    pts = []
    for f in frags:
        pts.append((f[ROW_SX], f[ROW_SY]))
        pts.append((f[ROW_EX], f[ROW_EY]))
    cid = _cluster(pts, SNAP)
    start_c = [cid[2 * i] for i in range(len(frags))]
    end_c = [cid[2 * i + 1] for i in range(len(frags))]
    outgoing: dict[int, list[int]] = {}
    for i, c in enumerate(start_c):
        outgoing.setdefault(c, []).append(i)
    used = [False] * len(frags)
    loops = []
    for first in range(len(frags)):
        if used[first]:
            continue
        loop = [first]
        used[first] = True
        cur = first
        ok = False
        for _ in range(len(frags) + 1):
            v = end_c[cur]
            if v == start_c[first] and (len(outgoing.get(v, ())) == 1 or not _has_unused(outgoing[v], used)):
                ok = True
                break
            cands = [j for j in outgoing.get(v, ()) if not used[j]]
            if not cands:
                if v == start_c[first]:
                    ok = True
                break
            if len(cands) > 1 or v == start_c[first]:
                ref = row_end_tangent(frags[cur])
                ref = (-ref[0], -ref[1])
                options = [(j, _cw_from(ref, row_start_tangent(frags[j])), _curvature(frags[j])) for j in cands]
                if v == start_c[first]:
                    options.append((first, _cw_from(ref, row_start_tangent(frags[first])), _curvature(frags[first])))
                options.sort(key=lambda o: (round(o[1], 9), o[2]))
                nxt = options[0][0]
                if nxt == first:
                    ok = True
                    break
            else:
                nxt = cands[0]
            used[nxt] = True
            loop.append(nxt)
            cur = nxt
        if not ok:
            if strict:
                raise GeometryError("boundary fragments do not close into a loop")
            continue
        rows = [list(frags[i]) for i in loop]
        # glue endpoints exactly so consecutive arcs share vertices
        for k in range(len(rows)):
            nx = rows[(k + 1) % len(rows)]
            rows[k][ROW_EX], rows[k][ROW_EY] = nx[ROW_SX], nx[ROW_SY]
        loops.append([tuple(r) for r in rows])
    return loops


def _has_unused(idx, used) -> bool:
    return any(not used[j] for j in idx)


def normalize_loop(loop: list[tuple], tol: float = TOL.length) -> list[tuple]:
    """Merge consecutive arcs on a common support and drop zero-length arcs."""
    rows = [r for r in loop if row_length(r) > tol] or list(loop[:1])
    if len(rows) < len(loop) and rows:
        for k in range(len(rows)):
            nx = rows[(k + 1) % len(rows)]
            r = list(rows[k])
            r[ROW_EX], r[ROW_EY] = nx[ROW_SX], nx[ROW_SY]
            rows[k] = tuple(r)
    changed = True
    while changed and len(rows) > 1:
        changed = False
        for k in range(len(rows)):
            a, b = rows[k], rows[(k + 1) % len(rows)]
            if same_support(a, b, 10 * tol) and _continues(a, b):
                m = merge_rows(a, b)
                if (k + 1) % len(rows) == 0:
                    rows = [m] + rows[1:-1]
                else:
                    rows = rows[:k] + [m] + rows[k + 2:]
                changed = True
                break
    if len(rows) == 1 and rows[0][ROW_KIND] == CIRCLE:
        r = list(rows[0])
        r[ROW_SWEEP] = TWO_PI
        r[ROW_EX], r[ROW_EY] = r[ROW_SX], r[ROW_SY]
        rows = [tuple(r)]
    return rows


def _continues(a, b) -> bool:
    ta = row_end_tangent(a)
    tb = row_start_tangent(b)
    return ta[0] * tb[0] + ta[1] * tb[1] > 1.0 - 1e-9


def _finish(loops: list[list[tuple]]) -> CircularDomain:
    out = []
    for lp in loops:
        lp = normalize_loop(lp)
        if len(lp) == 1 and lp[0][ROW_KIND] == SEGMENT:
            continue
        if abs(loop_area(lp)) <= 1e-18:
            continue
        out.append(lp)
    return CircularDomain.region(out)


def _coincident(f, other, tol: float = ON_TOL) -> bool:
    """Whether two rows lie on one common circle or line (either direction)."""
    if f[ROW_KIND] != other[ROW_KIND]:
        return False
    if f[ROW_KIND] == CIRCLE:
        return (
            abs(f[ROW_CX] - other[ROW_CX]) <= tol
            and abs(f[ROW_CY] - other[ROW_CY]) <= tol
            and abs(f[ROW_R] - other[ROW_R]) <= tol
        )
    dx, dy = other[ROW_EX] - other[ROW_SX], other[ROW_EY] - other[ROW_SY]
    L = math.hypot(dx, dy)
    if L == 0.0:
        return False
    for x, y in ((f[ROW_SX], f[ROW_SY]), (f[ROW_EX], f[ROW_EY])):
        if abs((x - other[ROW_SX]) * dy - (y - other[ROW_SY]) * dx) / L > tol:
            return False
    return True


def _boolean(ds: Sequence[CircularDomain], mode: str) -> CircularDomain:
    """Intersection ("and") or union ("or") of region domains."""
    n = len(ds)
    rows = [list(d.rows) for d in ds]
    splits: list[list[list[tuple[float, float]]]] = [[[] for _ in r] for r in rows]
    boxes = [d.bbox() for d in ds]
    for a in range(n):
        for b in range(a + 1, n):
            ba, bb = boxes[a], boxes[b]
            if ba[0] > bb[2] + ON_TOL or bb[0] > ba[2] + ON_TOL or ba[1] > bb[3] + ON_TOL or bb[1] > ba[3] + ON_TOL:
                continue
            for i, j, x, y, _ in kernels.pair_intersections(ds[a].prepared(), ds[b].prepared(), TOL.length):
                splits[a][i].append((x, y))
                splits[b][j].append((x, y))
    kept = []
    for a in range(n):
        frags = []
        for i, row in enumerate(rows[a]):
            frags.extend(_split_row(row, splits[a][i], TOL.length))
        if not frags:
            continue
        mids = [_midpoint(f) for f in frags]
        mid_pts = np.array([m[0] for m in mids], dtype=float)
        keep = np.ones(len(frags), dtype=bool)
        for b in range(n):
            if b == a:
                continue
            B = ds[b].prepared()
            near = kernels.nearest_many(B, mid_pts)
            inside = np.asarray(kernels.winding_many(B, mid_pts)) != 0
            for k in range(len(frags)):
                if not keep[k]:
                    continue
                dist, idx, qx, qy = near[k]
                if dist <= ON_TOL and _coincident(frags[k], ds[b].rows[idx]):
                    t_other = row_tangent_at(ds[b].rows[idx], qx, qy)
                    t_me = mids[k][1]
                    same = t_other[0] * t_me[0] + t_other[1] * t_me[1] > 0
                    keep[k] = same and a < b
                elif mode == "and":
                    keep[k] = bool(inside[k])
                else:
                    keep[k] = not inside[k]
        kept.extend(f for f, k in zip(frags, keep) if k)
    return _finish(trace_loops(kept))


def intersect_domains(ds: Sequence[CircularDomain]) -> CircularDomain:
    """Closed intersection of region domains (empty domain if disjoint)."""
    ds = list(ds)
    if not ds:
        raise GeometryError("intersection of zero domains")
    for d in ds:
        if d.kind != "region":
            raise GeometryError("intersect_domains expects region domains")
        if d.is_empty:
            return CircularDomain.empty()
    if len(ds) == 1:
        return ds[0]
    bx = [d.bbox() for d in ds]
    x0 = max(b[0] for b in bx)
    y0 = max(b[1] for b in bx)
    x1 = min(b[2] for b in bx)
    y1 = min(b[3] for b in bx)
    if x0 > x1 + ON_TOL or y0 > y1 + ON_TOL:
        return CircularDomain.empty()
    return _boolean(ds, "and")


def union_domains(ds: Sequence[CircularDomain]) -> CircularDomain:
    """Union of region domains; used for pseudo-disk unions."""
    ds = [d for d in ds if not d.is_empty]
    if not ds:
        return CircularDomain.empty()
    if len(ds) == 1:
        return ds[0]
    return _boolean(ds, "or")


def clip_to_cell(d: CircularDomain, cell: GridCell) -> CircularDomain:
    """Intersection of a domain with a closed grid cell."""
    if d.kind == "points":
        return CircularDomain.from_points([p for p in d.points if cell.contains(p, TOL.length)])
    if d.is_empty:
        return d
    bx0, by0, bx1, by1 = d.bbox()
    if bx0 > cell.x1 or bx1 < cell.x0 or by0 > cell.y1 or by1 < cell.y0:
        return CircularDomain.empty()
    if bx0 >= cell.x0 and bx1 <= cell.x1 and by0 >= cell.y0 and by1 <= cell.y1:
        return d
    return _boolean([d, cell.to_domain()], "and")


def is_full_cell(d: CircularDomain, cell: GridCell, tol: float = 1e-9) -> bool:
    """Whether ``d`` is exactly the whole square cell."""
    if d.kind != "region" or len(d.loops) != 1 or len(d.loops[0]) != 4:
        return False
    if any(r[ROW_KIND] != SEGMENT for r in d.loops[0]):
        return False
    return abs(area(d) - cell.eps * cell.eps) <= tol * cell.eps


def disk_union(ps: Iterable, radius: float = 1.0) -> CircularDomain:
    """Boundary of the union of equal disks centered at ``ps``."""
    pts = [Point(float(p[0]), float(p[1])) for p in ps]
    if not pts:
        raise GeometryError("disk_union of an empty point set")
    uniq: list[Point] = []
    for p in pts:
        if all(math.hypot(p.x - q.x, p.y - q.y) > TOL.length for q in uniq):
            uniq.append(p)
    return union_domains([disk(p, radius) for p in uniq])


# -- vertical decomposition -------------------------------------------

def reflex_vertices(d: CircularDomain, tol: float = 1e-9) -> list[tuple[Point, tuple, tuple]]:
    """Reflex vertices with their incoming and outgoing tangents."""
    out = []
    for lp in d.loops:
        for i, r in enumerate(lp):
            t_in, t_out = row_end_tangent(lp[i - 1]), row_start_tangent(r)
            if turn_angle(t_in, t_out) < -tol:
                out.append((Point(r[ROW_SX], r[ROW_SY]), t_in, t_out))
    return out


def _enters_interior(t_in, t_out, direction, tol: float = 1e-12) -> bool:
    """Whether a ray leaving a vertex in ``direction`` starts inside the wedge
    swept counter-clockwise from the outgoing tangent to the reversed incoming one.
    Rays tangent to either side graze the boundary and are rejected."""
    base = math.atan2(t_out[1], t_out[0])
    wedge = norm_angle(math.atan2(-t_in[1], -t_in[0]) - base)
    a = norm_angle(math.atan2(direction[1], direction[0]) - base)
    return tol < a < wedge - tol


def _ray_hit(d: CircularDomain, v: Point, direction: float) -> Point | None:
    """First boundary point strictly beyond ``v`` on the vertical ray."""
    x0, y0, x1, y1 = d.bbox()
    far = (y1 + 1.0) if direction > 0 else (y0 - 1.0)
    seg = kernels.prepare([segment_row(v, (v.x, far))])
    best = None
    for _, _, x, y, _ in kernels.pair_intersections(seg, d.prepared(), TOL.length):
        t = (y - v.y) * direction
        if t > 10 * TOL.length and (best is None or t < best[0]):
            best = (t, Point(v.x, y))
    return best[1] if best else None


def vertical_decomposition(d: CircularDomain) -> list[CircularDomain]:
    """Cut a pseudo-convex region into convex pieces by vertical chords at reflex vertices."""
    if d.kind != "region":
        raise GeometryError("vertical decomposition needs a region")
    if not is_pseudo_convex(d):
        raise GeometryError("vertical decomposition requires a pseudo-convex domain")
    if d.is_empty:
        return []
    chords: list[tuple[Point, Point]] = []
    for v, t_in, t_out in reflex_vertices(d):
        for direction in (1.0, -1.0):
            if not _enters_interior(t_in, t_out, (0.0, direction)):
                continue
            hit = _ray_hit(d, v, direction)
            if hit is None:
                continue
            lo, hi = (v, hit) if v.y < hit.y else (hit, v)
            if any(abs(c[0].x - lo.x) <= SNAP and abs(c[0].y - lo.y) <= SNAP and abs(c[1].y - hi.y) <= SNAP for c in chords):
                continue
            chords.append((lo, hi))
    if not chords and len(d.loops) == 1:
        return [d]
    cut_pts: dict[int, list[tuple[float, float]]] = {}
    rows = d.rows
    A = d.prepared()
    for lo, hi in chords:
        for p in (lo, hi):
            _, idx, _, _ = kernels.nearest(A, p.x, p.y)
            cut_pts.setdefault(idx, []).append((p.x, p.y))
    edges = []
    for i, row in enumerate(rows):
        edges.extend(_split_row(row, cut_pts.get(i, []), TOL.length))
    for lo, hi in chords:
        edges.append(segment_row(lo, hi))
        edges.append(segment_row(hi, lo))
    pieces = []
    for lp in trace_loops(edges):
        lp = normalize_loop(lp)
        if loop_area(lp) > 1e-18:
            pieces.append(CircularDomain.region([lp]))
    return pieces
