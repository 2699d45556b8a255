"""Minkowski sums with the closed unit disk, plus the Lambda-decomposition and
monotonicity utilities used to check the complexity bounds on such sums.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .domain import (
    CircularDomain,
    _cluster,
    _finish,
    _midpoint,
    _split_row,
    boundary_distance,
    contains,
    contains_many,
    disk_union,
    is_convex,
    is_pseudo_convex,
    loop_area,
    trace_loops,
    turn_angle,
    union_domains,
    vertical_decomposition,
    SNAP,
)
from .geom import (
    CIRCLE,
    ROW_CX,
    ROW_CY,
    ROW_DIR,
    ROW_KIND,
    ROW_LO,
    ROW_R,
    ROW_SWEEP,
    ROW_SX,
    ROW_SY,
    SEGMENT,
    TOL,
    TWO_PI,
    GeometryError,
    Point,
    UnitVector,
    arc_arc_intersections,
    arc_row_between,
    CircularArc,
    norm_angle,
    reverse_row,
    row_end_tangent,
    row_length,
    row_param,
    row_point_at,
    row_start_tangent,
    row_tangent_at,
    segment_row,
    sub_row,
)

METHODS = ("auto", "decomposition", "convolution")


def _normal(t) -> tuple[float, float]:
    """Right-hand normal, i.e. outward for a boundary with the interior on the left."""
    return (t[1], -t[0])


def _offset_row(r) -> tuple:
    if r[ROW_KIND] == SEGMENT:
        t = row_start_tangent(r)
        nx, ny = _normal(t)
        return segment_row((r[1] + nx, r[2] + ny), (r[3] + nx, r[4] + ny))
    rad = r[ROW_R]
    if r[ROW_DIR] > 0:
        k = (rad + 1.0) / rad
    else:
        k = (rad - 1.0) / rad
    cx, cy = r[ROW_CX], r[ROW_CY]
    sx, sy = cx + k * (r[1] - cx), cy + k * (r[2] - cy)
    ex, ey = cx + k * (r[3] - cx), cy + k * (r[4] - cy)
    new_r = abs(rad * k)
    if new_r <= TOL.length:
        return None
    if r[ROW_DIR] < 0 and rad < 1.0:
        # a concave arc of radius < 1 flips through its center
        return (CIRCLE, sx, sy, ex, ey, cx, cy, new_r, norm_angle(r[ROW_LO] + math.pi), r[ROW_SWEEP], r[ROW_DIR])
    return (CIRCLE, sx, sy, ex, ey, cx, cy, new_r, r[ROW_LO], r[ROW_SWEEP], r[ROW_DIR])


def _vertex_arc(v, n_in, n_out, turn: float):
    """Unit arc around vertex ``v`` joining the offsets of its two incident arcs."""
    p = (v[0] + n_in[0], v[1] + n_in[1])
    q = (v[0] + n_out[0], v[1] + n_out[1])
    if turn >= 0:
        return arc_row_between(v, 1.0, p, q, 1.0, sweep=turn if turn > 0 else None)
    return arc_row_between(v, 1.0, p, q, -1.0, sweep=-turn)


def offset_cycle(loop: Sequence[tuple], tol: float = 1e-12) -> list[tuple]:
    """Outward unit offset of one loop as a closed (possibly self-crossing) cycle.

    Convex vertices sprout counter-clockwise unit arcs; reflex vertices get the
    reversed arc so the cycle stays connected.
    """
    out = []
    n = len(loop)
    offs = [_offset_row(r) for r in loop]
    for i in range(n):
        prev = loop[i - 1]
        cur = loop[i]
        t_in = row_end_tangent(prev)
        t_out = row_start_tangent(cur)
        turn = turn_angle(t_in, t_out)
        if abs(turn) > tol:
            v = (cur[ROW_SX], cur[ROW_SY])
            out.append(_vertex_arc(v, _normal(t_in), _normal(t_out), turn))
        if offs[i] is not None:
            out.append(offs[i])
    # make consecutive endpoints bit-identical
    rows = [list(r) for r in out]
    for k in range(len(rows)):
        nx = rows[(k + 1) % len(rows)]
        rows[k][3], rows[k][4] = nx[1], nx[2]
    return [tuple(r) for r in rows]


def _convex_sum(d: CircularDomain) -> CircularDomain:
    return _finish([offset_cycle(lp) for lp in d.loops])


def distance_to(d: CircularDomain, p) -> float:
    """Euclidean distance from ``p`` to the closed domain."""
    if d.kind == "points":
        return min(math.hypot(p[0] - q.x, p[1] - q.y) for q in d.points)
    if contains(d, p):
        return 0.0
    return boundary_distance(d, p)


def _convolution_sum(d: CircularDomain, delta: float = 1e-7) -> CircularDomain:
    """Offset every loop, split at self-crossings, keep fragments on the true boundary."""
    cycles = [offset_cycle(lp) for lp in d.loops]
    rows = [r for c in cycles for r in c]
    A = kernels.prepare(rows)
    splits: list[list] = [[] for _ in rows]
    for i, j, x, y, _ in kernels.pair_intersections(A, A, TOL.length, True):
        splits[i].append((x, y))
        splits[j].append((x, y))
    kept = []
    for i, r in enumerate(rows):
        for f in _split_row(r, splits[i], TOL.length):
            m, t = _midpoint(f)
            n = _normal(t)
            out_pt = (m.x + delta * n[0], m.y + delta * n[1])
            in_pt = (m.x - delta * n[0], m.y - delta * n[1])
            if distance_to(d, out_pt) > 1.0 + 0.5 * delta and distance_to(d, in_pt) < 1.0 - 0.5 * delta:
                kept.append(f)
    return _finish(trace_loops(_dedupe_fragments(kept)))


def _dedupe_fragments(frags: list[tuple]) -> list[tuple]:
    """Drop fragments duplicated by coincident supports."""
    out = []
    for f in frags:
        m, t = _midpoint(f)
        dup = False
        for g in out:
            if abs(f[1] - g[1]) <= SNAP and abs(f[2] - g[2]) <= SNAP and abs(f[3] - g[3]) <= SNAP and abs(f[4] - g[4]) <= SNAP:
                mg, tg = _midpoint(g)
                if math.hypot(m.x - mg.x, m.y - mg.y) <= SNAP:
                    dup = True
                    break
        if not dup:
            out.append(f)
    return out


def minkowski_unit_disk(d: CircularDomain, method: str = "auto") -> CircularDomain:
    """Closed Minkowski sum of a pseudo-convex domain (or point set) with the unit disk.

    ``auto`` offsets convex inputs directly and otherwise sums the pieces of a
    vertical decomposition and unions them; ``convolution`` offsets the whole
    boundary and resolves self-crossings by a distance test.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    if d.kind == "points":
        return disk_union(d.points, 1.0)
    if d.is_empty:
        return d
    if not is_pseudo_convex(d):
        raise GeometryError("Minkowski sum requires a pseudo-convex domain")
    if method != "convolution" and is_convex(d):
        return _convex_sum(d)
    if method == "convolution":
        return _convolution_sum(d)
    pieces = vertical_decomposition(d)
    return union_domains([_convex_sum(p) for p in pieces])


def star_center_check(d: CircularDomain, o, samples: int = 10) -> bool:
    """Whether every segment from ``o`` to sampled boundary points stays in ``d``."""
    if d.kind != "region" or d.is_empty:
        return False
    if not contains(d, o):
        return False
    targets = []
    for r in d.rows:
        L = row_length(r)
        for f in (0.0, 0.25, 0.5, 0.75):
            targets.append(row_point_at(r, f * L))
    ts = np.arange(1, samples + 1) / (samples + 1)
    pts = [(o[0] + t * (p.x - o[0]), o[1] + t * (p.y - o[1])) for p in targets for t in ts]
    return bool(contains_many(d, pts).all())


# -- Lambda decomposition ----------------------------------------------

@dataclass(frozen=True)
class LambdaDecomposition:
    anchor: Point
    lam: int
    pieces: tuple  # tuple of row tuples, each traversed from p_{i-1} to p_i
    ray_hits: tuple  # p_1..p_lam

    def piece_arcs(self, i: int) -> list[CircularArc]:
        return [CircularArc.from_row(r) for r in self.pieces[i]]


def _ray_hits(d: CircularDomain, o, direction) -> list[tuple[int, Point]]:
    x0, y0, x1, y1 = d.bbox()
    reach = math.hypot(x1 - x0, y1 - y0) + math.hypot(o[0] - x0, o[1] - y0) + 1.0
    seg = kernels.prepare([segment_row(o, (o[0] + reach * direction[0], o[1] + reach * direction[1]))])
    hits = [(j, Point(x, y)) for _, j, x, y, _ in kernels.pair_intersections(seg, d.prepared(), TOL.length)]
    if not hits:
        return []
    cid = _cluster([h[1] for h in hits], SNAP)
    seen = {}
    for c, h in zip(cid, hits):
        seen.setdefault(c, h)
    return list(seen.values())


def lambda_decompose(d: CircularDomain, o, lam: int = 10) -> LambdaDecomposition:
    """Cut the boundary of a star-shaped domain by ``lam`` equally spaced rays from ``o``.

    Rays are taken clockwise starting from the +x direction, so consecutive hit
    points are 2pi/lam apart in clockwise angle.
    """
    if lam < 10:
        raise GeometryError(f"Lambda must be at least 10, got {lam}")
    if d.kind != "region" or len(d.loops) != 1:
        raise GeometryError("Lambda decomposition needs a single-loop region")
    loop = d.loops[0]
    prefix = [0.0]
    for r in loop:
        prefix.append(prefix[-1] + row_length(r))
    total = prefix[-1]
    hits: list[Point] = []
    pos: list[float] = []
    for i in range(lam):
        th = -TWO_PI * (i + 1) / lam
        found = _ray_hits(d, o, (math.cos(th), math.sin(th)))
        if len(found) != 1:
            raise GeometryError(f"ray {i + 1} meets the boundary {len(found)} times; domain is not star-shaped around the anchor")
        j, p = found[0]
        s = min(max(row_param(loop[j], p.x, p.y), 0.0), row_length(loop[j]))
        hits.append(p)
        pos.append(prefix[j] + s)
    pieces = []
    for i in range(lam):
        # boundary runs counter-clockwise, rays clockwise: piece i is the
        # ccw stretch from p_i to p_{i-1}, reversed
        a, b = pos[i], pos[i - 1]
        chain = _loop_slice(loop, prefix, a, b if b > a else b + total, hits[i], hits[i - 1])
        pieces.append(tuple(reverse_row(r) for r in reversed(chain)))
    return LambdaDecomposition(Point(float(o[0]), float(o[1])), lam, tuple(pieces), tuple(hits))


def _loop_slice(loop, prefix, a: float, b: float, pa, pb) -> list[tuple]:
    """Counter-clockwise boundary chain between cumulative positions a < b (b may wrap)."""
    total = prefix[-1]
    n = len(loop)
    out = []
    for lap in (0, 1):
        for j in range(n):
            s0 = prefix[j] + lap * total
            s1 = prefix[j + 1] + lap * total
            lo, hi = max(a, s0), min(b, s1)
            if hi - lo <= TOL.length:
                continue
            p0 = pa if lo == a else row_point_at(loop[j], lo - s0)
            q0 = pb if hi == b else row_point_at(loop[j], hi - s0)
            if lo == s0:
                p0 = (loop[j][1], loop[j][2])
            if hi == s1:
                q0 = (loop[j][3], loop[j][4])
            out.append(sub_row(loop[j], lo - s0, hi - s0, p0, q0))
    return out


# -- monotonicity ------------------------------------------------------

def _unit(v) -> tuple[float, float]:
    n = math.hypot(v[0], v[1])
    return (v[0] / n, v[1] / n)


def _row_monotone_sign(r, v, tol: float = 1e-12) -> int:
    """+1/-1 if <v, .> strictly increases/decreases along the row, else 0."""
    if r[ROW_KIND] == SEGMENT:
        t = row_start_tangent(r)
        d = v[0] * t[0] + v[1] * t[1]
        return 0 if abs(d) <= tol else (1 if d > 0 else -1)
    if r[ROW_SWEEP] >= TWO_PI:
        return 0
    # <v, c + r(cos th, sin th)> has extrema where (cos th, sin th) = +-v
    a = math.atan2(v[1], v[0])
    for ext in (a, a + math.pi):
        off = norm_angle(ext - r[ROW_LO])
        if tol < off < r[ROW_SWEEP] - tol:
            return 0
    m, t = _midpoint(r)
    d = v[0] * t[0] + v[1] * t[1]
    return 0 if abs(d) <= tol else (1 if d > 0 else -1)


def is_v_monotone(curve, v) -> bool:
    """Whether <v, .> is strictly monotone along a connected chain of arcs."""
    rows = [a.to_row() if isinstance(a, CircularArc) else a for a in curve]
    if not rows:
        return False
    v = _unit(v)
    signs = {_row_monotone_sign(r, v) for r in rows}
    return signs == {1} or signs == {-1}


def common_monotone_direction(g, h, samples: int = 360):
    """A direction v making both chains v-monotone, found by sampling, else None."""
    for i in range(samples):
        th = math.pi * i / samples
        v = (math.cos(th), math.sin(th))
        if is_v_monotone(g, v) and is_v_monotone(h, v):
            return UnitVector(*v)
    return None


def proper_intersections_monotone(g, h, v=None) -> list[Point]:
    """Proper intersections of two mutually monotone chains by a strip sweep along v.

    Both chains are cut at the projections of all vertices; inside each strip
    each chain is a single arc piece, so only facing pieces are intersected.
    """
    g = [a.to_row() if isinstance(a, CircularArc) else a for a in g]
    h = [a.to_row() if isinstance(a, CircularArc) else a for a in h]
    if v is None:
        v = common_monotone_direction(g, h)
        if v is None:
            raise GeometryError("chains are not mutually monotone")
    v = _unit(v)

    def oriented(rows):
        # traverse so that <v, .> increases
        if _row_monotone_sign(rows[0], v) < 0:
            rows = [reverse_row(r) for r in reversed(rows)]
        return rows

    g, h = oriented(g), oriented(h)

    def proj(x, y):
        return v[0] * x + v[1] * y

    def spans(rows):
        return [(proj(r[1], r[2]), proj(r[3], r[4]), r) for r in rows]

    sg, sh = spans(g), spans(h)
    out: list[Point] = []
    i = j = 0
    while i < len(sg) and j < len(sh):
        a0, a1, ra = sg[i]
        b0, b1, rb = sh[j]
        lo, hi = max(a0, b0), min(a1, b1)
        if hi >= lo - TOL.length:
            pts, _ = arc_arc_intersections(CircularArc.from_row(ra), CircularArc.from_row(rb))
            for p in pts:
                if lo - TOL.length <= proj(p.x, p.y) <= hi + TOL.length:
                    if all(math.hypot(p.x - q.x, p.y - q.y) > 10 * TOL.length for q in out):
                        out.append(p)
        if a1 < b1:
            i += 1
        else:
            j += 1
    return out


def piece_vertex_count(rows) -> int:
    return len(rows) + 1
