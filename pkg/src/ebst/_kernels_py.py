"""Pure-Python arc kernels.

Reference implementation of the hot loops; ``_kernels.pyx`` mirrors it line for
line.  Arcs are rows in the layout documented in :mod:`ebst.geom`.
"""
from __future__ import annotations

import math

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi
THREE_HALF_PI = 1.5 * math.pi

BACKEND = "python"
# r^2 - d^2 carries a few ulps of rounding; below this relative level a
# near-tangent contact is reported as a single point
TANGENT_ROUNDING = 8.0 * 2.220446049250313e-16


def prepare(rows):
    if hasattr(rows, "tolist"):
        return [tuple(r) for r in rows.tolist()]
    return [tuple(r) for r in rows]


def _in_range(theta, lo, sweep, tol):
    d = math.fmod(theta - lo, TWO_PI)
    if d < 0.0:
        d += TWO_PI
    return d <= sweep + tol or d >= TWO_PI - tol


def _on_row(row, x, y, tol):
    """Whether (x, y), known to lie on the row's support, falls inside its extent."""
    if row[0] == 0.0:
        dx = row[3] - row[1]
        dy = row[4] - row[2]
        L2 = dx * dx + dy * dy
        if L2 == 0.0:
            return math.hypot(x - row[1], y - row[2]) <= tol
        t = ((x - row[1]) * dx + (y - row[2]) * dy) / L2
        e = tol / math.sqrt(L2)
        return -e <= t <= 1.0 + e
    r = row[7]
    if row[9] >= TWO_PI:
        return True
    th = math.atan2(y - row[6], x - row[5])
    return _in_range(th, row[8], row[9], tol / r)


def _bbox(row):
    if row[0] == 0.0:
        return (min(row[1], row[3]), min(row[2], row[4]), max(row[1], row[3]), max(row[2], row[4]))
    cx, cy, r, lo, sw = row[5], row[6], row[7], row[8], row[9]
    if sw >= TWO_PI:
        return (cx - r, cy - r, cx + r, cy + r)
    x0 = min(row[1], row[3])
    x1 = max(row[1], row[3])
    y0 = min(row[2], row[4])
    y1 = max(row[2], row[4])
    if _in_range(0.0, lo, sw, 0.0):
        x1 = cx + r
    if _in_range(HALF_PI, lo, sw, 0.0):
        y1 = cy + r
    if _in_range(math.pi, lo, sw, 0.0):
        x0 = cx - r
    if _in_range(THREE_HALF_PI, lo, sw, 0.0):
        y0 = cy - r
    return (x0, y0, x1, y1)


def _circ_overlap(lo1, sw1, lo2, sw2):
    """Measure of the intersection of two circular angle intervals."""
    s = math.fmod(lo2 - lo1, TWO_PI)
    if s < 0.0:
        s += TWO_PI
    total = 0.0
    for off in (s, s - TWO_PI):
        a = max(0.0, off)
        b = min(sw1, off + sw2)
        if b > a:
            total += b - a
    return total


def arcs_overlap(a, b, tol):
    """Positive-length overlap between two arcs on a common support."""
    if a[0] != b[0]:
        return False
    if a[0] == 1.0:
        if abs(a[5] - b[5]) > tol or abs(a[6] - b[6]) > tol or abs(a[7] - b[7]) > tol:
            return False
        return _circ_overlap(a[8], a[9], b[8], b[9]) * a[7] > tol
    dx, dy = a[3] - a[1], a[4] - a[2]
    L = math.hypot(dx, dy)
    ex, ey = b[3] - b[1], b[4] - b[2]
    M = math.hypot(ex, ey)
    if L == 0.0 or M == 0.0:
        return False
    ux, uy = dx / L, dy / L
    if abs(ux * ey - uy * ex) > tol * M / max(L, 1.0) + 1e-12 * M:
        return False
    if abs(-uy * (b[1] - a[1]) + ux * (b[2] - a[2])) > tol:
        return False
    t0 = (b[1] - a[1]) * ux + (b[2] - a[2]) * uy
    t1 = (b[3] - a[1]) * ux + (b[4] - a[2]) * uy
    lo_, hi_ = min(t0, t1), max(t0, t1)
    return min(L, hi_) - max(0.0, lo_) > tol


def _cc_points(a, b, tol):
    """Circle-circle support intersections (ignores arc extents)."""
    x1, y1, r1 = a[5], a[6], a[7]
    x2, y2, r2 = b[5], b[6], b[7]
    dx, dy = x2 - x1, y2 - y1
    d2 = dx * dx + dy * dy
    d = math.sqrt(d2)
    if d <= tol:
        return []
    if d > r1 + r2 + tol or d < abs(r1 - r2) - tol:
        return []
    aa = (d2 + r1 * r1 - r2 * r2) / (2.0 * d)
    h2 = r1 * r1 - aa * aa
    ux, uy = dx / d, dy / d
    fx, fy = x1 + aa * ux, y1 + aa * uy
    if h2 <= tol * tol + TANGENT_ROUNDING * r1 * r1:
        return [(fx, fy)]
    h = math.sqrt(h2)
    return [(fx - h * uy, fy + h * ux), (fx + h * uy, fy - h * ux)]


def _cl_points(c, s, tol):
    """Circle (row c) against the supporting line of segment row s."""
    ax, ay = s[1], s[2]
    dx, dy = s[3] - ax, s[4] - ay
    L = math.hypot(dx, dy)
    if L == 0.0:
        return []
    ux, uy = dx / L, dy / L
    cx, cy, r = c[5], c[6], c[7]
    t = (cx - ax) * ux + (cy - ay) * uy
    fx, fy = ax + t * ux, ay + t * uy
    dl = -uy * (cx - ax) + ux * (cy - ay)
    h2 = r * r - dl * dl
    if h2 < -2.0 * r * tol:
        return []
    if h2 <= tol * tol + TANGENT_ROUNDING * r * r:
        return [(fx, fy)]
    h = math.sqrt(h2)
    return [(fx - h * ux, fy - h * uy), (fx + h * ux, fy + h * uy)]


def _ss_points(a, b, tol):
    px, py = a[1], a[2]
    rx, ry = a[3] - px, a[4] - py
    qx, qy = b[1], b[2]
    sx, sy = b[3] - qx, b[4] - qy
    den = rx * sy - ry * sx
    Lr = math.hypot(rx, ry)
    Ls = math.hypot(sx, sy)
    if Lr == 0.0 or Ls == 0.0:
        return []
    if abs(den) <= 1e-14 * Lr * Ls:
        return []
    t = ((qx - px) * sy - (qy - py) * sx) / den
    return [(px + t * rx, py + t * ry)]


def _endpoint_points(a, b, tol):
    """Endpoints of either row lying on the other (used for overlaps)."""
    out = []
    for row, other in ((a, b), (b, a)):
        for x, y in ((row[1], row[2]), (row[3], row[4])):
            if _on_row(other, x, y, tol) and _support_dist(other, x, y) <= tol:
                out.append((x, y, 1))
    return out


def _support_dist(row, x, y):
    if row[0] == 0.0:
        dx, dy = row[3] - row[1], row[4] - row[2]
        L = math.hypot(dx, dy)
        if L == 0.0:
            return math.hypot(x - row[1], y - row[2])
        return abs(-dy * (x - row[1]) + dx * (y - row[2])) / L
    return abs(math.hypot(x - row[5], y - row[6]) - row[7])


def arc_pair_points(a, b, tol):
    """Intersection points of two arcs as (x, y, flag) triples.

    flag 0 marks a proper (isolated) point; flag 1 marks an endpoint of a
    positive-length overlap.
    """
    if arcs_overlap(a, b, tol):
        return _endpoint_points(a, b, tol)
    if a[0] == 1.0 and b[0] == 1.0:
        if abs(a[5] - b[5]) <= tol and abs(a[6] - b[6]) <= tol:
            if abs(a[7] - b[7]) <= tol:
                # same circle, extents only touch
                return [(x, y, 0) for x, y, _ in _endpoint_points(a, b, tol)]
            return []
        cand = _cc_points(a, b, tol)
    elif a[0] == 1.0:
        cand = _cl_points(a, b, tol)
    elif b[0] == 1.0:
        cand = _cl_points(b, a, tol)
    else:
        cand = _ss_points(a, b, tol)
        if not cand:
            # parallel: collinear segments may still touch at an endpoint
            return [(x, y, 0) for x, y, _ in _endpoint_points(a, b, tol)]
    out = []
    for x, y in cand:
        if _on_row(a, x, y, tol) and _on_row(b, x, y, tol):
            out.append((x, y, 0))
    return out


def pair_intersections(A, B, tol, self_mode=False):
    """All intersection points between rows of A and rows of B.

    Returns (i, j, x, y, flag) tuples.  With ``self_mode`` A and B are the same
    set and only pairs i < j are examined.
    """
    boxes_a = [_bbox(r) for r in A]
    boxes_b = boxes_a if self_mode else [_bbox(r) for r in B]
    out = []
    for i, a in enumerate(A):
        ba = boxes_a[i]
        start = i + 1 if self_mode else 0
        for j in range(start, len(B)):
            bb = boxes_b[j]
            if ba[0] > bb[2] + tol or bb[0] > ba[2] + tol or ba[1] > bb[3] + tol or bb[1] > ba[3] + tol:
                continue
            for x, y, f in arc_pair_points(a, B[j], tol):
                out.append((i, j, x, y, f))
    return out


def winding(A, px, py):
    """Signed number of crossings of the ray (px, py) -> +x by the arcs.

    Crossings are counted with a half-open rule on stored vertex heights, so
    consecutive arcs sharing a vertex are never double counted.
    """
    w = 0
    for row in A:
        if row[0] == 0.0:
            sy, ey = row[2], row[4]
            if (sy > py) != (ey > py):
                x = row[1] + (py - sy) * (row[3] - row[1]) / (ey - sy)
                if x > px:
                    w += 1 if ey > py else -1
            continue
        cx, cy, r, lo, sw, d = row[5], row[6], row[7], row[8], row[9], row[10]
        # break the arc into y-monotone pieces at the top/bottom of the circle
        breaks = []
        for base in (HALF_PI, THREE_HALF_PI):
            off = math.fmod(base - lo, TWO_PI)
            if off < 0.0:
                off += TWO_PI
            if 1e-12 < off < sw - 1e-12:
                breaks.append(off)
        if d > 0:
            breaks.sort()
            offs = [0.0] + breaks + [sw]
        else:
            breaks.sort(reverse=True)
            offs = [sw] + breaks + [0.0]
        n = len(offs)
        for k in range(n - 1):
            o0, o1 = offs[k], offs[k + 1]
            if k == 0:
                y0 = row[2]
            else:
                y0 = cy + r * math.sin(lo + o0)
            if k == n - 2:
                y1 = row[4]
            else:
                y1 = cy + r * math.sin(lo + o1)
            if (y0 > py) == (y1 > py):
                continue
            mid = lo + 0.5 * (o0 + o1)
            h2 = r * r - (py - cy) * (py - cy)
            h = math.sqrt(h2) if h2 > 0.0 else 0.0
            x = cx + h if math.cos(mid) > 0.0 else cx - h
            if x > px:
                w += 1 if y1 > py else -1
    return w


def winding_many(A, pts):
    return [winding(A, p[0], p[1]) for p in pts]


def _nearest_on_row(row, px, py):
    if row[0] == 0.0:
        ax, ay = row[1], row[2]
        dx, dy = row[3] - ax, row[4] - ay
        L2 = dx * dx + dy * dy
        t = 0.0 if L2 == 0.0 else ((px - ax) * dx + (py - ay) * dy) / L2
        if t < 0.0:
            t = 0.0
        elif t > 1.0:
            t = 1.0
        qx, qy = ax + t * dx, ay + t * dy
        return math.hypot(px - qx, py - qy), qx, qy
    cx, cy, r = row[5], row[6], row[7]
    vx, vy = px - cx, py - cy
    n = math.hypot(vx, vy)
    if n > 0.0:
        th = math.atan2(vy, vx)
        if row[9] >= TWO_PI or _in_range(th, row[8], row[9], 0.0):
            qx, qy = cx + r * vx / n, cy + r * vy / n
            return abs(n - r), qx, qy
    d0 = math.hypot(px - row[1], py - row[2])
    d1 = math.hypot(px - row[3], py - row[4])
    if d0 <= d1:
        return d0, row[1], row[2]
    return d1, row[3], row[4]


def nearest(A, px, py):
    """(distance, arc index, qx, qy) of the boundary point nearest to (px, py)."""
    best = (math.inf, -1, px, py)
    for i, row in enumerate(A):
        d, qx, qy = _nearest_on_row(row, px, py)
        if d < best[0]:
            best = (d, i, qx, qy)
    return best


def nearest_many(A, pts):
    return [nearest(A, p[0], p[1]) for p in pts]
