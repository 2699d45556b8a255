"""Static SVG figures of a solved tree and of feasible regions."""
from __future__ import annotations

import math
from typing import Sequence

from .domain import CircularDomain
from .geom import CIRCLE, TWO_PI

PAD = 0.5


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def scale_domain(d: CircularDomain, f: float) -> CircularDomain:
    """Domain scaled about the origin by ``f`` (angles are unchanged)."""
    if d.kind == "points":
        return CircularDomain.from_points([(p.x * f, p.y * f) for p in d.points])
    loops = []
    for loop in d.loops:
        loops.append([tuple(v * f if 1 <= i <= 7 else v for i, v in enumerate(r)) for r in loop])
    return CircularDomain.region(loops)


def _row_path(r) -> str:
    ex, ey = r[3], r[4]
    if r[0] != CIRCLE:
        return f"L {_fmt(ex)} {_fmt(ey)}"
    rad = r[7]
    sweep_flag = 1 if r[10] > 0 else 0
    if r[9] >= TWO_PI - 1e-12:
        # a full circle needs two half arcs
        mx, my = 2 * r[5] - r[1], 2 * r[6] - r[2]
        half = f"A {_fmt(rad)} {_fmt(rad)} 0 0 {sweep_flag} "
        return half + f"{_fmt(mx)} {_fmt(my)} " + half + f"{_fmt(ex)} {_fmt(ey)}"
    large = 1 if r[9] > math.pi else 0
    return f"A {_fmt(rad)} {_fmt(rad)} 0 {large} {sweep_flag} {_fmt(ex)} {_fmt(ey)}"


def domain_path(d: CircularDomain) -> str:
    parts = []
    for loop in d.loops:
        if not loop:
            continue
        parts.append(f"M {_fmt(loop[0][1])} {_fmt(loop[0][2])}")
        parts.extend(_row_path(r) for r in loop)
        parts.append("Z")
    return " ".join(parts)


def _frame(xs: Sequence[float], ys: Sequence[float], body: list[str]) -> str:
    x0, x1 = min(xs) - PAD, max(xs) + PAD
    y0, y1 = min(ys) - PAD, max(ys) + PAD
    w, h = x1 - x0, y1 - y0
    # flip y so the figure uses mathematical orientation
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(x0)} {_fmt(-y1)} {_fmt(w)} {_fmt(h)}" '
        f'width="{int(400 * w / max(w, h))}" height="{int(400 * h / max(w, h))}">'
    )
    return "\n".join([head, '<g transform="scale(1,-1)">'] + body + ["</g>", "</svg>", ""])


def tree_svg(terminals: Sequence, steiner: Sequence, edges: Sequence[tuple[int, int]]) -> str:
    pts = [(float(p[0]), float(p[1])) for p in terminals] + [(float(p[0]), float(p[1])) for p in steiner]
    size = max(1e-9, max(max(p[0] for p in pts) - min(p[0] for p in pts), max(p[1] for p in pts) - min(p[1] for p in pts)))
    rad = 0.012 * size + 0.02
    sw = rad / 3
    body = []
    for i, j in edges:
        (ax, ay), (bx, by) = pts[i], pts[j]
        body.append(
            f'<line class="edge" x1="{_fmt(ax)}" y1="{_fmt(ay)}" x2="{_fmt(bx)}" y2="{_fmt(by)}" '
            f'stroke="#555" stroke-width="{_fmt(sw)}"/>'
        )
    n = len(terminals)
    for idx, (x, y) in enumerate(pts):
        cls, fill = ("terminal", "#1f4e9c") if idx < n else ("steiner", "#c8321e")
        body.append(f'<circle class="{cls}" cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(rad)}" fill="{fill}"/>')
    return _frame([p[0] for p in pts], [p[1] for p in pts], body)


def regions_svg(terminals: Sequence, regions: Sequence[CircularDomain], extra: Sequence[CircularDomain] = (), rays: Sequence = ()) -> str:
    """Regions filled, optional outlines (e.g. expansions) and ray segments drawn on top."""
    xs = [float(p[0]) for p in terminals]
    ys = [float(p[1]) for p in terminals]
    body = []
    for d in list(regions) + list(extra):
        if d.is_empty:
            continue
        if d.kind == "points":
            for p in d.points:
                xs.append(p.x)
                ys.append(p.y)
            continue
        bx0, by0, bx1, by1 = d.bbox()
        xs += [bx0, bx1]
        ys += [by0, by1]
    for d in regions:
        if d.is_region:
            body.append(f'<path class="region" d="{domain_path(d)}" fill="#f2a33a" fill-opacity="0.6" stroke="#a05a00" stroke-width="0.004"/>')
    for d in extra:
        if d.is_region:
            body.append(f'<path class="outline" d="{domain_path(d)}" fill="none" stroke="#2a7f62" stroke-width="0.004"/>')
    for (ax, ay), (bx, by) in rays:
        body.append(f'<line class="ray" x1="{_fmt(ax)}" y1="{_fmt(ay)}" x2="{_fmt(bx)}" y2="{_fmt(by)}" stroke="#2a7f62" stroke-width="0.002"/>')
    for x, y in zip(xs[: len(terminals)], ys[: len(terminals)]):
        body.append(f'<circle class="terminal" cx="{_fmt(x)}" cy="{_fmt(y)}" r="0.03" fill="#1f4e9c"/>')
    return _frame(xs, ys, body)
