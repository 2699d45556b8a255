"""Seeded instance and domain generators shared by tests, benchmarks and the CLI."""
from __future__ import annotations

import math

import numpy as np

from .domain import (
    CircularDomain,
    GridCell,
    clip_to_cell,
    disk_union,
    intersect_domains,
    disk,
    segment_domain,
)


def random_points(n: int, seed: int, box: float = 5.0, min_sep: float = 1e-3) -> list[tuple[float, float]]:
    rng = np.random.default_rng(seed)
    pts: list[tuple[float, float]] = []
    while len(pts) < n:
        p = (float(rng.uniform(0, box)), float(rng.uniform(0, box)))
        if all(math.hypot(p[0] - q[0], p[1] - q[1]) > min_sep for q in pts):
            pts.append(p)
    return pts


def _ring_point(rng, c, lo: float, hi: float):
    th = rng.uniform(0, 2 * math.pi)
    r = rng.uniform(lo, hi)
    return (c.x + r * math.cos(th), c.y + r * math.sin(th))


def cell_domain(rng, cell: GridCell, kind: str | None = None) -> CircularDomain:
    """A small pseudo-convex domain inside ``cell``.

    Kinds: points, segment, lens, union (of up to 5 unit disks clipped to the cell).
    """
    kind = kind or rng.choice(["points", "segment", "lens", "union"])
    c, e = cell.center, cell.eps
    inner = lambda: (c.x + rng.uniform(-0.45, 0.45) * e, c.y + rng.uniform(-0.45, 0.45) * e)
    if kind == "points":
        return CircularDomain.from_points([inner() for _ in range(int(rng.integers(1, 6)))])
    if kind == "segment":
        return segment_domain(inner(), inner())
    if kind == "lens":
        a = _ring_point(rng, c, 0.5, 1.0)
        # second center on the far side so the lens stays around the cell
        b = (2 * c.x - a[0] + rng.uniform(-0.05, 0.05), 2 * c.y - a[1] + rng.uniform(-0.05, 0.05))
        d = clip_to_cell(intersect_domains([disk(a), disk(b)]), cell)
        return d if not d.is_empty else segment_domain(inner(), inner())
    centers = [_ring_point(rng, c, 0.97, 1.05) for _ in range(int(rng.integers(1, 6)))]
    d = clip_to_cell(disk_union(centers), cell)
    return d if not d.is_empty else CircularDomain.from_points([inner()])


def domain_corpus(count: int, seed: int, eps: float = 0.1):
    """``count`` (cell, domain) pairs with varied kinds."""
    rng = np.random.default_rng(seed)
    kinds = ["points", "segment", "lens", "union"]
    out = []
    for i in range(count):
        cell = GridCell(int(rng.integers(-20, 20)), int(rng.integers(-20, 20)), eps)
        out.append((cell, cell_domain(rng, cell, kinds[i % 4])))
    return out


def adjacent_cell_pairs(count: int, seed: int, eps: float = 0.1):
    """Pairs of domains in edge- or corner-adjacent cells."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        c1 = GridCell(int(rng.integers(-10, 10)), int(rng.integers(-10, 10)), eps)
        dx, dy = [(1, 0), (0, 1), (1, 1), (-1, 1)][int(rng.integers(0, 4))]
        c2 = GridCell(c1.ix + dx, c1.iy + dy, eps)
        out.append(((c1, cell_domain(rng, c1)), (c2, cell_domain(rng, c2))))
    return out
