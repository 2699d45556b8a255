"""The epsilon-grid and cell maps assigning topology nodes to grid cells.

All coordinates here are in scaled units (decision radius 1).  The grid is
shifted by a fixed irrational-looking offset so that integer-coordinate inputs
do not land exactly on cell edges.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .domain import GridCell
from .topology import Forest, Topology

MAX_EPS = 0.1
# fractions of eps; any generic values work
GRID_OFFSET = (0.3183098861837907, 0.2718281828459045)


def check_eps(eps: float) -> float:
    if not 0 < eps <= MAX_EPS:
        raise ValueError(f"epsilon must lie in (0, {MAX_EPS}], got {eps}")
    return float(eps)


class Grid:
    """Cell indexing for side ``eps`` with the fixed offset."""

    def __init__(self, eps: float = MAX_EPS, offset: tuple[float, float] | None = None):
        self.eps = check_eps(eps)
        fx, fy = GRID_OFFSET if offset is None else offset
        self.ox = fx * self.eps
        self.oy = fy * self.eps

    def cell(self, ix: int, iy: int) -> GridCell:
        return GridCell(int(ix), int(iy), self.eps, self.ox, self.oy)

    def cells_of_point(self, x: float, y: float, tol: float = 1e-12) -> list[GridCell]:
        """Every closed cell containing (x, y); points on edges belong to all incident cells."""
        fx = (x - self.ox) / self.eps
        fy = (y - self.oy) / self.eps
        xs = {math.floor(fx)}
        ys = {math.floor(fy)}
        if abs(fx - round(fx)) <= tol:
            xs |= {round(fx) - 1, round(fx)}
        if abs(fy - round(fy)) <= tol:
            ys |= {round(fy) - 1, round(fy)}
        return [self.cell(i, j) for i in sorted(xs) for j in sorted(ys)]

    def cell_of_point(self, x: float, y: float) -> GridCell:
        return self.cell(math.floor((x - self.ox) / self.eps), math.floor((y - self.oy) / self.eps))

    def cells_within(self, x: float, y: float, radius: float) -> list[GridCell]:
        """Cells whose centers lie within ``radius`` of (x, y), nearest first."""
        e = self.eps
        i0 = math.floor((x - radius - self.ox) / e) - 1
        i1 = math.ceil((x + radius - self.ox) / e) + 1
        j0 = math.floor((y - radius - self.oy) / e) - 1
        j1 = math.ceil((y + radius - self.oy) / e) + 1
        ii, jj = np.meshgrid(np.arange(i0, i1 + 1), np.arange(j0, j1 + 1), indexing="ij")
        cx = self.ox + (ii + 0.5) * e
        cy = self.oy + (jj + 0.5) * e
        d = np.hypot(cx - x, cy - y)
        mask = d <= radius
        order = np.argsort(d[mask], kind="stable")
        return [self.cell(i, j) for i, j in zip(ii[mask][order], jj[mask][order])]

    def cells_near_set(self, pts: np.ndarray, radius: float) -> list[GridCell]:
        """Cells at (square-to-point) distance <= radius from some point of ``pts``."""
        e = self.eps
        out: dict[tuple[int, int], GridCell] = {}
        for x, y in pts:
            i0 = math.floor((x - radius - self.ox) / e)
            i1 = math.floor((x + radius - self.ox) / e)
            j0 = math.floor((y - radius - self.oy) / e)
            j1 = math.floor((y + radius - self.oy) / e)
            for i in range(i0, i1 + 1):
                for j in range(j0, j1 + 1):
                    if (i, j) in out:
                        continue
                    c = self.cell(i, j)
                    if c.distance_to((x, y)) <= radius:
                        out[(i, j)] = c
        return list(out.values())


@dataclass(frozen=True)
class CellMap:
    """Assignment of topology nodes to grid cells."""

    assignment: tuple[tuple[int, GridCell], ...]

    def __getitem__(self, node: int) -> GridCell:
        for v, c in self.assignment:
            if v == node:
                return c
        raise KeyError(node)

    def as_dict(self) -> dict[int, GridCell]:
        return dict(self.assignment)


def occupied_cells(grid: Grid, pts: np.ndarray) -> dict[tuple[int, int], list[int]]:
    """Bucket point indices by every cell containing them."""
    out: dict[tuple[int, int], list[int]] = {}
    for idx, (x, y) in enumerate(pts):
        for c in grid.cells_of_point(float(x), float(y)):
            out.setdefault((c.ix, c.iy), []).append(idx)
    return out


def _center_dist(a: GridCell, b: GridCell) -> float:
    return math.hypot(a.center.x - b.center.x, a.center.y - b.center.y)


def enumerate_cell_maps(
    points: np.ndarray,
    t: Topology,
    fr: Forest,
    eps: float = MAX_EPS,
    k: int | None = None,
    grid: Grid | None = None,
    local_pruning: bool = True,
) -> Iterator[CellMap]:
    """Cell maps for one (component) topology, anchored on an occupied cell of the first terminal node.

    ``points`` are scaled so that the decision radius is 1.  The anchor is the
    terminal node of smallest component index; each of its occupied cells is
    tried.  Steiner cells are confined to centers within k + 2 eps of the
    anchor, other terminal cells to occupied cells within k + 2 + 2 eps, and
    adjacent nodes to center distance 1 + 2 eps.  ``local_pruning=False`` drops
    the adjacency filter (used to test that it loses nothing).
    """
    eps = check_eps(eps)
    grid = grid or Grid(eps)
    k = t.n_steiner if k is None else k
    T = t.n_terminals
    comp_pts = [np.asarray(points[list(fr.components[c])]) for c in t.terminals]
    occ = [occupied_cells(grid, p) for p in comp_pts]
    anchor_node = min(range(T), key=lambda i: t.terminals[i]) if T else None
    order = _bfs_order(t, anchor_node if anchor_node is not None else T)
    local = 1.0 + 2.0 * eps if local_pruning else math.inf
    if anchor_node is None:
        # no terminals: nothing to anchor; not produced by the enumerator
        return
    if t.n_steiner == 0:
        # nothing to guess: one map fixing an occupied cell per terminal node
        yield CellMap(tuple((v, grid.cell(*min(occ[v]))) for v in range(T)))
        return
    for akey in sorted(occ[anchor_node]):
        anchor = grid.cell(*akey)
        ac = anchor.center
        options: dict[int, list[GridCell]] = {anchor_node: [anchor]}
        for v in range(t.size):
            if v == anchor_node:
                continue
            if t.is_steiner(v):
                options[v] = grid.cells_within(ac.x, ac.y, k + 2 * eps)
            else:
                options[v] = [
                    grid.cell(*key)
                    for key in sorted(occ[v])
                    if _center_dist(grid.cell(*key), anchor) <= k + 2 + 2 * eps
                ]
        yield from _assign(order, t, options, local, {})


def _bfs_order(t: Topology, start: int) -> list[tuple[int, int | None]]:
    """Nodes in BFS order from ``start`` with their BFS parent."""
    out = [(start, None)]
    seen = {start}
    for u, _ in out:
        for w in t.neighbors(u):
            if w not in seen:
                seen.add(w)
                out.append((w, u))
    return out


def _assign(order, t, options, local, partial) -> Iterator[CellMap]:
    i = len(partial)
    if i == len(order):
        yield CellMap(tuple(sorted(partial.items())))
        return
    v, parent = order[i]
    for c in options[v]:
        if parent is not None and _center_dist(c, partial[parent]) > local:
            continue
        partial[v] = c
        yield from _assign(order, t, options, local, partial)
        del partial[v]


def steiner_cells_per_anchor(eps: float, k: int) -> int:
    """Count of cells with center within k + 2 eps of a cell center.

    Counted on the integer lattice so cells exactly on the boundary are
    not lost to rounding.
    """
    rad = (k + 2 * eps) / eps
    m = int(math.floor(rad + 1e-9))
    r2 = rad * rad * (1 + 1e-12)
    return sum(2 * int(math.floor(math.sqrt(max(r2 - i * i, 0.0)) + 1e-9)) + 1 for i in range(-m, m + 1))
