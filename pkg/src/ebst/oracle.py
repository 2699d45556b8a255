"""Ground-truth computations for testing the solver.

Nothing here imports the solver or the geometry stack.  The minimum
bottleneck spanning value is the longest edge of a minimum spanning tree, and
the brute-force optimizer minimizes that over Steiner placements on a grid.
"""
from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field

import numpy as np


class OracleSizeError(RuntimeError):
    """Search space exceeds the configured cap."""


@dataclass(frozen=True)
class OracleConfig:
    grid_resolution: float = 0.01
    bounding_margin: float | None = None  # default: longest MST edge
    max_evaluations: int = 200_000_000
    exhaustive_limit: int = 4_000_000
    # branch and bound stops refining once a box cannot beat the best by this
    # fraction of the grid step
    gap_fraction: float = 0.01

    def __post_init__(self):
        if not self.grid_resolution > 0:
            raise ValueError("grid_resolution must be positive")
        if self.bounding_margin is not None and not self.bounding_margin > 0:
            raise ValueError("bounding_margin must be positive")


@dataclass
class OracleResult:
    value: float
    placements: list[tuple[float, float]]
    additive_bound: float
    evaluations: int
    mode: str
    grid_shape: tuple[int, int] = (0, 0)
    notes: list[str] = field(default_factory=list)


def _prim_max_edge(pts: np.ndarray) -> float:
    """Longest MST edge via O(m^2) Prim."""
    m = len(pts)
    if m < 2:
        raise ValueError("need at least two points")
    best = np.hypot(pts[:, 0] - pts[0, 0], pts[:, 1] - pts[0, 1])
    used = np.zeros(m, dtype=bool)
    used[0] = True
    best[0] = np.inf
    worst = 0.0
    for _ in range(m - 1):
        j = int(np.argmin(np.where(used, np.inf, best)))
        worst = max(worst, float(best[j]))
        used[j] = True
        d = np.hypot(pts[:, 0] - pts[j, 0], pts[:, 1] - pts[j, 1])
        best = np.minimum(best, d)
    return worst


def bottleneck_spanning_value(points) -> float:
    """Minimum over spanning trees of the longest edge."""
    pts = np.asarray([(p[0], p[1]) for p in points], dtype=float)
    if len(pts) < 2:
        raise ValueError("need at least two points")
    return _prim_max_edge(pts)


def batch_bottleneck(P: np.ndarray, S: np.ndarray) -> np.ndarray:
    """Bottleneck spanning value of P plus each row of placements.

    ``S`` has shape (B, k, 2); returns shape (B,).
    """
    B = S.shape[0]
    allp = np.concatenate([np.broadcast_to(P, (B,) + P.shape), S], axis=1)
    m = allp.shape[1]
    best = np.hypot(allp[:, :, 0] - allp[:, :1, 0], allp[:, :, 1] - allp[:, :1, 1])
    used = np.zeros((B, m), dtype=bool)
    used[:, 0] = True
    worst = np.zeros(B)
    rows = np.arange(B)
    for _ in range(m - 1):
        masked = np.where(used, np.inf, best)
        j = np.argmin(masked, axis=1)
        worst = np.maximum(worst, masked[rows, j])
        used[rows, j] = True
        pj = allp[rows, j]
        d = np.hypot(allp[:, :, 0] - pj[:, None, 0], allp[:, :, 1] - pj[:, None, 1])
        best = np.minimum(best, d)
    return worst


def _grid_axes(P: np.ndarray, cfg: OracleConfig):
    margin = cfg.bounding_margin if cfg.bounding_margin is not None else bottleneck_spanning_value(P)
    h = cfg.grid_resolution
    lo = P.min(axis=0) - margin
    hi = P.max(axis=0) + margin
    nx = int(math.floor((hi[0] - lo[0]) / h)) + 1
    ny = int(math.floor((hi[1] - lo[1]) / h)) + 1
    return lo, h, nx, ny


def brute_force_report(points, k: int, cfg: OracleConfig = OracleConfig()) -> OracleResult:
    P = np.asarray([(p[0], p[1]) for p in points], dtype=float)
    base = bottleneck_spanning_value(P)
    if k == 0:
        return OracleResult(base, [], 0.0, 1, "k=0")
    lo, h, nx, ny = _grid_axes(P, cfg)
    # moving each optimal Steiner point to its nearest grid node stretches
    # every incident edge by at most half a cell diagonal
    bound = k * h * math.sqrt(0.5)
    total = (nx * ny) ** k
    if total <= cfg.exhaustive_limit:
        res = _exhaustive(P, k, lo, h, nx, ny, base)
    else:
        res = _branch_and_bound(P, k, lo, h, nx, ny, base, cfg)
        bound += cfg.gap_fraction * h
    res.additive_bound = bound
    res.grid_shape = (nx, ny)
    return res


def brute_force_opt(inst_or_points, k: int | None = None, cfg: OracleConfig = OracleConfig()) -> float:
    """Minimum bottleneck over k-tuples of grid Steiner placements."""
    if k is None:
        pts, k = inst_or_points.points, inst_or_points.k
    else:
        pts = getattr(inst_or_points, "points", inst_or_points)
    return brute_force_report(pts, k, cfg).value


def _exhaustive(P, k, lo, h, nx, ny, base) -> OracleResult:
    xs = lo[0] + h * np.arange(nx)
    ys = lo[1] + h * np.arange(ny)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    nodes = np.column_stack([gx.ravel(), gy.ravel()])
    best, arg = base, None
    evals = 0
    chunk = 65536
    combos = itertools.combinations_with_replacement(range(len(nodes)), k)
    while True:
        block = list(itertools.islice(combos, chunk))
        if not block:
            break
        idx = np.asarray(block)
        vals = batch_bottleneck(P, nodes[idx])
        evals += len(block)
        j = int(np.argmin(vals))
        if vals[j] < best:
            best, arg = float(vals[j]), [tuple(map(float, nodes[i])) for i in idx[j]]
    return OracleResult(best, arg or [], 0.0, evals, "exhaustive")


def _matrix_bottleneck(D: np.ndarray) -> np.ndarray:
    """Longest MST edge for a batch of distance matrices of shape (B, m, m)."""
    B, m, _ = D.shape
    rows = np.arange(B)
    best = D[:, 0, :].copy()
    used = np.zeros((B, m), dtype=bool)
    used[:, 0] = True
    worst = np.zeros(B)
    for _ in range(m - 1):
        masked = np.where(used, np.inf, best)
        j = np.argmin(masked, axis=1)
        worst = np.maximum(worst, masked[rows, j])
        used[rows, j] = True
        best = np.minimum(best, D[rows, j, :])
    return worst


def _box_lower_bound(P: np.ndarray, boxes: np.ndarray, lo, h) -> np.ndarray:
    """Bottleneck value with every Steiner point free to move inside its box per edge.

    ``boxes`` has shape (B, k, 4) of index ranges.  Each edge is replaced by the
    smallest distance it can take, so the result bounds every tuple of grid
    points in the boxes from below.
    """
    B, k, _ = boxes.shape
    n = len(P)
    x0 = lo[0] + boxes[:, :, 0] * h
    x1 = lo[0] + boxes[:, :, 1] * h
    y0 = lo[1] + boxes[:, :, 2] * h
    y1 = lo[1] + boxes[:, :, 3] * h
    m = n + k
    D = np.empty((B, m, m))
    D[:, :n, :n] = np.hypot(P[:, None, 0] - P[None, :, 0], P[:, None, 1] - P[None, :, 1])
    dx = np.maximum(np.maximum(x0[:, :, None] - P[None, None, :, 0], 0.0), P[None, None, :, 0] - x1[:, :, None])
    dy = np.maximum(np.maximum(y0[:, :, None] - P[None, None, :, 1], 0.0), P[None, None, :, 1] - y1[:, :, None])
    sp = np.hypot(dx, dy)  # (B, k, n)
    D[:, n:, :n] = sp
    D[:, :n, n:] = sp.transpose(0, 2, 1)
    gx = np.maximum(np.maximum(x0[:, :, None] - x1[:, None, :], 0.0), x0[:, None, :] - x1[:, :, None])
    gy = np.maximum(np.maximum(y0[:, :, None] - y1[:, None, :], 0.0), y0[:, None, :] - y1[:, :, None])
    D[:, n:, n:] = np.hypot(gx, gy)
    return _matrix_bottleneck(D)


def _branch_and_bound(P, k, lo, h, nx, ny, base, cfg: OracleConfig) -> OracleResult:
    """Best-first search over products of index boxes.

    Lower bounds come from relaxing each Steiner point to its whole box; a
    product is split until its bound reaches the incumbent minus the gap or
    every box is a single grid node.
    """
    gap = cfg.gap_fraction * h

    def evaluate(items):
        arr = np.asarray(items, dtype=float)  # (B, k, 4)
        ci = np.floor((arr[:, :, 0] + arr[:, :, 1]) / 2)
        cj = np.floor((arr[:, :, 2] + arr[:, :, 3]) / 2)
        reps = np.stack([lo[0] + ci * h, lo[1] + cj * h], axis=2)
        return batch_bottleneck(P, reps), _box_lower_bound(P, arr, lo, h), reps

    root = tuple((0, nx - 1, 0, ny - 1) for _ in range(k))
    vals, lbs, reps = evaluate([root])
    best = min(base, float(vals[0]))
    arg = [tuple(map(float, p)) for p in reps[0]] if vals[0] < base else []
    heap = [(float(lbs[0]), 0, root)]
    counter = 1
    evals = 1
    while heap:
        batch = []
        while heap and len(batch) < 512:
            lb, _, boxes = heapq.heappop(heap)
            if lb < best - gap:
                batch.append(boxes)
        if not batch:
            break
        children = []
        for boxes in batch:
            # split the widest box along its longer side
            w = max(range(k), key=lambda t: max(boxes[t][1] - boxes[t][0], boxes[t][3] - boxes[t][2]))
            i0, i1, j0, j1 = boxes[w]
            if i1 - i0 >= j1 - j0:
                mid = (i0 + i1) // 2
                halves = [(i0, mid, j0, j1), (mid + 1, i1, j0, j1)]
            else:
                mid = (j0 + j1) // 2
                halves = [(i0, i1, j0, mid), (i0, i1, mid + 1, j1)]
            for hb in halves:
                nb = boxes[:w] + (hb,) + boxes[w + 1:]
                # Steiner points are interchangeable: keep boxes sorted
                children.append(tuple(sorted(nb)))
        children = list(dict.fromkeys(children))
        vals, lbs, reps = evaluate(children)
        evals += len(children)
        if evals > cfg.max_evaluations:
            raise OracleSizeError(f"oracle exceeded {cfg.max_evaluations} evaluations")
        j = int(np.argmin(vals))
        if vals[j] < best:
            best, arg = float(vals[j]), [tuple(map(float, p)) for p in reps[j]]
        for c, lb in zip(children, lbs):
            single = all(b[0] == b[1] and b[2] == b[3] for b in c)
            if not single and lb < best - gap:
                heapq.heappush(heap, (float(lb), counter, c))
                counter += 1
    return OracleResult(best, arg, 0.0, evals, "branch-and-bound")
