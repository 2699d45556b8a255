"""Feasible-region propagation, the lambda-decision procedure and the optimizer.

Points are scaled by 1/lambda so every tree edge must have length at most 1.
For one rooted component topology, the feasible region of a Steiner node s
placed in grid cell c is

    U(s, c) = c  intersect  (for each child w: union over child cells c' of U(w, c') + D)

where terminal children contribute the disks around their component's points.
U(s, c) is the union, over every assignment of cells to the subtree below s,
of the region obtained with that fixed assignment, so the root admits a
placement for some assignment exactly when some U(root, c) is nonempty.
Memoizing U per (node, cell) shares all the work between assignments.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .domain import (
    CircularDomain,
    GridCell,
    clip_to_cell,
    complexity,
    disk_union,
    intersect_domains,
    is_pseudo_convex,
    nearest_point,
    union_domains,
)
from .geom import TOL, GeometryError, Point
from .grid import MAX_EPS, Grid, check_eps, enumerate_cell_maps
from .minkowski import minkowski_unit_disk
from .topology import (
    Forest,
    InputError,
    Instance,
    MSTEdge,
    Topology,
    enumerate_topologies,
    euclidean_mst,
    forest,
    split_components,
)

# distance checks during extraction allow 1 + EXTRACT_SLACK
EXTRACT_SLACK = 10 * TOL.length
# decisions are taken with unit disks of radius 1 + DECISION_SLACK so that
# touching configurations (the exact optimum) keep a sliver of feasible area
DECISION_SLACK = 1e-7
DEVIATION_NOTE = "binary-search optimization"


class SolverInvariantError(RuntimeError):
    """A nonempty root region whose placement could not be extracted."""


@dataclass
class Counters:
    topologies: int = 0
    components: int = 0
    component_cache_hits: int = 0
    cell_maps: int = 0
    cells_evaluated: int = 0
    regions: int = 0
    minkowski_sums: int = 0
    max_region_complexity: int = 0
    decisions: int = 0

    def seen(self, d: CircularDomain) -> None:
        self.regions += 1
        c = complexity(d)
        if c > self.max_region_complexity:
            self.max_region_complexity = c

    def merge(self, other: "Counters") -> None:
        for k, v in other.__dict__.items():
            if k == "max_region_complexity":
                self.max_region_complexity = max(self.max_region_complexity, v)
            else:
                setattr(self, k, getattr(self, k) + v)

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class FeasibleRegion:
    node: int
    region: CircularDomain


@dataclass
class SolveResult:
    bottleneck: float
    steiner_points: list[Point]
    tree_edges: list[tuple[int, int]]
    kept_forest_edges: list[tuple[int, int]]
    K: int
    topology_id: str
    n: int
    witness_bottleneck: float = 0.0
    deviation_note: str = DEVIATION_NOTE
    counters: Counters = field(default_factory=Counters)
    regions: list = field(default_factory=list, repr=False)
    elapsed_s: float = 0.0

    @property
    def k_used(self) -> int:
        return len(self.steiner_points)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.kept_forest_edges + self.tree_edges)

    def all_points(self, terminals: Sequence) -> list[Point]:
        return [Point(float(p[0]), float(p[1])) for p in terminals] + list(self.steiner_points)

    def edge_lengths(self, terminals: Sequence) -> list[float]:
        pts = self.all_points(terminals)
        return [math.hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y) for i, j in self.edges]

    def is_spanning_tree(self) -> bool:
        m = self.n + len(self.steiner_points)
        es = self.edges
        if len(es) != m - 1:
            return False
        parent = list(range(m))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for i, j in es:
            ri, rj = find(i), find(j)
            if ri == rj:
                return False
            parent[ri] = rj
        return True


# -- per-assignment primitives -----------------------------------------

def feasible_region(s: int, child_regions: Sequence[FeasibleRegion], cell: GridCell, counters: Counters | None = None) -> FeasibleRegion:
    """R(s): the cell intersected with the unit expansions of all child regions."""
    parts = []
    for ch in child_regions:
        if ch.region.is_empty:
            return FeasibleRegion(s, CircularDomain.empty())
        m = minkowski_unit_disk(ch.region)
        if counters is not None:
            counters.minkowski_sums += 1
        parts.append(clip_to_cell(m, cell))
    if not parts:
        return FeasibleRegion(s, cell.to_domain())
    region = parts[0] if len(parts) == 1 else intersect_domains(parts)
    if counters is not None:
        counters.seen(region)
    return FeasibleRegion(s, region)


def _first_point(d: CircularDomain) -> Point:
    if d.kind == "points":
        return d.points[0]
    r = d.loops[0][0]
    return Point(r[1], r[2])


def decide(points: np.ndarray, t: Topology, fr: Forest, xi, counters: Counters | None = None, slack: float = EXTRACT_SLACK):
    """Placement of the Steiner nodes for one cell map, or None.

    ``points`` are already scaled to decision radius 1.  Returns a dict with
    the Steiner placements and, for every terminal node, the chosen witness
    point index.
    """
    cells = xi.as_dict() if hasattr(xi, "as_dict") else dict(xi)
    ch = t.children()
    regions: dict[int, CircularDomain] = {}
    witness_pool: dict[int, list[int]] = {}
    for v in t.postorder():
        c = cells[v]
        if not t.is_steiner(v):
            comp = fr.components[t.terminals[v]]
            inside = [i for i in comp if c.contains(points[i], TOL.length)]
            witness_pool[v] = inside
            regions[v] = CircularDomain.from_points([points[i] for i in inside])
            continue
        fr_v = feasible_region(v, [FeasibleRegion(w, regions[w]) for w in ch[v]], c, counters)
        regions[v] = fr_v.region
        if fr_v.region.is_empty:
            return None
    root = t.root
    phi: dict[int, Point] = {root: _first_point(regions[root])}
    witness: dict[int, int] = {}
    stack = [root]
    while stack:
        s = stack.pop()
        p = phi[s]
        for w in ch[s]:
            if t.is_steiner(w):
                q, dist = nearest_point(regions[w], p)
                if dist > 1 + slack:
                    raise SolverInvariantError(f"child region of node {w} is {dist} away")
                phi[w] = q
                stack.append(w)
            else:
                pool = witness_pool[w]
                best = min(pool, key=lambda i: math.hypot(points[i][0] - p.x, points[i][1] - p.y))
                if math.hypot(points[best][0] - p.x, points[best][1] - p.y) > 1 + slack:
                    raise SolverInvariantError(f"terminal node {w} has no witness within reach")
                witness[w] = best
    return {"phi": phi, "witness": witness, "regions": {v: regions[v] for v in t.steiner_nodes}}


# -- memoized region propagation ---------------------------------------

_EMPTY = "empty"
_FULL = "full"


def _square_max_dist(a: GridCell, b: GridCell) -> float:
    dx = max(abs(a.x1 - b.x0), abs(b.x1 - a.x0))
    dy = max(abs(a.y1 - b.y0), abs(b.y1 - a.y0))
    return math.hypot(dx, dy)


def _square_min_dist(a: GridCell, b: GridCell) -> float:
    dx = max(0.0, a.x0 - b.x1, b.x0 - a.x1)
    dy = max(0.0, a.y0 - b.y1, b.y0 - a.y1)
    return math.hypot(dx, dy)


def _cell_set_dist(c: GridCell, pts: np.ndarray) -> np.ndarray:
    dx = np.maximum(np.maximum(c.x0 - pts[:, 0], 0.0), pts[:, 0] - c.x1)
    dy = np.maximum(np.maximum(c.y0 - pts[:, 1], 0.0), pts[:, 1] - c.y1)
    return np.hypot(dx, dy)


def _cell_set_maxdist(c: GridCell, pts: np.ndarray) -> np.ndarray:
    dx = np.maximum(np.abs(pts[:, 0] - c.x0), np.abs(pts[:, 0] - c.x1))
    dy = np.maximum(np.abs(pts[:, 1] - c.y0), np.abs(pts[:, 1] - c.y1))
    return np.hypot(dx, dy)


class ComponentSolver:
    """Decision and extraction for one rooted component topology."""

    def __init__(self, points: np.ndarray, t: Topology, fr: Forest, grid: Grid, counters: Counters, slack: float = EXTRACT_SLACK):
        self.points = points
        self.t = t
        self.fr = fr
        self.grid = grid
        self.counters = counters
        self.slack = slack
        self.children = t.children()
        self.hops = t.distances()
        self.comp_idx = [np.asarray(fr.components[c]) for c in t.terminals]
        self.comp_pts = [points[idx] for idx in self.comp_idx]
        self.memo: dict[tuple[int, int, int], object] = {}
        self.sums: dict[tuple[int, int, int], CircularDomain] = {}
        self.allowed = self._allowed_cells()

    # candidate cells ------------------------------------------------
    def _allowed_cells(self) -> dict[int, list[GridCell]]:
        t = self.t
        T = t.n_terminals
        out: dict[int, list[GridCell]] = {}
        for s in t.steiner_nodes:
            # seed from the terminal with the tightest reach
            i0 = min(range(T), key=lambda i: (self.hops[s][i], len(self.comp_pts[i])))
            cand = self.grid.cells_near_set(self.comp_pts[i0], self.hops[s][i0] + self.slack)
            keep = []
            for c in cand:
                if all(_cell_set_dist(c, self.comp_pts[i]).min() <= self.hops[s][i] + self.slack for i in range(T)):
                    keep.append(c)
            out[s] = keep
        # prune cells without a compatible cell for every Steiner neighbour
        changed = True
        while changed:
            changed = False
            for s in t.steiner_nodes:
                nbrs = [w for w in t.neighbors(s) if t.is_steiner(w)]
                if not nbrs:
                    continue
                keep = []
                for c in out[s]:
                    if all(any(_square_min_dist(c, c2) <= 1 + self.slack for c2 in out[w]) for w in nbrs):
                        keep.append(c)
                if len(keep) != len(out[s]):
                    out[s] = keep
                    changed = True
        for s in out:
            if not out[s]:
                return {v: [] for v in t.steiner_nodes}
        return out

    def _neighbours(self, w: int, c: GridCell) -> list[GridCell]:
        cand = [c2 for c2 in self.allowed[w] if _square_min_dist(c, c2) <= 1 + self.slack]
        cand.sort(key=lambda c2: (c2.center.x - c.center.x) ** 2 + (c2.center.y - c.center.y) ** 2)
        return cand

    # regions ---------------------------------------------------------
    def region(self, s: int, c: GridCell):
        key = (s, c.ix, c.iy)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.counters.cells_evaluated += 1
        parts = []
        kids = sorted(self.children[s], key=lambda w: self.t.is_steiner(w))
        result = None
        for w in kids:
            v = self._terminal_part(w, c) if not self.t.is_steiner(w) else self._steiner_part(w, c)
            if v is _EMPTY:
                result = _EMPTY
                break
            if v is not _FULL:
                parts.append(v)
        if result is None:
            if not parts:
                result = _FULL
            else:
                r = parts[0] if len(parts) == 1 else intersect_domains(parts)
                self.counters.seen(r)
                result = _EMPTY if r.is_empty else r
        self.memo[key] = result
        return result

    def _terminal_part(self, w: int, c: GridCell):
        pts = self.comp_pts[w]
        d = _cell_set_dist(c, pts)
        near = d <= 1.0
        if not near.any():
            return _EMPTY
        if (_cell_set_maxdist(c, pts[near]) <= 1.0).any():
            return _FULL
        part = clip_to_cell(disk_union(pts[near]), c)
        self.counters.seen(part)
        return _EMPTY if part.is_empty else part

    def _sum(self, w: int, c2: GridCell, u) -> CircularDomain:
        key = (w, c2.ix, c2.iy)
        m = self.sums.get(key)
        if m is None:
            base = c2.to_domain() if u is _FULL else u
            m = minkowski_unit_disk(base)
            self.counters.minkowski_sums += 1
            self.sums[key] = m
        return m

    def _steiner_part(self, w: int, c: GridCell):
        pieces = []
        for c2 in self._neighbours(w, c):
            u = self.region(w, c2)
            if u is _EMPTY:
                continue
            if u is _FULL:
                if _square_max_dist(c, c2) <= 1.0:
                    return _FULL
            else:
                if any(_cell_set_maxdist(c, np.array([[r[1], r[2]]])).item() <= 1.0 for r in u.rows):
                    return _FULL
            piece = clip_to_cell(self._sum(w, c2, u), c)
            if not piece.is_empty:
                pieces.append(piece)
        if not pieces:
            return _EMPTY
        v = pieces[0] if len(pieces) == 1 else union_domains(pieces)
        self.counters.seen(v)
        return v

    # decision and extraction -----------------------------------------
    def root_cells(self) -> list[GridCell]:
        rt = self.t.root
        T = self.t.n_terminals

        def slack_of(c):
            return max(_cell_set_dist(c, self.comp_pts[i]).min() - self.hops[rt][i] for i in range(T))

        return sorted(self.allowed[rt], key=lambda c: (slack_of(c), c.ix, c.iy))

    def solve(self):
        """Placements {node: Point} and witnesses {terminal node: point index}, or None."""
        for c in self.root_cells():
            u = self.region(self.t.root, c)
            if u is _EMPTY:
                continue
            p = c.center if u is _FULL else _first_point(u)
            return self._extract(c, p)
        return None

    def _extract(self, c_root: GridCell, p_root: Point):
        t = self.t
        phi = {t.root: p_root}
        cell_of = {t.root: c_root}
        witness: dict[int, int] = {}
        stack = [t.root]
        while stack:
            s = stack.pop()
            p, c = phi[s], cell_of[s]
            for w in self.children[s]:
                if not t.is_steiner(w):
                    pts = self.comp_pts[w]
                    d = np.hypot(pts[:, 0] - p.x, pts[:, 1] - p.y)
                    j = int(np.argmin(d))
                    if d[j] > 1 + self.slack:
                        raise SolverInvariantError(f"terminal node {w} is {d[j]} from its parent")
                    witness[w] = int(self.comp_idx[w][j])
                    continue
                best = None
                for c2 in self._neighbours(w, c):
                    if c2.distance_to(p) > 1 + self.slack:
                        continue
                    u = self.region(w, c2)
                    if u is _EMPTY:
                        continue
                    if u is _FULL:
                        q = Point(min(max(p.x, c2.x0), c2.x1), min(max(p.y, c2.y0), c2.y1))
                        dist = math.hypot(q.x - p.x, q.y - p.y)
                    else:
                        q, dist = nearest_point(u, p)
                    if best is None or dist < best[0]:
                        best = (dist, q, c2)
                if best is None or best[0] > 1 + self.slack:
                    raise SolverInvariantError(f"no placement for node {w} within reach of its parent")
                phi[w] = best[1]
                cell_of[w] = best[2]
                stack.append(w)
        regions = {}
        for v, c in cell_of.items():
            u = self.region(v, c)
            regions[v] = c.to_domain() if u is _FULL else u
        return {"phi": phi, "witness": witness, "regions": regions}


# -- lambda decision ---------------------------------------------------

class Solver:
    """Decision procedure and optimizer for one instance."""

    def __init__(self, inst: Instance, eps: float = MAX_EPS, strategy: str = "dp", workers: int = 1):
        if strategy not in ("dp", "enumerate"):
            raise ValueError(f"unknown strategy {strategy!r}")
        self.inst = inst
        self.eps = check_eps(eps)
        self.strategy = strategy
        self.workers = max(1, int(workers))
        self.mst = euclidean_mst(inst.points)
        self.max_mst = max(e.length for e in self.mst)
        self.pts = np.asarray(inst.points, dtype=float)
        self.counters = Counters()
        self._forests: dict[int, Forest] = {}
        self._compdist: dict[int, np.ndarray] = {}

    def forest(self, K: int) -> Forest:
        if K not in self._forests:
            self._forests[K] = forest(self.inst, K, self.mst)
        return self._forests[K]

    def component_distances(self, K: int) -> np.ndarray:
        """Minimum point distance between every pair of F_K components."""
        if K not in self._compdist:
            fr = self.forest(K)
            D = np.zeros((K, K))
            for a in range(K):
                pa = self.pts[list(fr.components[a])]
                for b in range(a + 1, K):
                    pb = self.pts[list(fr.components[b])]
                    d = np.hypot(pa[:, None, 0] - pb[None, :, 0], pa[:, None, 1] - pb[None, :, 1]).min()
                    D[a, b] = D[b, a] = d
            self._compdist[K] = D
        return self._compdist[K]

    def k_range(self) -> range:
        return range(1, min(self.inst.n, 4 * self.inst.k + 1) + 1)

    def spanning_result(self, lam: float) -> SolveResult:
        kept = [(e.i, e.j) for e in self.mst]
        return SolveResult(lam, [], [], kept, 1, "mst", self.inst.n, self.max_mst)

    def decide_lambda(self, lam: float) -> SolveResult | None:
        if not lam > 0:
            raise InputError("lambda must be positive")
        self.counters.decisions += 1
        if self.max_mst <= lam:
            return self.spanning_result(lam)
        if self.inst.k == 0:
            return None
        eff = lam * (1.0 + DECISION_SLACK)
        scaled = self.pts / eff
        grid = Grid(self.eps)
        for K in self.k_range():
            if K == 1:
                continue
            fr = self.forest(K)
            if fr.longest_kept > lam:
                continue
            D = self.component_distances(K) / eff
            pair_ok = lambda i, j, h, D=D: D[i, j] <= h + EXTRACT_SLACK
            cache: dict = {}
            raws = enumerate_topologies(K, self.inst.k, pair_ok)
            if self.workers > 1:
                found = self._parallel(raws, scaled, fr, grid, K)
            else:
                found = None
                for raw in raws:
                    sol = _solve_raw(raw, scaled, fr, grid, self.strategy, self.counters, cache, self.eps)
                    if sol is not None:
                        found = (raw, sol)
                        break
            if found is not None:
                return self._assemble(lam, eff, K, fr, *found)
        return None

    def _parallel(self, raws: Iterable[Topology], scaled, fr, grid, K):
        batch_size = 64
        raws = list(raws)
        batches = [raws[i:i + batch_size] for i in range(0, len(raws), batch_size)]
        if not batches:
            return None
        with ProcessPoolExecutor(max_workers=self.workers) as ex:
            futs = [ex.submit(_solve_batch, b, scaled, fr, grid, self.strategy, self.eps) for b in batches]
            for f in futs:
                # results are consumed in enumeration order, so the outcome
                # matches a serial run
                found, cnt = f.result()
                self.counters.merge(cnt)
                if found is not None:
                    for g in futs:
                        g.cancel()
                    return found
        return None

    def _assemble(self, lam, eff, K, fr: Forest, raw: Topology, sol) -> SolveResult:
        n = self.inst.n
        steiner: list[Point] = []
        edges: list[tuple[int, int]] = []
        for comp, res in sol:
            ids = {}
            for s in comp.steiner_nodes:
                p = res["phi"][s]
                ids[s] = n + len(steiner)
                steiner.append(Point(p.x * eff, p.y * eff))
            for u, v in comp.edges:
                a = ids[u] if comp.is_steiner(u) else res["witness"][u]
                b = ids[v] if comp.is_steiner(v) else res["witness"][v]
                edges.append((min(a, b), max(a, b)))
        kept = [(e.i, e.j) for e in fr.kept_edges]
        out = SolveResult(lam, steiner, edges, kept, K, _topology_id(raw), n)
        # feasible regions of the winning guess, in scaled coordinates
        out.regions = [(eff, d) for _, res in sol for d in res.get("regions", {}).values()]
        out.witness_bottleneck = max(out.edge_lengths(self.inst.points), default=0.0)
        return out

    def optimize(self, tol_rel: float = 1e-6) -> SolveResult:
        """Binary search on lambda between max-MST/(k+1) and max-MST."""
        if not tol_rel > 0:
            raise InputError("tolerance must be positive")
        t0 = time.perf_counter()
        M = self.max_mst
        best = self.spanning_result(M)
        if self.inst.k == 0:
            best.counters = self.counters
            best.elapsed_s = time.perf_counter() - t0
            return best
        lo = M / (self.inst.k + 1)
        res = self.decide_lambda(lo)
        if res is not None:
            best = res
        else:
            hi = M
            while hi > lo * (1.0 + tol_rel):
                mid = math.sqrt(lo * hi)
                res = self.decide_lambda(mid)
                if res is not None:
                    hi, best = mid, res
                else:
                    lo = mid
        best.counters = self.counters
        best.elapsed_s = time.perf_counter() - t0
        return best


def _topology_id(t: Topology) -> str:
    return f"K{t.n_terminals}s{t.n_steiner}:" + ",".join(f"{u}-{v}" for u, v in t.edges)


def _solve_raw(raw: Topology, scaled, fr, grid, strategy, counters: Counters, cache: dict, eps: float):
    counters.topologies += 1
    out = []
    for comp in split_components(raw):
        # infeasibility is invariant under relabeling Steiner nodes; a
        # placement is stored against the exact labeling it was built for
        key = comp.canonical_key()
        if key in cache or comp in cache:
            counters.component_cache_hits += 1
            if comp in cache:
                res = cache[comp]
            else:
                res = None if cache[key] is None else "miss"
            if res is None:
                return None
            if isinstance(res, str):
                res = _solve_component(comp, scaled, fr, grid, strategy, counters, eps)
                cache[comp] = res
        else:
            res = _solve_component(comp, scaled, fr, grid, strategy, counters, eps)
            cache[key] = None if res is None else "feasible"
            cache[comp] = res
        if res is None:
            return None
        out.append((comp, res))
    return out


def _solve_component(comp: Topology, scaled, fr, grid, strategy, counters: Counters, eps: float):
    counters.components += 1
    if strategy == "dp":
        return ComponentSolver(scaled, comp, fr, grid, counters).solve()
    for xi in enumerate_cell_maps(scaled, comp, fr, eps, grid=grid):
        counters.cell_maps += 1
        res = decide(scaled, comp, fr, xi, counters)
        if res is not None:
            return res
    return None


def _solve_batch(raws, scaled, fr, grid, strategy, eps):
    counters = Counters()
    cache: dict = {}
    for raw in raws:
        sol = _solve_raw(raw, scaled, fr, grid, strategy, counters, cache, eps)
        if sol is not None:
            return (raw, sol), counters
    return None, counters


# -- functional API ----------------------------------------------------

def decide_lambda(inst: Instance, lam: float, eps: float = MAX_EPS, strategy: str = "dp", workers: int = 1) -> SolveResult | None:
    return Solver(inst, eps, strategy, workers).decide_lambda(lam)


def optimize(inst: Instance, tol_rel: float = 1e-6, eps: float = MAX_EPS, strategy: str = "dp", workers: int = 1) -> SolveResult:
    return Solver(inst, eps, strategy, workers).optimize(tol_rel)
