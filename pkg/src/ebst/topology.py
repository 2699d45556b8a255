"""Euclidean MST, the forests F_K, and enumeration of contracted topologies.

A topology is a tree whose nodes are terminal nodes (connected components of
F_K, contracted) and Steiner nodes.  Raw topologies, as enumerated, may route
through terminal nodes; ``split_components`` cuts them at terminals into the
pieces the feasibility solver works on, where every terminal is a leaf.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

from .geom import TOL, Point

MAX_STEINER_DEGREE = 5


class InputError(ValueError):
    """Malformed problem instance."""


@dataclass(frozen=True)
class Instance:
    points: tuple[Point, ...]
    k: int

    def __init__(self, points, k: int):
        pts = tuple(Point(float(p[0]), float(p[1])) for p in points)
        if len(pts) < 2:
            raise InputError("need at least two points")
        if k < 0:
            raise InputError("k must be nonnegative")
        if not all(math.isfinite(c) for p in pts for c in p):
            raise InputError("coordinates must be finite")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "k", int(k))
        _check_distinct(pts)

    @property
    def n(self) -> int:
        return len(self.points)

    def scaled(self, lam: float) -> np.ndarray:
        return np.asarray(self.points, dtype=float) / lam


def _check_distinct(pts: Sequence[Point]) -> None:
    order = sorted(range(len(pts)), key=lambda i: pts[i])
    for a, b in zip(order, order[1:]):
        pa, pb = pts[a], pts[b]
        if math.hypot(pa.x - pb.x, pa.y - pb.y) <= TOL.length:
            raise InputError(f"duplicate points {a} and {b}")
    # sorting by x only catches neighbours in x order; check a window too
    arr = np.asarray(pts)
    if len(arr) <= 2000:
        d = np.hypot(arr[:, None, 0] - arr[None, :, 0], arr[:, None, 1] - arr[None, :, 1])
        np.fill_diagonal(d, np.inf)
        if d.min() <= TOL.length:
            i, j = np.unravel_index(np.argmin(d), d.shape)
            raise InputError(f"duplicate points {min(i, j)} and {max(i, j)}")


@dataclass(frozen=True)
class MSTEdge:
    i: int
    j: int
    length: float

    def key(self):
        return (self.length, self.i, self.j)


def euclidean_mst(points) -> list[MSTEdge]:
    """Kruskal over all pairs, edges ordered by (length, smaller index, larger index)."""
    arr = np.asarray([(p[0], p[1]) for p in points], dtype=float)
    n = len(arr)
    if n < 2:
        raise InputError("need at least two points")
    iu, ju = np.triu_indices(n, 1)
    lens = np.hypot(arr[iu, 0] - arr[ju, 0], arr[iu, 1] - arr[ju, 1])
    if lens.min() <= TOL.length:
        raise InputError("duplicate points")
    order = np.lexsort((ju, iu, lens))
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    out = []
    for e in order:
        i, j = int(iu[e]), int(ju[e])
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            out.append(MSTEdge(i, j, float(lens[e])))
            if len(out) == n - 1:
                break
    return out


@dataclass(frozen=True)
class Forest:
    K: int
    components: tuple[tuple[int, ...], ...]
    kept_edges: tuple[MSTEdge, ...]
    removed_edges: tuple[MSTEdge, ...]

    @property
    def longest_kept(self) -> float:
        return max((e.length for e in self.kept_edges), default=0.0)

    def component_of(self) -> dict[int, int]:
        return {v: c for c, comp in enumerate(self.components) for v in comp}


def forest(inst_or_points, K: int, mst: list[MSTEdge] | None = None) -> Forest:
    """F_K: the MST minus its K-1 longest edges, components ordered by smallest member."""
    pts = inst_or_points.points if isinstance(inst_or_points, Instance) else inst_or_points
    n = len(pts)
    if not 1 <= K <= n:
        raise InputError(f"K must lie in 1..{n}, got {K}")
    mst = mst if mst is not None else euclidean_mst(pts)
    ordered = sorted(mst, key=MSTEdge.key)
    kept = ordered[: n - K]
    removed = ordered[n - K:]
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in kept:
        parent[find(e.i)] = find(e.j)
    groups: dict[int, list[int]] = {}
    for v in range(n):
        groups.setdefault(find(v), []).append(v)
    comps = tuple(sorted((tuple(g) for g in groups.values()), key=lambda g: g[0]))
    return Forest(K, comps, tuple(kept), tuple(removed))


# -- topologies --------------------------------------------------------

@dataclass(frozen=True)
class Topology:
    """Tree on terminal nodes 0..T-1 and Steiner nodes T..T+s-1.

    ``terminals[i]`` is the forest component contracted into terminal node i.
    """

    terminals: tuple[int, ...]
    n_steiner: int
    edges: tuple[tuple[int, int], ...]
    root: int | None = None
    _adj: dict = field(default=None, compare=False, repr=False, hash=False)

    def __post_init__(self):
        adj: dict[int, list[int]] = {v: [] for v in range(self.size)}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "_adj", {v: tuple(sorted(ns)) for v, ns in adj.items()})

    @property
    def n_terminals(self) -> int:
        return len(self.terminals)

    @property
    def size(self) -> int:
        return len(self.terminals) + self.n_steiner

    def is_steiner(self, v: int) -> bool:
        return v >= len(self.terminals)

    @property
    def steiner_nodes(self) -> range:
        return range(len(self.terminals), self.size)

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def children(self) -> dict[int, list[int]]:
        """Children lists of the tree rooted at ``root``."""
        root = self.root if self.root is not None else len(self.terminals)
        ch: dict[int, list[int]] = {v: [] for v in range(self.size)}
        seen = {root}
        stack = [root]
        while stack:
            u = stack.pop()
            for w in self._adj[u]:
                if w not in seen:
                    seen.add(w)
                    ch[u].append(w)
                    stack.append(w)
        return ch

    def postorder(self) -> list[int]:
        """Nodes ordered children-first (by level, leaves at level 0)."""
        root = self.root if self.root is not None else len(self.terminals)
        ch = self.children()
        out: list[int] = []
        stack = [(root, False)]
        while stack:
            u, done = stack.pop()
            if done:
                out.append(u)
                continue
            stack.append((u, True))
            for w in reversed(ch[u]):
                stack.append((w, False))
        return out

    def distances(self) -> list[list[int]]:
        """All-pairs hop distances."""
        n = self.size
        out = []
        for s in range(n):
            d = [-1] * n
            d[s] = 0
            q = [s]
            for u in q:
                for w in self._adj[u]:
                    if d[w] < 0:
                        d[w] = d[u] + 1
                        q.append(w)
            out.append(d)
        return out

    def is_tree(self) -> bool:
        if len(self.edges) != self.size - 1:
            return False
        return all(x >= 0 for x in self.distances()[0]) if self.size else True

    def violations(self, leaves_are_terminals: bool = True) -> list[str]:
        out = []
        if not self.is_tree():
            out.append("not a tree")
        T = len(self.terminals)
        for u, v in self.edges:
            if u < T and v < T:
                out.append(f"edge {u}-{v} joins two terminals")
        for s in self.steiner_nodes:
            d = self.degree(s)
            if d > MAX_STEINER_DEGREE:
                out.append(f"Steiner node {s} has degree {d}")
            if d <= 1:
                out.append(f"Steiner node {s} is a leaf")
        if leaves_are_terminals:
            for t in range(T):
                if self.degree(t) != 1:
                    out.append(f"terminal node {t} is not a leaf")
        if self.root is not None and not self.is_steiner(self.root):
            out.append("root is not a Steiner node")
        return out

    def canonical_key(self) -> tuple:
        """Key invariant under relabeling of Steiner nodes."""
        T, s = len(self.terminals), self.n_steiner
        best = None
        for perm in itertools.permutations(range(s)) if s <= 6 else [tuple(range(s))]:
            relabel = lambda v: v if v < T else T + perm[v - T]
            code = tuple(sorted(tuple(sorted((relabel(u), relabel(v)))) for u, v in self.edges))
            if best is None or code < best:
                best = code
        if s > 6:
            best = _ahu_code(self)
        return (self.terminals, s, best)


def _ahu_code(t: Topology) -> tuple:
    """Tree canonical code with labeled terminals, rooted at every node (min taken)."""
    T = len(t.terminals)

    def enc(u, parent):
        kids = sorted(enc(w, u) for w in t.neighbors(u) if w != parent)
        return (("T", t.terminals[u]) if u < T else ("S",), tuple(kids))

    return min(enc(r, -1) for r in range(t.size))


def _steiner_forests(s: int) -> Iterator[list[tuple[int, int]]]:
    """All labeled forests on Steiner nodes 0..s-1 (as edge lists)."""
    pairs = list(itertools.combinations(range(s), 2))
    for r in range(s):
        for es in itertools.combinations(pairs, r):
            parent = list(range(s))

            def find(a):
                while parent[a] != a:
                    a = parent[a]
                return a

            ok = True
            for u, v in es:
                ru, rv = find(u), find(v)
                if ru == rv:
                    ok = False
                    break
                parent[ru] = rv
            if ok:
                yield list(es)


PairCheck = Callable[[int, int, int], bool]


def enumerate_topologies(K: int, k_max: int, pair_ok: PairCheck | None = None) -> Iterator[Topology]:
    """Raw topologies on K labeled terminal nodes and 1..k_max unlabeled Steiner nodes.

    Every edge touches a Steiner node, Steiner degrees lie in 2..5, so all
    leaves are terminals; terminals themselves may be interior.  Each
    isomorphism class (under Steiner relabeling) is produced once, ordered by
    Steiner count.  ``pair_ok(i, j, h)``, when given, rejects trees where
    terminal nodes i and j end up h hops apart.
    """
    if K < 2:
        return
    for s in range(1, k_max + 1):
        if K + s - 1 > MAX_STEINER_DEGREE * s:
            continue
        seen: set = set()
        for fedges in _steiner_forests(s):
            yield from _attach_terminals(K, s, fedges, pair_ok, seen)


def _attach_terminals(K, s, fedges, pair_ok, seen) -> Iterator[Topology]:
    comp = list(range(s))

    def find(a):
        while comp[a] != a:
            a = comp[a]
        return a

    for u, v in fedges:
        comp[find(u)] = find(v)
    roots = sorted({find(v) for v in range(s)})
    members = [[v for v in range(s) if find(v) == r] for r in roots]
    m = len(members)
    fdeg = [0] * s
    for u, v in fedges:
        fdeg[u] += 1
        fdeg[v] += 1
    if any(d > MAX_STEINER_DEGREE for d in fdeg):
        return
    # forest hop distances
    fdist = [[-1] * s for _ in range(s)]
    adj = [[] for _ in range(s)]
    for u, v in fedges:
        adj[u].append(v)
        adj[v].append(u)
    for a in range(s):
        fdist[a][a] = 0
        q = [a]
        for u in q:
            for w in adj[u]:
                if fdist[a][w] < 0:
                    fdist[a][w] = fdist[a][u] + 1
                    q.append(w)
    # attachment options: nonempty choice of at most one node per component
    slots = []
    for choice in itertools.product(*[[None] + mem for mem in members]):
        att = tuple(v for v in choice if v is not None)
        if att:
            slots.append(att)
    slots.sort(key=lambda a: (len(a), a))
    extra_budget = m - 1
    deg = list(fdeg)
    chosen: list[tuple[int, ...]] = []

    def rec(t: int, budget: int):
        if t == K:
            if budget != 0 or any(d < 2 for d in deg):
                return
            edges = [(K + u, K + v) for u, v in fedges]
            for term, att in enumerate(chosen):
                edges.extend((term, K + v) for v in att)
            top = Topology(tuple(range(K)), s, tuple(sorted(edges)))
            if not top.is_tree():
                return
            if pair_ok is not None and not _pairs_ok(top, pair_ok):
                return
            key = top.canonical_key()
            if key in seen:
                return
            seen.add(key)
            yield top
            return
        # enough capacity left for the remaining terminals?
        if sum(MAX_STEINER_DEGREE - d for d in deg) < K - t:
            return
        for att in slots:
            extra = len(att) - 1
            if extra > budget:
                break
            if any(deg[v] >= MAX_STEINER_DEGREE for v in att):
                continue
            if pair_ok is not None and not _partial_ok(t, att, chosen, find, fdist, pair_ok):
                continue
            for v in att:
                deg[v] += 1
            chosen.append(att)
            yield from rec(t + 1, budget - extra)
            chosen.pop()
            for v in att:
                deg[v] -= 1

    yield from rec(0, extra_budget)


def _partial_ok(t, att, chosen, find, fdist, pair_ok) -> bool:
    """Exact hop distances to earlier terminals sharing a Steiner component."""
    for t2, att2 in enumerate(chosen):
        best = None
        for u in att:
            for v in att2:
                if find(u) == find(v):
                    h = fdist[u][v] + 2
                    best = h if best is None else min(best, h)
        if best is not None and not pair_ok(t2, t, best):
            return False
    return True


def _pairs_ok(top: Topology, pair_ok) -> bool:
    d = top.distances()
    T = top.n_terminals
    return all(pair_ok(i, j, d[i][j]) for i in range(T) for j in range(i + 1, T))


def prune_steiner_leaves(t: Topology) -> Topology:
    """Repeatedly drop Steiner nodes of degree <= 1, relabeling the rest."""
    T = t.n_terminals
    alive = set(range(t.size))
    edges = set(t.edges)
    changed = True
    while changed:
        changed = False
        deg = {v: 0 for v in alive}
        for u, v in edges:
            deg[u] += 1
            deg[v] += 1
        for v in sorted(alive):
            if v >= T and deg[v] <= 1:
                alive.discard(v)
                edges = {e for e in edges if v not in e}
                changed = True
                break
    st = sorted(v for v in alive if v >= T)
    relabel = {v: v for v in range(T)}
    relabel.update({v: T + i for i, v in enumerate(st)})
    new_edges = tuple(sorted(tuple(sorted((relabel[u], relabel[v]))) for u, v in edges))
    root = relabel.get(t.root) if t.root is not None and t.root in alive else None
    return Topology(t.terminals, len(st), new_edges, root)


def split_components(t: Topology) -> list[Topology]:
    """Cut a raw topology at its terminal nodes.

    Each piece consists of one connected group of Steiner nodes plus their
    terminal neighbours (now leaves), rooted at its smallest Steiner node.
    """
    t = prune_steiner_leaves(t)
    T = t.n_terminals
    seen: set[int] = set()
    out = []
    for s0 in t.steiner_nodes:
        if s0 in seen:
            continue
        group = []
        stack = [s0]
        seen.add(s0)
        while stack:
            u = stack.pop()
            group.append(u)
            for w in t.neighbors(u):
                if w >= T and w not in seen:
                    seen.add(w)
                    stack.append(w)
        group.sort()
        terms = sorted({w for u in group for w in t.neighbors(u) if w < T})
        tl = {w: i for i, w in enumerate(terms)}
        sl = {u: len(terms) + i for i, u in enumerate(group)}
        relabel = {**tl, **sl}
        edges = []
        for u in group:
            for w in t.neighbors(u):
                if w < T or (w > u):
                    edges.append(tuple(sorted((relabel[u], relabel[w]))))
        out.append(Topology(tuple(t.terminals[w] for w in terms), len(group), tuple(sorted(edges)), len(terms)))
    return out


def prufer_topologies(K: int, k_max: int) -> set:
    """Reference enumeration: Pruefer sequences, structural filter, canonical dedup.

    Exponential in K + k_max; meant for cross-checking small cases.
    """
    keys = set()
    for s in range(1, k_max + 1):
        n = K + s
        for seq in itertools.product(range(n), repeat=n - 2):
            edges = _prufer_decode(list(seq), n)
            t = Topology(tuple(range(K)), s, tuple(sorted(edges)))
            if not t.violations(leaves_are_terminals=False):
                keys.add(t.canonical_key())
    return keys


def _prufer_decode(seq: list[int], n: int) -> list[tuple[int, int]]:
    deg = [1] * n
    for v in seq:
        deg[v] += 1
    edges = []
    for v in seq:
        leaf = min(u for u in range(n) if deg[u] == 1)
        edges.append(tuple(sorted((leaf, v))))
        deg[leaf] -= 1
        deg[v] -= 1
    u, w = [x for x in range(n) if deg[x] == 1]
    edges.append((u, w))
    return edges
