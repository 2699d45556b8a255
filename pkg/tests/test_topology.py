import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ebst.generators import random_points
from ebst.oracle import bottleneck_spanning_value
from ebst.topology import (
    InputError,
    Instance,
    Topology,
    enumerate_topologies,
    euclidean_mst,
    forest,
    prufer_topologies,
    prune_steiner_leaves,
    split_components,
)


def prim_total(pts):
    """Independent O(n^2) Prim returning the total MST length."""
    P = np.asarray(pts, float)
    n = len(P)
    best = np.hypot(*(P - P[0]).T)
    used = np.zeros(n, bool)
    used[0] = True
    total = 0.0
    for _ in range(n - 1):
        j = int(np.argmin(np.where(used, np.inf, best)))
        total += best[j]
        used[j] = True
        best = np.minimum(best, np.hypot(*(P - P[j]).T))
    return total


class TestInstance:
    def test_needs_two_points(self):
        with pytest.raises(InputError):
            Instance([(0, 0)], 1)

    def test_duplicates(self):
        with pytest.raises(InputError):
            Instance([(0, 0), (1, 1), (0, 0)], 1)

    def test_negative_k(self):
        with pytest.raises(InputError):
            Instance([(0, 0), (1, 0)], -1)

    def test_non_finite(self):
        with pytest.raises(InputError):
            Instance([(0, 0), (math.inf, 0)], 1)

    def test_scaled(self):
        assert Instance([(0, 0), (3, 0)], 1).scaled(1.5).tolist() == [[0, 0], [2, 0]]


class TestMST:
    def test_collinear(self):
        es = euclidean_mst([(0, 0), (1, 0), (3, 0)])
        assert {(e.i, e.j, e.length) for e in es} == {(0, 1, 1.0), (1, 2, 2.0)}

    def test_unit_square(self):
        es = euclidean_mst([(0, 0), (0, 1), (1, 0), (1, 1)])
        assert len(es) == 3 and all(e.length == 1.0 for e in es)

    def test_matches_prim(self):
        pts = random_points(50, 3)
        assert sum(e.length for e in euclidean_mst(pts)) == pytest.approx(prim_total(pts), rel=1e-12)

    def test_tie_break_is_deterministic(self):
        es = euclidean_mst([(0, 0), (0, 1), (1, 0), (1, 1)])
        assert [(e.i, e.j) for e in es] == [(0, 1), (0, 2), (1, 3)]

    @given(st.integers(3, 30), st.integers(0, 10_000))
    def test_bottleneck_matches_oracle(self, n, seed):
        pts = random_points(n, seed)
        assert max(e.length for e in euclidean_mst(pts)) == bottleneck_spanning_value(pts)


class TestForest:
    def test_collinear_two(self):
        f = forest([(0, 0), (1, 0), (3, 0)], 2)
        assert f.components == ((0, 1), (2,))
        assert [(e.i, e.j) for e in f.kept_edges] == [(0, 1)]

    def test_one_component_keeps_everything(self):
        pts = random_points(10, 1)
        assert len(forest(pts, 1).kept_edges) == 9

    def test_n_components(self):
        pts = random_points(10, 1)
        f = forest(pts, 10)
        assert not f.kept_edges and len(f.components) == 10

    def test_out_of_range(self):
        with pytest.raises(InputError):
            forest([(0, 0), (1, 0)], 3)

    @given(st.integers(2, 25), st.integers(0, 10_000), st.data())
    def test_partition_and_ordering(self, n, seed, data):
        pts = random_points(n, seed)
        K = data.draw(st.integers(1, n))
        f = forest(pts, K)
        assert sorted(v for c in f.components for v in c) == list(range(n))
        assert len(f.components) == K and len(f.kept_edges) == n - K
        if f.kept_edges and f.removed_edges:
            assert max(e.length for e in f.kept_edges) <= min(e.length for e in f.removed_edges)


class TestEnumeration:
    def test_two_terminals_one_steiner(self):
        ts = list(enumerate_topologies(2, 1))
        assert len(ts) == 1
        assert ts[0].edges == ((0, 2), (1, 2))

    def test_three_terminals_star(self):
        ts = list(enumerate_topologies(3, 1))
        assert len(ts) == 1 and ts[0].degree(3) == 3

    def test_degree_guard(self):
        assert list(enumerate_topologies(7, 1)) == []

    def test_single_terminal_yields_nothing(self):
        assert list(enumerate_topologies(1, 3)) == []

    @pytest.mark.parametrize("K,k", [(K, k) for K in range(2, 5) for k in range(0, 4)])
    def test_matches_prufer_reference(self, K, k):
        mine = [t.canonical_key() for t in enumerate_topologies(K, k)]
        assert len(mine) == len(set(mine))
        assert set(mine) == prufer_topologies(K, k)

    @pytest.mark.parametrize("K,k", [(2, 3), (4, 2), (5, 2), (6, 3)])
    def test_structural_invariants(self, K, k):
        for t in enumerate_topologies(K, k):
            assert t.violations(leaves_are_terminals=False) == []
            for v in range(t.n_terminals):
                assert t.degree(v) >= 1
            assert all(t.degree(s) >= 2 for s in t.steiner_nodes)

    def test_ordered_by_steiner_count(self):
        counts = [t.n_steiner for t in enumerate_topologies(4, 3)]
        assert counts == sorted(counts)

    def test_pair_filter_is_a_subset(self):
        ok = lambda i, j, h: h <= 2
        allk = {t.canonical_key() for t in enumerate_topologies(4, 2)}
        pruned = list(enumerate_topologies(4, 2, ok))
        assert {t.canonical_key() for t in pruned} <= allk
        for t in pruned:
            d = t.distances()
            assert all(d[i][j] <= 2 for i in range(4) for j in range(i + 1, 4))

    def test_canonical_key_invariant_under_relabel(self):
        t = Topology((0, 1, 2), 2, ((0, 3), (1, 3), (2, 4), (3, 4)))
        u = Topology((0, 1, 2), 2, ((0, 4), (1, 4), (2, 3), (3, 4)))
        assert t.canonical_key() == u.canonical_key()


class TestSplit:
    def test_single_component(self):
        (t,) = enumerate_topologies(2, 1)
        comps = split_components(t)
        assert len(comps) == 1 and comps[0].root == 2

    def test_two_stars_joined_by_terminal(self):
        # C0 - s3 - C1 - s4 - C2: terminal 1 separates the stars
        t = Topology((0, 1, 2), 2, ((0, 3), (1, 3), (1, 4), (2, 4)))
        comps = split_components(t)
        assert len(comps) == 2
        assert {c.terminals for c in comps} == {(0, 1), (1, 2)}
        for c in comps:
            assert c.violations() == []

    def test_leaf_steiner_pruned(self):
        t = Topology((0, 1), 2, ((0, 2), (1, 2), (2, 3)))
        p = prune_steiner_leaves(t)
        assert p.n_steiner == 1
        comps = split_components(t)
        assert len(comps) == 1 and comps[0].n_steiner == 1

    def test_components_match_connectivity_oracle(self):
        for t in enumerate_topologies(5, 3):
            comps = split_components(t)
            # count connected groups of Steiner nodes directly
            T = t.n_terminals
            seen, groups = set(), 0
            for s in t.steiner_nodes:
                if s in seen:
                    continue
                groups += 1
                stack = [s]
                seen.add(s)
                while stack:
                    u = stack.pop()
                    for w in t.neighbors(u):
                        if w >= T and w not in seen:
                            seen.add(w)
                            stack.append(w)
            assert len(comps) == groups
            assert sum(c.n_steiner for c in comps) == t.n_steiner
            assert sum(len(c.edges) for c in comps) == len(t.edges)


def test_four_k_plus_one_bound():
    # K + s - 1 edges, all on Steiner nodes of degree <= 5: K <= 4k + 1
    for k in range(1, 3):
        assert list(enumerate_topologies(4 * k + 2, k)) == []
        assert list(enumerate_topologies(4 * k + 1, k))
