import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ebst.generators import random_points
from ebst.oracle import (
    OracleConfig,
    OracleSizeError,
    batch_bottleneck,
    bottleneck_spanning_value,
    brute_force_opt,
    brute_force_report,
)
from ebst.topology import Instance


def kruskal_max(pts):
    """Longest MST edge by sorting all pairs and union-find."""
    n = len(pts)
    es = sorted((math.dist(pts[i], pts[j]), i, j) for i in range(n) for j in range(i + 1, n))
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    worst = 0.0
    for d, i, j in es:
        a, b = find(i), find(j)
        if a != b:
            parent[a] = b
            worst = d
    return worst


class TestSpanning:
    def test_collinear(self):
        assert bottleneck_spanning_value([(0, 0), (1, 0), (3, 0)]) == 2.0

    def test_with_midpoint(self):
        assert bottleneck_spanning_value([(0, 0), (3, 0), (1.5, 0)]) == 1.5

    def test_unit_square(self):
        assert bottleneck_spanning_value([(0, 0), (0, 1), (1, 0), (1, 1)]) == 1.0

    def test_too_few(self):
        with pytest.raises(ValueError):
            bottleneck_spanning_value([(0, 0)])

    @given(st.integers(2, 20), st.integers(0, 10_000))
    def test_matches_kruskal(self, n, seed):
        pts = random_points(n, seed)
        assert bottleneck_spanning_value(pts) == pytest.approx(kruskal_max(pts), rel=1e-15)

    def test_batch(self):
        P = np.array([[0.0, 0.0], [3.0, 0.0]])
        S = np.array([[[1.5, 0.0]], [[0.0, 5.0]]])
        # placed points must be spanned too
        assert batch_bottleneck(P, S).tolist() == [1.5, 5.0]


class TestBruteForce:
    def test_chain(self):
        v = brute_force_opt(Instance([(0, 0), (3, 0)], 1), cfg=OracleConfig(grid_resolution=0.01))
        assert v == pytest.approx(1.5, abs=0.01)

    def test_equilateral(self):
        tri = [(0, 0), (2, 0), (1, math.sqrt(3))]
        v = brute_force_opt(tri, 1, OracleConfig(grid_resolution=0.005))
        assert v == pytest.approx(2 / math.sqrt(3), abs=0.01)
        assert v >= 2 / math.sqrt(3) - 1e-12

    def test_k0_is_spanning_value(self):
        pts = random_points(6, 3)
        assert brute_force_opt(pts, 0) == bottleneck_spanning_value(pts)

    def test_size_cap(self):
        cfg = OracleConfig(grid_resolution=0.001, exhaustive_limit=10, max_evaluations=50)
        with pytest.raises(OracleSizeError):
            brute_force_opt(random_points(5, 1), 2, cfg)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            OracleConfig(grid_resolution=0)
        with pytest.raises(ValueError):
            OracleConfig(bounding_margin=-1)

    @pytest.mark.parametrize("seed", range(3))
    def test_branch_and_bound_matches_exhaustive(self, seed):
        pts = random_points(4, seed, box=2.0)
        a = brute_force_report(pts, 1, OracleConfig(grid_resolution=0.05))
        b = brute_force_report(pts, 1, OracleConfig(grid_resolution=0.05, exhaustive_limit=0))
        assert a.mode == "exhaustive" and b.mode == "branch-and-bound"
        assert b.value <= a.value + 0.01 * 0.05 + 1e-12
        assert b.value >= a.value - 1e-12

    @pytest.mark.parametrize("seed", range(3))
    def test_non_increasing_in_k(self, seed):
        pts = random_points(4, 50 + seed, box=3.0)
        cfg = OracleConfig(grid_resolution=0.05)
        vals = [brute_force_opt(pts, k, cfg) for k in range(3)]
        assert vals[1] <= vals[0] and vals[2] <= vals[1] + 0.01 * 0.05

    @pytest.mark.parametrize("seed", range(3))
    def test_halving_resolution(self, seed):
        pts = random_points(3, 80 + seed, box=3.0)
        coarse = brute_force_report(pts, 1, OracleConfig(grid_resolution=0.1))
        fine = brute_force_report(pts, 1, OracleConfig(grid_resolution=0.05))
        assert fine.value <= coarse.value + fine.additive_bound

    def test_reports_bound(self):
        rep = brute_force_report([(0, 0), (3, 0)], 2, OracleConfig(grid_resolution=0.1))
        assert rep.additive_bound >= 2 * 0.1 * math.sqrt(0.5)
        assert len(rep.placements) == 2

    @settings(max_examples=15)
    @given(st.integers(0, 10_000))
    def test_placements_reproduce_value(self, seed):
        pts = random_points(3, seed, box=3.0)
        rep = brute_force_report(pts, 1, OracleConfig(grid_resolution=0.1))
        if rep.placements:
            assert bottleneck_spanning_value(list(pts) + rep.placements) == pytest.approx(rep.value, rel=1e-12)
