import math

import numpy as np
import pytest

from ebst.domain import GridCell
from ebst.grid import GRID_OFFSET, MAX_EPS, CellMap, Grid, check_eps, enumerate_cell_maps, steiner_cells_per_anchor
from ebst.solver import decide
from ebst.topology import Instance, Topology, enumerate_topologies, forest, split_components


def chain_setup():
    pts = np.array([[0.0, 0.0], [2.0, 0.0]])
    (t,) = enumerate_topologies(2, 1)
    (comp,) = split_components(t)
    return pts, comp, forest(pts, 2)


def respects(xi: CellMap, comp, fr, pts, phi) -> bool:
    cells = xi.as_dict()
    for s, p in phi.items():
        if not cells[s].contains(p, 1e-12):
            return False
    for s in comp.steiner_nodes:
        for w in comp.children()[s]:
            if comp.is_steiner(w):
                continue
            c = cells[w]
            members = [pts[i] for i in fr.components[comp.terminals[w]] if c.contains(pts[i], 1e-12)]
            if not any(math.hypot(q[0] - phi[s][0], q[1] - phi[s][1]) <= 1 for q in members):
                return False
    return True


class TestGrid:
    def test_eps_cap(self):
        assert check_eps(0.1) == 0.1
        with pytest.raises(ValueError):
            check_eps(0.2)
        with pytest.raises(ValueError):
            Grid(0.0)

    def test_offset_keeps_integer_points_off_edges(self):
        g = Grid(MAX_EPS)
        for x in range(-5, 6):
            assert len(g.cells_of_point(float(x), float(-x))) == 1

    def test_boundary_point_in_all_incident_cells(self):
        g = Grid(0.1, offset=(0.0, 0.0))
        assert len(g.cells_of_point(0.1, 0.05)) == 2
        assert len(g.cells_of_point(0.1, 0.2)) == 4

    def test_cell_of_point_contains_it(self):
        g = Grid(0.1)
        rng = np.random.default_rng(0)
        for x, y in rng.uniform(-3, 3, size=(200, 2)):
            assert g.cell_of_point(x, y).contains((x, y))

    def test_cells_within_sorted(self):
        g = Grid(0.1)
        cs = g.cells_within(0.3, 0.4, 0.5)
        d = [math.hypot(c.center.x - 0.3, c.center.y - 0.4) for c in cs]
        assert d == sorted(d) and max(d) <= 0.5

    def test_offset_is_generic(self):
        assert all(0 < f < 1 for f in GRID_OFFSET)


class TestCellMaps:
    def test_chain_map_respects_midpoint(self):
        pts, comp, fr = chain_setup()
        phi = {2: (1.0, 0.0)}
        assert any(respects(xi, comp, fr, pts, phi) for xi in enumerate_cell_maps(pts, comp, fr, 0.1))

    def test_steiner_cells_per_anchor(self):
        # lattice count of cell centers within k + 2 eps, computed directly
        eps, k = 0.1, 1
        m = int((k + 2 * eps) / eps) + 1
        direct = sum(1 for i in range(-m, m + 1) for j in range(-m, m + 1) if math.hypot(i * eps, j * eps) <= k + 2 * eps + 1e-12)
        got = steiner_cells_per_anchor(eps, k)
        assert got == direct
        assert got <= math.pi * ((k + 2 * eps) / eps + 2) ** 2  # about 615

    def test_no_steiner_nodes_single_map(self):
        pts = np.array([[0.0, 0.0], [0.5, 0.0], [0.9, 0.3]])
        fr = forest(pts, 1)
        t = Topology((0,), 0, ())
        maps = list(enumerate_cell_maps(pts, t, fr, 0.1))
        assert len(maps) == 1

    def test_terminal_cells_are_occupied(self):
        pts = np.array([[0.0, 0.0], [0.3, 0.1], [1.9, 0.2], [1.0, 1.4]])
        fr = forest(pts, 3)
        for t in enumerate_topologies(3, 1):
            for comp in split_components(t):
                for xi in enumerate_cell_maps(pts, comp, fr, 0.1):
                    cells = xi.as_dict()
                    for v in range(comp.n_terminals):
                        members = fr.components[comp.terminals[v]]
                        assert any(cells[v].contains(pts[i], 1e-12) for i in members)

    def test_count_within_envelope(self):
        pts, comp, fr = chain_setup()
        n = len(pts)
        count = sum(1 for _ in enumerate_cell_maps(pts, comp, fr, 0.1))
        K, s, c = 2, 1, 1.0
        assert 0 < count <= (c / 0.1) ** (2 * (K + s)) * n

    @pytest.mark.parametrize("seed", range(4))
    def test_pruning_loses_nothing(self, seed):
        rng = np.random.default_rng(seed)
        raw = rng.uniform(0, 2.2, size=(3, 2))
        for lam_scale in (0.9, 1.0, 1.1):
            pts = raw / lam_scale
            fr = forest(pts, 3)
            for t in enumerate_topologies(3, 1):
                for comp in split_components(t):
                    a = any(decide(pts, comp, fr, xi) for xi in enumerate_cell_maps(pts, comp, fr, 0.1))
                    b = any(decide(pts, comp, fr, xi) for xi in enumerate_cell_maps(pts, comp, fr, 0.1, local_pruning=False))
                    assert a == b
