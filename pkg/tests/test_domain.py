import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ebst.domain import (
    CircularDomain,
    GridCell,
    area,
    clip_to_cell,
    complexity,
    contains,
    contains_many,
    disk,
    disk_union,
    intersect_domains,
    is_convex,
    is_full_cell,
    is_pseudo_convex,
    lens,
    nearest_point,
    polygon,
    union_domains,
    vertical_decomposition,
)
from ebst.geom import full_circle_row

from .oracles import Shape, build, random_shape

coord = st.floats(-1.5, 1.5, allow_nan=False)


def annulus():
    return CircularDomain.region([[full_circle_row((0, 0), 2.0, 1.0)], [full_circle_row((0, 0), 1.0, -1.0)]])


def sample_box(rng, bbox, m):
    x0, y0, x1, y1 = bbox
    return np.column_stack([rng.uniform(x0, x1, m), rng.uniform(y0, y1, m)])


class TestComplexity:
    def test_unit_disk(self):
        assert complexity(disk((0, 0))) == 2

    def test_point_set(self):
        assert complexity(CircularDomain.from_points([(i, 0) for i in range(7)])) == 7

    def test_lens(self):
        assert complexity(lens((0, 0), (1, 0))) == 4

    def test_empty(self):
        assert complexity(CircularDomain.empty()) == 0


class TestContains:
    def test_center(self):
        assert contains(disk((0, 0)), (0, 0))

    def test_boundary_is_closed(self):
        assert contains(disk((0, 0)), (1, 0))

    def test_outside(self):
        assert not contains(disk((0, 0)), (2, 0))

    def test_points(self):
        d = CircularDomain.from_points([(0, 0), (1, 1)])
        assert contains(d, (1, 1)) and not contains(d, (0.5, 0.5))


class TestPseudoConvex:
    def test_disk(self):
        assert is_pseudo_convex(disk((0, 0)))

    def test_annulus_is_not(self):
        assert not is_pseudo_convex(annulus())

    def test_lens(self):
        assert is_pseudo_convex(lens((0, 0), (1, 0)))

    def test_polygon_with_reflex_vertex(self):
        # segments are allowed either way; pseudo-convexity is about arcs
        assert is_pseudo_convex(polygon([(0, 0), (2, 0), (2, 1), (1, 0.4), (0, 1)]))
        assert not is_convex(polygon([(0, 0), (2, 0), (2, 1), (1, 0.4), (0, 1)]))


class TestIntersect:
    def test_passthrough(self, backend):
        d = intersect_domains([disk((0, 0))])
        assert complexity(d) == 2
        assert area(d) == pytest.approx(math.pi)

    def test_two_circle_lens(self, backend):
        d = intersect_domains([disk((0, 0)), disk((0.05, 0))])
        assert complexity(d) == 4
        assert len(d.loops) == 1

    def test_disjoint(self, backend):
        assert intersect_domains([disk((0, 0)), disk((3, 0))]).is_empty

    def test_lens_area(self, backend):
        # area of the intersection of two unit disks at distance 1
        assert area(lens((0, 0), (1, 0))) == pytest.approx(2 * math.pi / 3 - math.sqrt(3) / 2, abs=1e-12)

    def test_tangent_disks_drop_to_empty(self, backend):
        # a single touching point has no area and is dropped
        assert intersect_domains([disk((0, 0)), disk((2, 0))]).is_empty

    def test_identical_inputs(self, backend):
        d = intersect_domains([disk((0, 0)), disk((0, 0))])
        assert complexity(d) == 2

    @given(st.lists(st.tuples(coord, coord), min_size=2, max_size=4), st.integers(0, 2**31))
    def test_membership_is_conjunction(self, centers, seed):
        ds = [disk(c) for c in centers]
        out = intersect_domains(ds)
        rng = np.random.default_rng(seed)
        pts = rng.uniform(-2.5, 2.5, size=(300, 2))
        mem = contains_many(out, pts) if not out.is_empty else np.zeros(len(pts), bool)
        for p, m in zip(pts, mem):
            ds_ = [math.hypot(p[0] - c[0], p[1] - c[1]) for c in centers]
            if min(abs(x - 1) for x in ds_) > 1e-9:
                assert m == all(x <= 1 for x in ds_)

    @given(st.lists(st.tuples(coord, coord), min_size=2, max_size=4))
    def test_pseudo_convexity_preserved(self, centers):
        out = intersect_domains([disk(c) for c in centers])
        assert out.is_empty or is_pseudo_convex(out)


class TestClip:
    def test_disk_covers_cell(self, backend):
        c = GridCell(0, 0, 0.1)
        d = clip_to_cell(disk(c.center), c)
        assert complexity(d) == 8
        assert is_full_cell(d, c)

    def test_disjoint(self, backend):
        assert clip_to_cell(disk((5, 5)), GridCell(0, 0, 0.1)).is_empty

    def test_large_disk_crossing(self, backend):
        c = GridCell(0, 0, 0.1)
        center = (1.05, 0.02)  # the unit circle passes through the cell
        d = clip_to_cell(disk(center), c)
        assert sum(1 for r in d.rows if r[0] == 1.0) == 1
        xs = np.linspace(c.x0, c.x1, 100)
        ys = np.linspace(c.y0, c.y1, 100)
        g = np.array([(x, y) for x in xs for y in ys])
        mem = contains_many(d, g)
        truth = np.hypot(g[:, 0] - center[0], g[:, 1] - center[1])
        away = np.abs(truth - 1) > 1e-9
        assert np.array_equal(mem[away], truth[away] <= 1)

    @given(st.lists(st.tuples(coord, coord), min_size=1, max_size=3), st.integers(-5, 5), st.integers(-5, 5))
    def test_result_inside_cell(self, centers, ix, iy):
        c = GridCell(ix, iy, 0.1)
        shifted = [(c.center.x + x, c.center.y + y) for x, y in centers]
        d = clip_to_cell(disk_union(shifted), c)
        if d.is_empty:
            return
        x0, y0, x1, y1 = d.bbox()
        assert x0 >= c.x0 - 1e-9 and x1 <= c.x1 + 1e-9
        assert y0 >= c.y0 - 1e-9 and y1 <= c.y1 + 1e-9


class TestDiskUnion:
    def test_single(self):
        assert complexity(disk_union([(0, 0)])) == 2

    def test_two_close(self):
        d = disk_union([(0, 0), (0.05, 0)])
        assert complexity(d) == 4

    def test_five_points_in_a_cell(self, backend):
        rng = np.random.default_rng(11)
        c = GridCell(3, -2, 0.1)
        ps = [(c.x0 + rng.uniform(0, 0.1), c.y0 + rng.uniform(0, 0.1)) for _ in range(5)]
        d = disk_union(ps)
        assert sum(len(lp) for lp in d.loops) <= 10
        pts = sample_box(rng, (c.x0 - 1.2, c.y0 - 1.2, c.x1 + 1.2, c.y1 + 1.2), 10_000)
        truth = np.min(np.hypot(pts[:, None, 0] - np.array(ps)[None, :, 0], pts[:, None, 1] - np.array(ps)[None, :, 1]), axis=1)
        mem = contains_many(d, pts)
        away = np.abs(truth - 1) > 1e-9
        assert np.array_equal(mem[away], truth[away] <= 1)

    def test_empty_input(self):
        with pytest.raises(ValueError):
            disk_union([])


class TestVerticalDecomposition:
    def test_convex_is_single_piece(self):
        d = lens((0, 0), (0.5, 0.3))
        pieces = vertical_decomposition(d)
        assert len(pieces) == 1 and pieces[0] is d

    def test_unit_disk(self):
        assert len(vertical_decomposition(disk((0, 0)))) == 1

    def test_two_disk_union(self, backend):
        assert len(vertical_decomposition(disk_union([(0, 0), (1, 0)]))) == 2

    @pytest.mark.parametrize("shape", ["two_lenses", "three_disks"])
    def test_pieces_partition(self, backend, shape):
        if shape == "two_lenses":
            # pac-man: two lenses meeting at an angle
            d = union_domains([lens((0, 0), (0.2, 1.0)), lens((0, 0), (0.2, -1.0))])
        else:
            d = disk_union([(0, 0), (1.5, 0), (0.75, 1.2)])
        pieces = vertical_decomposition(d)
        assert len(pieces) >= 2
        assert all(is_convex(p) for p in pieces)
        assert sum(area(p) for p in pieces) == pytest.approx(area(d), rel=1e-9)
        rng = np.random.default_rng(3)
        pts = sample_box(rng, d.bbox(), 4000)
        inside = np.array([contains_many(p, pts) for p in pieces])
        # membership of the union of pieces matches the input
        assert np.array_equal(inside.any(axis=0), contains_many(d, pts))
        assert sum(complexity(p) for p in pieces) <= 6 * complexity(d)


class TestSerialization:
    def test_round_trip(self):
        d = disk_union([(0, 0), (1, 0.2)])
        e = CircularDomain.from_json(d.to_json())
        assert e.loops == d.loops

    def test_points_round_trip(self):
        d = CircularDomain.from_points([(0, 1), (2, 3)])
        assert CircularDomain.from_json(d.to_json()).points == d.points


class TestGridCell:
    def test_closed_square(self):
        c = GridCell(2, -1, 0.1)
        assert (c.x0, c.y0) == pytest.approx((0.2, -0.1))
        assert c.contains((c.x1, c.y1))
        assert c.distance_to(c.center) == 0
        assert c.max_distance_to(c.center) == pytest.approx(0.05 * math.sqrt(2))


class TestAgainstPrimitives:
    """Membership and nearest distance checked against the primitive oracle."""

    @pytest.mark.parametrize("kind", ["lens", "union"])
    def test_membership(self, backend, kind):
        rng = np.random.default_rng(42)
        for _ in range(15):
            ix, iy = int(rng.integers(-20, 20)), int(rng.integers(-20, 20))
            s = random_shape(rng, ix, iy, 0.1, kind)
            c = GridCell(ix, iy, 0.1)
            d = build(s, c)
            pts = sample_box(rng, (c.x0, c.y0, c.x1, c.y1), 400)
            mem = contains_many(d, pts) if not d.is_empty else np.zeros(len(pts), bool)
            for p, m in zip(pts, mem):
                dist = s.dist(*p)
                if dist > 1e-9:
                    assert not m
                elif s.member(*p, tol=-1e-9):
                    assert m

    def test_nearest_point_distance(self, backend):
        rng = np.random.default_rng(9)
        for _ in range(20):
            ix, iy = int(rng.integers(-5, 5)), int(rng.integers(-5, 5))
            s = random_shape(rng, ix, iy, 0.1, "union")
            d = build(s, GridCell(ix, iy, 0.1))
            if d.is_empty:
                continue
            for p in sample_box(rng, (ix * 0.1 - 1, iy * 0.1 - 1, ix * 0.1 + 1, iy * 0.1 + 1), 30):
                if s.member(*p, tol=0.0):
                    continue
                _, got = nearest_point(d, p)
                assert got == pytest.approx(s.dist(*p), abs=1e-9)


def test_oracle_self_check():
    s = Shape("lens", cell=(-1, -1, 1, 1), centers=[(0, 0), (1, 0)])
    assert s.dist(0.5, 0.0) == 0.0
    assert s.dist(3.0, 0.0) == pytest.approx(2.0)
    # nearest point is the lens apex (0.5, sqrt(3)/2)
    assert s.dist(0.5, 2.0) == pytest.approx(2 - math.sqrt(3) / 2)
