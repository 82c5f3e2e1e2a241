import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import unit_cube, unit_square
from mcrkit.errors import CoincidentCircles, DegenerateRay, InvalidGeometry
from mcrkit.geometry import (
    AngularInterval,
    Circle2,
    Circle3,
    Location,
    Orientation,
    Plane3,
    Point2,
    Segment2,
    SimplePolygon,
    TangentPoint,
    TriMeshPolyhedron,
    angle_of,
    circle_circle_intersection,
    circle_segment_intersection,
    orientation,
    point_in_polygon,
    point_in_polyhedron,
    points_in_polygon,
    sphere_plane_intersection,
)

coord = st.floats(-100, 100, allow_nan=False)


def test_orientation_examples():
    assert orientation((0, 0), (1, 0), (0, 1)) is Orientation.LEFT
    assert orientation((0, 0), (1, 0), (2, 0)) is Orientation.COLLINEAR
    assert orientation((0, 0), (1, 0), (1, -1)) is Orientation.RIGHT


@given(st.tuples(coord, coord), st.tuples(coord, coord), st.tuples(coord, coord))
def test_orientation_antisymmetric(a, b, c):
    o = orientation(a, b, c)
    flip = {Orientation.LEFT: Orientation.RIGHT, Orientation.RIGHT: Orientation.LEFT,
            Orientation.COLLINEAR: Orientation.COLLINEAR}
    assert orientation(b, a, c) is flip[o]
    assert orientation(a, c, b) is flip[o]


def test_point_in_polygon_square():
    P = unit_square()
    assert point_in_polygon(P, (0.5, 0.5)) is Location.INSIDE
    assert point_in_polygon(P, (1, 0.5)) is Location.BOUNDARY
    assert point_in_polygon(P, (2, 2)) is Location.OUTSIDE
    assert Location.BOUNDARY.contained


def test_point_in_convex_polygon_matches_half_planes():
    rng = np.random.default_rng(3)
    ang = np.sort(rng.uniform(0, 2 * math.pi, 9))
    ring = np.c_[np.cos(ang), np.sin(ang)] * 1.5
    P = SimplePolygon.from_rings(ring)
    Q = rng.uniform(-2, 2, (10_000, 2))
    got = points_in_polygon(P, Q, 1e-12)
    want = np.ones(len(Q), bool)
    for k in range(len(ring)):
        u, v = ring[k], ring[(k + 1) % len(ring)]
        want &= (v[0] - u[0]) * (Q[:, 1] - u[1]) - (v[1] - u[1]) * (Q[:, 0] - u[0]) >= 0
    assert np.array_equal(got, want)


def test_polygon_with_hole():
    P = SimplePolygon.from_rings([[0, 0], [4, 0], [4, 4], [0, 4]], [[[1, 1], [1, 3], [3, 3], [3, 1]]])
    assert point_in_polygon(P, (2, 2)) is Location.OUTSIDE
    assert point_in_polygon(P, (0.5, 2)) is Location.INSIDE
    assert point_in_polygon(P, (1, 2)) is Location.BOUNDARY


def test_polygon_validation():
    with pytest.raises(InvalidGeometry):
        SimplePolygon.from_rings([[0, 0], [1, 1], [1, 0], [0, 1]])
    with pytest.raises(InvalidGeometry):
        SimplePolygon.from_rings([[0, 0], [1, 0]])
    with pytest.raises(InvalidGeometry):
        Point2.of((float("nan"), 0))
    # clockwise input is reoriented, area stays the same
    P = SimplePolygon.from_rings([[0, 0], [0, 1], [1, 1], [1, 0]])
    assert point_in_polygon(P, (0.5, 0.5)) is Location.INSIDE


def test_circle_segment_examples():
    C = Circle2((0, 0), 1)
    hits = circle_segment_intersection(C, Segment2((-2, 0), (2, 0)))
    assert [tuple(np.round(p, 12)) for p, _ in hits] == [(-1, 0), (1, 0)]
    assert not any(t for _, t in hits)
    (p, tangent), = circle_segment_intersection(C, Segment2((-2, 1), (2, 1)))
    assert tangent and np.allclose(p, (0, 1))
    assert circle_segment_intersection(C, Segment2((-2, 2), (2, 2))) == []


@settings(max_examples=300)
@given(st.tuples(coord, coord), st.floats(0.1, 50), st.tuples(coord, coord), st.tuples(coord, coord))
def test_circle_segment_residuals(c, R, u, v):
    if math.dist(u, v) < 1e-3:
        return
    C, s = Circle2(c, R), Segment2(u, v)
    eps = 1e-9 * max(1.0, math.dist(c, u) + math.dist(c, v) + 2 * R)
    for p, tangent in circle_segment_intersection(C, s):
        assert abs(math.dist(p, c) - R) <= 10 * eps or tangent
        d = np.subtract(v, u)
        t = np.dot(np.subtract(p, u), d) / np.dot(d, d)
        assert -1e-12 <= t <= 1 + 1e-12
        assert np.linalg.norm(np.add(u, t * d) - p) <= 10 * eps


def test_circle_circle_examples():
    pts = circle_circle_intersection(Circle2((0, 0), 1), Circle2((1, 0), 1))
    assert np.allclose(sorted(pts), [(0.5, -math.sqrt(3) / 2), (0.5, math.sqrt(3) / 2)])
    assert circle_circle_intersection(Circle2((0, 0), 1), Circle2((3, 0), 1)) == []
    with pytest.raises(CoincidentCircles):
        circle_circle_intersection(Circle2((0, 0), 1), Circle2((0, 0), 1))


@given(st.tuples(coord, coord), st.floats(0.1, 20), st.tuples(coord, coord), st.floats(0.1, 20))
def test_circle_circle_residuals(c1, r1, c2, r2):
    if math.dist(c1, c2) < 1e-6:
        return
    scale = max(1.0, math.dist(c1, c2) + 2 * max(r1, r2))
    for p in circle_circle_intersection(Circle2(c1, r1), Circle2(c2, r2)):
        assert abs(math.dist(p, c1) - r1) <= 1e-7 * scale
        assert abs(math.dist(p, c2) - r2) <= 1e-7 * scale


def test_angle_of():
    assert angle_of((1, 0), (0, 0)) == 0
    assert angle_of((0, 1), (0, 0)) == pytest.approx(math.pi / 2)
    assert angle_of((-1, -1), (0, 0)) == pytest.approx(5 * math.pi / 4)
    with pytest.raises(DegenerateRay):
        angle_of((1, 1), (1, 1))


def test_angular_interval_membership():
    iv = AngularInterval(5.0, 1.0)
    assert iv.wraps and iv.contains(0.0) and iv.contains(5.5) and not iv.contains(3.0)
    single = AngularInterval(2.0, 2.0)
    assert single.contains(2.0) and not single.contains(2.1) and single.length == 0
    assert AngularInterval.full().contains(4.0)


def test_point_in_polyhedron_cube():
    M = unit_cube()
    assert point_in_polyhedron(M, (0.5, 0.5, 0.5)) is Location.INSIDE
    assert point_in_polyhedron(M, (1, 0.5, 0.5)) is Location.BOUNDARY
    assert point_in_polyhedron(M, (2, 0, 0)) is Location.OUTSIDE
    # ray passing exactly through an edge and a vertex still resolves
    assert point_in_polyhedron(M, (0.5, 0.5, 0.25)) is Location.INSIDE


def test_mesh_validation():
    M = unit_cube()
    with pytest.raises(InvalidGeometry):
        TriMeshPolyhedron.from_arrays(M.vertices, M.facets[:-1])
    with pytest.raises(InvalidGeometry):
        F = M.facets.copy()
        F[0] = F[0][::-1]
        TriMeshPolyhedron.from_arrays(M.vertices, F)


def test_sphere_plane_examples():
    C = sphere_plane_intersection((0, 0, 0), 1.0, Plane3((0, 0, 1), 0.0))
    assert isinstance(C, Circle3) and C.radius == pytest.approx(1) and np.allclose(C.center, 0)
    assert np.allclose(C.normal, (0, 0, 1))
    T = sphere_plane_intersection((0, 0, 0), 1.0, Plane3((0, 0, 1), 1.0))
    assert isinstance(T, TangentPoint) and np.allclose(T.point, (0, 0, 1))
    assert sphere_plane_intersection((0, 0, 0), 1.0, Plane3((0, 0, 1), 2.0)) is None


def test_sphere_plane_circle_residuals():
    rng = np.random.default_rng(8)
    for _ in range(200):
        c = rng.uniform(-3, 3, 3)
        R = rng.uniform(0.5, 3)
        n = rng.normal(size=3)
        n /= np.linalg.norm(n)
        pl = Plane3(n, float(n @ c + rng.uniform(-R, R)))
        C = sphere_plane_intersection(c, R, pl)
        if not isinstance(C, Circle3):
            continue
        pts = C.point_at(np.linspace(0, 2 * math.pi, 25))
        eps = 1e-9 * (2 * R + np.linalg.norm(c))
        assert np.abs(np.linalg.norm(pts - c, axis=1) - R).max() <= 10 * eps
        assert np.abs(pts @ n - pl.offset).max() <= 10 * eps
